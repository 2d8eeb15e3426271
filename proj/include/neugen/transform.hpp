#pragma once

#include "neugen/image.hpp"

namespace neugen {

enum class BorderPolicy { Reflect };     // mirror without repeating the edge pixel
enum class ChannelMode { Joint };        // one std over all s*s*C samples

struct NeuGenConfig {
    int patch_size = 3;        // odd, >= 3
    double fusion_weight = 0.5;
    BorderPolicy border = BorderPolicy::Reflect;
    ChannelMode channel_mode = ChannelMode::Joint;
};

// Per-pixel windowed statistics over the s*s*C joint patch.
struct StatsMap {
    ImageF mean;   // 1-channel
    ImageF std;    // 1-channel, population std, >= 0
    double z = 0;  // max over std
};

struct NeuGenMap {
    ImageF map;              // 1-channel, samples in [0,1]
    bool degenerate = false; // z <= eps: map is all-zero
};

// Naive O(s^2) per-pixel reference path.
StatsMap patch_stats(const ImageF& img, int patch_size, BorderPolicy border = BorderPolicy::Reflect);

// Summed-area-table path; identical contract to patch_stats within 1e-5.
StatsMap windowed_stats_fast(const ImageF& img, int patch_size, BorderPolicy border = BorderPolicy::Reflect);

NeuGenMap neugen_map(const ImageF& img, const NeuGenConfig& cfg);

// out(x,y,c) = clamp(img(x,y,c) + w * gmap(x,y), 0, 1)
ImageF fuse(const ImageF& img, const ImageF& gmap, double weight);

ImageF neugen_enhance(const ImageF& img, const NeuGenConfig& cfg);

} // namespace neugen
