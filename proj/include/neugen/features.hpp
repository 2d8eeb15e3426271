#pragma once

#include <array>
#include <vector>

#include "neugen/image.hpp"

namespace neugen {

struct Keypoint {
    double x = 0, y = 0;       // subpixel coordinates in the input image
    double scale = 0;          // absolute blur sigma
    double orientation = 0;    // radians, dominant gradient direction
    double response = 0;       // |DoG| at the refined extremum
    int octave = 0;
    int level = 0;             // scale index inside the octave
};

struct Descriptor {
    std::array<float, 128> vector{}; // 4x4x8 gradient histogram, L2-normalized, clipped at 0.2
};

struct MatchReport {
    std::size_t count_a_keypoints = 0;
    std::size_t count_b_keypoints = 0;
    std::size_t matches = 0;
    double ratio_threshold = 0.8;
};

struct DetectorParams {
    int octaves = 3;
    int scales_per_octave = 3;
    double contrast_threshold = 0.03;
    double edge_threshold = 10.0;
    double base_sigma = 1.6;
};

// Difference-of-Gaussians extrema, subpixel-refined, deterministically ordered
// (response desc, then y, then x).
std::vector<Keypoint> detect_keypoints(const ImageF& gray, const DetectorParams& params = {});

std::vector<Descriptor> compute_descriptors(const ImageF& gray, const std::vector<Keypoint>& keypoints,
                                            const DetectorParams& params = {});

// Lowe ratio test followed by greedy one-to-one assignment by ascending distance.
MatchReport match_descriptors(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b,
                              double ratio = 0.8);

} // namespace neugen
