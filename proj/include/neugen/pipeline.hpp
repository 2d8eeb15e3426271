#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neugen/features.hpp"
#include "neugen/metrics.hpp"
#include "neugen/transform.hpp"

namespace neugen {

struct Scene {
    std::string name;
    std::vector<std::string> image_paths; // lexicographic order
};

struct SceneSet {
    std::string root;
    std::vector<Scene> scenes;
};

enum class EmitKind { Gmap, Enhanced, Both };

struct BatchSummary {
    std::size_t processed = 0;
    std::size_t degenerate = 0;
    std::size_t failed = 0;
    std::vector<std::string> degenerate_paths;
    std::vector<std::string> failed_paths;
};

struct PairRow {
    std::string scene;
    std::string image_a;
    std::string image_b;
    std::size_t matches_original = 0;
    std::size_t matches_neugen = 0;
};

struct SceneRow {
    std::string scene;
    std::size_t image_count = 0;
    double class_ssim_original = 0.0;
    double class_ssim_neugen = 0.0;
};

struct EvalReport {
    std::vector<SceneRow> scenes;
    std::vector<PairRow> pairs;
    std::vector<std::string> skipped_scenes;
    double mean_class_ssim_original = 0.0;
    double mean_class_ssim_neugen = 0.0;
    double mean_matches_original = 0.0;
    double mean_matches_neugen = 0.0;
    int patch_size = 3;
    double fusion_weight = 0.5;
    int ssim_window = 11;
    std::string tool_version;
    std::string timestamp; // excluded from CSV and from determinism comparisons
};

struct SweepRow {
    double weight = 0.0;
    double mean_pairwise_ssim = 0.0; // mean over scenes of mean ssim(original_k, enhanced_k)
    double mean_match_delta = 0.0;   // mean over adjacent pairs of (enhanced - original) match count
};

extern const std::vector<double> kDefaultSweepWeights; // {0.5, 0.55, 0.72, 0.74, 1.2, 1.5, 2.9}

SceneSet scan_dataset(const std::string& root);

BatchSummary transform_batch(const SceneSet& scenes, const NeuGenConfig& cfg,
                             const std::string& out_root, EmitKind emit);

EvalReport eval_effect(const SceneSet& scenes, const NeuGenConfig& cfg, const SsimParams& params);

std::vector<SweepRow> weight_sweep(const SceneSet& scenes, const std::vector<double>& weights,
                                   const NeuGenConfig& base, const SsimParams& params);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& json_text);
std::string report_to_csv(const EvalReport& report);

std::string sweep_to_json(const std::vector<SweepRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Worker-count knob honored by batch operations (NEUGEN_WORKERS env override).
int worker_count();

} // namespace neugen
