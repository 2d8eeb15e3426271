#include "neugen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <functional>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace neugen {

const std::vector<double> kDefaultSweepWeights = {0.5, 0.55, 0.72, 0.74, 1.2, 1.5, 2.9};

namespace {

constexpr const char* kToolVersion = "neugen 1.0.0";

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_png(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png";
}

// Index-chunked parallel loop; output slots are preallocated so row order
// stays input-defined regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<int>(worker_count(), static_cast<int>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::size_t match_count(const ImageF& a, const ImageF& b) {
    const ImageF ga = to_grayscale(a);
    const ImageF gb = to_grayscale(b);
    const auto ka = detect_keypoints(ga);
    const auto kb = detect_keypoints(gb);
    const auto da = compute_descriptors(ga, ka);
    const auto db = compute_descriptors(gb, kb);
    return match_descriptors(da, db).matches;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

int worker_count() {
    if (const char* env = std::getenv("NEUGEN_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

SceneSet scan_dataset(const std::string& root) {
    if (!fs::exists(root) || !fs::is_directory(root))
        throw NotADirectory("scan_dataset: not a directory: " + root);

    SceneSet set;
    set.root = root;
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) subdirs.push_back(e.path());
    std::sort(subdirs.begin(), subdirs.end());

    for (const fs::path& dir : subdirs) {
        Scene scene;
        scene.name = dir.filename().string();
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && is_png(e.path())) scene.image_paths.push_back(e.path().string());
        std::sort(scene.image_paths.begin(), scene.image_paths.end());
        if (!scene.image_paths.empty()) set.scenes.push_back(std::move(scene));
    }
    if (set.scenes.empty()) throw EmptyDataset("scan_dataset: no scene subdirectory with PNGs under " + root);
    return set;
}

BatchSummary transform_batch(const SceneSet& scenes, const NeuGenConfig& cfg,
                             const std::string& out_root, EmitKind emit) {
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) throw IoError("transform_batch: cannot create " + out_root);

    struct Job {
        std::string scene;
        std::string path;
    };
    std::vector<Job> jobs;
    for (const Scene& s : scenes.scenes)
        for (const std::string& p : s.image_paths) jobs.push_back({s.name, p});

    struct Result {
        bool ok = false;
        bool degenerate = false;
        std::string path;
    };
    std::vector<Result> results(jobs.size());

    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        Result& res = results[i];
        res.path = job.path;
        try {
            const fs::path out_dir = fs::path(out_root) / job.scene;
            fs::create_directories(out_dir);
            const std::string stem = fs::path(job.path).stem().string();

            const ImageF img = load_image(job.path);
            const NeuGenMap gm = neugen_map(img, cfg);
            res.degenerate = gm.degenerate;
            if (emit == EmitKind::Gmap || emit == EmitKind::Both) {
                save_ngf(gm.map, (out_dir / (stem + "_gmap.ngf1")).string());
                save_image(gm.map, (out_dir / (stem + "_gmap.png")).string());
            }
            if (emit == EmitKind::Enhanced || emit == EmitKind::Both) {
                const ImageF enhanced = fuse(img, gm.map, cfg.fusion_weight);
                save_image(enhanced, (out_dir / (stem + "_enhanced.png")).string());
            }
            res.ok = true;
        } catch (const Error&) {
            res.ok = false;
        }
    });

    BatchSummary summary;
    for (const Result& r : results) {
        if (!r.ok) {
            ++summary.failed;
            summary.failed_paths.push_back(r.path);
        } else {
            ++summary.processed;
            if (r.degenerate) {
                ++summary.degenerate;
                summary.degenerate_paths.push_back(r.path);
            }
        }
    }
    return summary;
}

EvalReport eval_effect(const SceneSet& scenes, const NeuGenConfig& cfg, const SsimParams& params) {
    EvalReport report;
    report.patch_size = cfg.patch_size;
    report.fusion_weight = cfg.fusion_weight;
    report.ssim_window = params.window;
    report.tool_version = kToolVersion;
    report.timestamp = utc_timestamp();

    for (const Scene& scene : scenes.scenes) {
        if (scene.image_paths.size() < 2) {
            report.skipped_scenes.push_back(scene.name);
            continue;
        }
        try {
            std::vector<ImageF> originals;
            std::vector<ImageF> gmaps;
            for (const std::string& p : scene.image_paths) {
                originals.push_back(load_image(p));
                gmaps.push_back(neugen_map(originals.back(), cfg).map);
            }

            SceneRow row;
            row.scene = scene.name;
            row.image_count = originals.size();
            row.class_ssim_original = class_ssim(originals, params);
            row.class_ssim_neugen = class_ssim(gmaps, params);
            report.scenes.push_back(row);

            std::vector<PairRow> pair_rows(originals.size() - 1);
            parallel_for(pair_rows.size(), [&](std::size_t k) {
                PairRow pr;
                pr.scene = scene.name;
                pr.image_a = fs::path(scene.image_paths[k]).filename().string();
                pr.image_b = fs::path(scene.image_paths[k + 1]).filename().string();
                pr.matches_original = match_count(originals[k], originals[k + 1]);
                pr.matches_neugen = match_count(gmaps[k], gmaps[k + 1]);
                pair_rows[k] = std::move(pr);
            });
            report.pairs.insert(report.pairs.end(), pair_rows.begin(), pair_rows.end());
        } catch (const Error&) {
            report.skipped_scenes.push_back(scene.name);
        }
    }

    if (!report.scenes.empty()) {
        for (const SceneRow& r : report.scenes) {
            report.mean_class_ssim_original += r.class_ssim_original;
            report.mean_class_ssim_neugen += r.class_ssim_neugen;
        }
        report.mean_class_ssim_original /= static_cast<double>(report.scenes.size());
        report.mean_class_ssim_neugen /= static_cast<double>(report.scenes.size());
    }
    if (!report.pairs.empty()) {
        for (const PairRow& r : report.pairs) {
            report.mean_matches_original += static_cast<double>(r.matches_original);
            report.mean_matches_neugen += static_cast<double>(r.matches_neugen);
        }
        report.mean_matches_original /= static_cast<double>(report.pairs.size());
        report.mean_matches_neugen /= static_cast<double>(report.pairs.size());
    }
    return report;
}

std::vector<SweepRow> weight_sweep(const SceneSet& scenes, const std::vector<double>& weights,
                                   const NeuGenConfig& base, const SsimParams& params) {
    if (weights.empty()) throw UsageError("weight_sweep: weights must be nonempty");
    std::vector<double> sorted = weights;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw UsageError("weight_sweep: weights must be distinct");
    for (double w : sorted)
        if (w < 0) throw UsageError("weight_sweep: weights must be nonnegative");

    struct SceneData {
        std::vector<ImageF> originals;
        std::vector<ImageF> gmaps;
        std::vector<std::size_t> matches_original; // adjacent pairs
    };
    std::vector<SceneData> data;
    for (const Scene& scene : scenes.scenes) {
        if (scene.image_paths.size() < 2) continue;
        SceneData sd;
        for (const std::string& p : scene.image_paths) {
            sd.originals.push_back(load_image(p));
            sd.gmaps.push_back(neugen_map(sd.originals.back(), base).map);
        }
        sd.matches_original.resize(sd.originals.size() - 1);
        parallel_for(sd.matches_original.size(), [&](std::size_t k) {
            sd.matches_original[k] = match_count(sd.originals[k], sd.originals[k + 1]);
        });
        data.push_back(std::move(sd));
    }
    if (data.empty()) throw EmptyDataset("weight_sweep: no scene with >= 2 images");

    std::vector<SweepRow> rows;
    for (double w : sorted) {
        SweepRow row;
        row.weight = w;
        double ssim_total = 0.0;
        double delta_total = 0.0;
        std::size_t pair_total = 0;
        for (const SceneData& sd : data) {
            std::vector<ImageF> enhanced;
            enhanced.reserve(sd.originals.size());
            for (std::size_t i = 0; i < sd.originals.size(); ++i)
                enhanced.push_back(fuse(sd.originals[i], sd.gmaps[i], w));

            double scene_ssim = 0.0;
            for (std::size_t i = 0; i < sd.originals.size(); ++i)
                scene_ssim += ssim(sd.originals[i], enhanced[i], params);
            ssim_total += scene_ssim / static_cast<double>(sd.originals.size());

            std::vector<double> deltas(sd.matches_original.size());
            parallel_for(deltas.size(), [&](std::size_t k) {
                const std::size_t me = match_count(enhanced[k], enhanced[k + 1]);
                deltas[k] = static_cast<double>(me) - static_cast<double>(sd.matches_original[k]);
            });
            for (double d : deltas) delta_total += d;
            pair_total += deltas.size();
        }
        row.mean_pairwise_ssim = ssim_total / static_cast<double>(data.size());
        row.mean_match_delta = pair_total ? delta_total / static_cast<double>(pair_total) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

namespace {

json report_to_json_obj(const EvalReport& r) {
    json j;
    j["config"] = {{"patch_size", r.patch_size},
                   {"fusion_weight", r.fusion_weight},
                   {"ssim_window", r.ssim_window}};
    j["tool_version"] = r.tool_version;
    j["timestamp"] = r.timestamp;
    j["scenes"] = json::array();
    for (const SceneRow& s : r.scenes)
        j["scenes"].push_back({{"scene", s.scene},
                               {"image_count", s.image_count},
                               {"class_ssim_original", s.class_ssim_original},
                               {"class_ssim_neugen", s.class_ssim_neugen}});
    j["pairs"] = json::array();
    for (const PairRow& p : r.pairs)
        j["pairs"].push_back({{"scene", p.scene},
                              {"image_a", p.image_a},
                              {"image_b", p.image_b},
                              {"matches_original", p.matches_original},
                              {"matches_neugen", p.matches_neugen}});
    j["skipped_scenes"] = r.skipped_scenes;
    j["aggregates"] = {{"mean_class_ssim_original", r.mean_class_ssim_original},
                       {"mean_class_ssim_neugen", r.mean_class_ssim_neugen},
                       {"mean_matches_original", r.mean_matches_original},
                       {"mean_matches_neugen", r.mean_matches_neugen}};
    return j;
}

} // namespace

std::string report_to_json(const EvalReport& r) {
    return report_to_json_obj(r).dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    EvalReport r;
    r.patch_size = j.at("config").at("patch_size").get<int>();
    r.fusion_weight = j.at("config").at("fusion_weight").get<double>();
    r.ssim_window = j.at("config").at("ssim_window").get<int>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    for (const auto& s : j.at("scenes")) {
        SceneRow row;
        row.scene = s.at("scene").get<std::string>();
        row.image_count = s.at("image_count").get<std::size_t>();
        row.class_ssim_original = s.at("class_ssim_original").get<double>();
        row.class_ssim_neugen = s.at("class_ssim_neugen").get<double>();
        r.scenes.push_back(std::move(row));
    }
    for (const auto& p : j.at("pairs")) {
        PairRow row;
        row.scene = p.at("scene").get<std::string>();
        row.image_a = p.at("image_a").get<std::string>();
        row.image_b = p.at("image_b").get<std::string>();
        row.matches_original = p.at("matches_original").get<std::size_t>();
        row.matches_neugen = p.at("matches_neugen").get<std::size_t>();
        r.pairs.push_back(std::move(row));
    }
    r.skipped_scenes = j.at("skipped_scenes").get<std::vector<std::string>>();
    r.mean_class_ssim_original = j.at("aggregates").at("mean_class_ssim_original").get<double>();
    r.mean_class_ssim_neugen = j.at("aggregates").at("mean_class_ssim_neugen").get<double>();
    r.mean_matches_original = j.at("aggregates").at("mean_matches_original").get<double>();
    r.mean_matches_neugen = j.at("aggregates").at("mean_matches_neugen").get<double>();
    return r;
}

std::string report_to_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "scene,metric,variant,weight,value\n";
    for (const SceneRow& s : r.scenes) {
        os << s.scene << ",class_ssim,original," << fmt_double(r.fusion_weight) << ","
           << fmt_double(s.class_ssim_original) << "\n";
        os << s.scene << ",class_ssim,neugen," << fmt_double(r.fusion_weight) << ","
           << fmt_double(s.class_ssim_neugen) << "\n";
    }
    // per-scene mean adjacent-pair match counts
    for (const SceneRow& s : r.scenes) {
        double orig = 0, neu = 0;
        std::size_t n = 0;
        for (const PairRow& p : r.pairs) {
            if (p.scene != s.scene) continue;
            orig += static_cast<double>(p.matches_original);
            neu += static_cast<double>(p.matches_neugen);
            ++n;
        }
        if (n) {
            orig /= static_cast<double>(n);
            neu /= static_cast<double>(n);
        }
        os << s.scene << ",matches,original," << fmt_double(r.fusion_weight) << "," << fmt_double(orig) << "\n";
        os << s.scene << ",matches,neugen," << fmt_double(r.fusion_weight) << "," << fmt_double(neu) << "\n";
    }
    return os.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
    json j = json::array();
    for (const SweepRow& r : rows)
        j.push_back({{"weight", r.weight},
                     {"mean_pairwise_ssim", r.mean_pairwise_ssim},
                     {"mean_match_delta", r.mean_match_delta}});
    return j.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "scene,metric,variant,weight,value\n";
    for (const SweepRow& r : rows) {
        os << "(all),pairwise_ssim,enhanced," << fmt_double(r.weight) << ","
           << fmt_double(r.mean_pairwise_ssim) << "\n";
        os << "(all),match_delta,enhanced," << fmt_double(r.weight) << ","
           << fmt_double(r.mean_match_delta) << "\n";
    }
    return os.str();
}

} // namespace neugen
