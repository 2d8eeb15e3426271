#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "neugen/pipeline.hpp"
#include "test_util.hpp"

using namespace neugen;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

// scene of one textured base image plus affine-shifted variants
void write_affine_scene(const fs::path& dir, std::uint64_t seed, int variants) {
    fs::create_directories(dir);
    ImageF base = testutil::blob_texture(64, 64, seed);
    // headroom so the affine shifts stay inside [0,1] and survive PNG quantization
    for (float& v : base.data()) v = 0.1f + 0.6f * v;
    save_image(base, (dir / "img_0.png").string(), 16);
    const float as[] = {0.8f, 0.9f, 1.1f, 1.2f, 0.85f, 1.15f};
    const float bs[] = {0.05f, -0.03f, 0.02f, -0.05f, 0.04f, 0.01f};
    for (int k = 0; k < variants; ++k) {
        ImageF var = testutil::affine_shift_clamped(base, as[k % 6], bs[k % 6]);
        save_image(var, (dir / ("img_" + std::to_string(k + 1) + ".png")).string(), 16);
    }
}

} // namespace

TEST_CASE("scan_dataset enumerates scenes with lexicographic image order") {
    TempDir t("ng_scan");
    fs::create_directories(t.path / "lego");
    fs::create_directories(t.path / "drums");
    ImageF img(16, 16, 1, 0.5f);
    for (const char* n : {"0.png", "10.png", "2.png"}) save_image(img, (t.path / "lego" / n).string());
    for (const char* n : {"a.png", "b.png"}) save_image(img, (t.path / "drums" / n).string());

    SceneSet set = scan_dataset(t.path.string());
    REQUIRE(set.scenes.size() == 2);
    CHECK(set.scenes[0].name == "drums");
    CHECK(set.scenes[0].image_paths.size() == 2);
    CHECK(set.scenes[1].name == "lego");
    REQUIRE(set.scenes[1].image_paths.size() == 3);
    CHECK(fs::path(set.scenes[1].image_paths[0]).filename() == "0.png");
    CHECK(fs::path(set.scenes[1].image_paths[1]).filename() == "10.png");
    CHECK(fs::path(set.scenes[1].image_paths[2]).filename() == "2.png");
}

TEST_CASE("scan_dataset errors") {
    CHECK_THROWS_AS(scan_dataset("/nonexistent/dataset"), NotADirectory);
    TempDir t("ng_empty");
    fs::create_directories(t.path / "scene");
    CHECK_THROWS_AS(scan_dataset(t.path.string()), EmptyDataset);
}

TEST_CASE("transform_batch mirrors the tree and flags degenerate inputs") {
    TempDir in("ng_tb_in");
    TempDir out("ng_tb_out");
    fs::create_directories(in.path / "a");
    fs::create_directories(in.path / "b");
    save_image(testutil::blob_texture(32, 32, 1), (in.path / "a" / "x.png").string());
    save_image(testutil::blob_texture(32, 32, 2), (in.path / "a" / "y.png").string());
    save_image(ImageF(32, 32, 1, 0.5f), (in.path / "b" / "flat.png").string());

    SceneSet set = scan_dataset(in.path.string());
    BatchSummary s = transform_batch(set, {}, out.path.string(), EmitKind::Both);
    CHECK(s.processed == 3);
    CHECK(s.failed == 0);
    CHECK(s.degenerate == 1);
    REQUIRE(s.degenerate_paths.size() == 1);
    CHECK(fs::path(s.degenerate_paths[0]).filename() == "flat.png");

    for (const char* f : {"a/x_gmap.ngf1", "a/x_gmap.png", "a/x_enhanced.png",
                          "a/y_gmap.ngf1", "b/flat_gmap.ngf1", "b/flat_enhanced.png"})
        CHECK(fs::exists(out.path / f));

    // rerun is bit-identical for NGF1 outputs
    const std::string before = read_file(out.path / "a" / "x_gmap.ngf1");
    transform_batch(set, {}, out.path.string(), EmitKind::Both);
    CHECK(read_file(out.path / "a" / "x_gmap.ngf1") == before);
}

TEST_CASE("transform_batch isolates per-image failures") {
    TempDir in("ng_fail_in");
    TempDir out("ng_fail_out");
    fs::create_directories(in.path / "s");
    save_image(testutil::blob_texture(32, 32, 3), (in.path / "s" / "good.png").string());
    std::ofstream(in.path / "s" / "corrupt.png") << "not a png";

    SceneSet set = scan_dataset(in.path.string());
    BatchSummary s = transform_batch(set, {}, out.path.string(), EmitKind::Gmap);
    CHECK(s.processed == 1);
    CHECK(s.failed == 1);
    CHECK(s.processed + s.failed == 2);
}

TEST_CASE("eval_effect separates affine-shifted corpora") {
    TempDir in("ng_eval_in");
    write_affine_scene(in.path / "scene0", 21, 4);
    write_affine_scene(in.path / "scene1", 22, 4);

    SceneSet set = scan_dataset(in.path.string());
    EvalReport rep = eval_effect(set, {}, {});
    REQUIRE(rep.scenes.size() == 2);
    for (const SceneRow& r : rep.scenes) {
        CHECK(r.class_ssim_neugen == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(r.class_ssim_neugen > r.class_ssim_original);
    }
    CHECK(rep.pairs.size() == 8);

    // JSON round-trip is lossless
    const std::string text = report_to_json(rep);
    EvalReport back = report_from_json(text);
    CHECK(report_to_json(back) == text);

    // CSV: scenes x metrics x variants rows plus header
    const std::string csv = report_to_csv(rep);
    const std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == 1 + rep.scenes.size() * 2 * 2);
}

TEST_CASE("eval_effect skips scenes with fewer than two images") {
    TempDir in("ng_skip_in");
    write_affine_scene(in.path / "ok", 31, 2);
    fs::create_directories(in.path / "single");
    save_image(testutil::blob_texture(64, 64, 32), (in.path / "single" / "only.png").string());

    SceneSet set = scan_dataset(in.path.string());
    EvalReport rep = eval_effect(set, {}, {});
    CHECK(rep.scenes.size() == 1);
    REQUIRE(rep.skipped_scenes.size() == 1);
    CHECK(rep.skipped_scenes[0] == "single");
}

TEST_CASE("weight_sweep validates inputs and sorts rows") {
    TempDir in("ng_sweep_in");
    write_affine_scene(in.path / "s", 41, 2);
    SceneSet set = scan_dataset(in.path.string());

    CHECK_THROWS_AS(weight_sweep(set, {}, {}, {}), UsageError);
    CHECK_THROWS_AS(weight_sweep(set, {0.5, 0.5}, {}, {}), UsageError);
    CHECK_THROWS_AS(weight_sweep(set, {-0.1}, {}, {}), UsageError);

    auto rows = weight_sweep(set, {1.5, 0.0, 0.5}, {}, {});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].weight == 0.0);
    CHECK(rows[1].weight == 0.5);
    CHECK(rows[2].weight == 1.5);

    // w=0 is an exact identity baseline
    CHECK(rows[0].mean_pairwise_ssim == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rows[0].mean_match_delta == 0.0);
}

TEST_CASE("default sweep weights mirror the published list") {
    REQUIRE(kDefaultSweepWeights.size() == 7);
    CHECK(kDefaultSweepWeights == std::vector<double>{0.5, 0.55, 0.72, 0.74, 1.2, 1.5, 2.9});
}

TEST_CASE("sweep serialization") {
    std::vector<SweepRow> rows = {{0.5, 0.98, 1.5}, {1.2, 0.91, -0.5}};
    const std::string csv = sweep_to_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2);
    CHECK(sweep_to_json(rows).find("0.98") != std::string::npos);
}

TEST_CASE("worker count env override") {
    setenv("NEUGEN_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    unsetenv("NEUGEN_WORKERS");
    CHECK(worker_count() >= 1);
}
