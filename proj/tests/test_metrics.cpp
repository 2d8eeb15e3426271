#include <doctest.h>

#include <cmath>
#include <limits>

#include "neugen/metrics.hpp"
#include "test_util.hpp"

using namespace neugen;

TEST_CASE("ssim of an image with itself is 1") {
    ImageF img = testutil::random_image(32, 32, 3, 1);
    CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim of equal constant images is 1") {
    ImageF a(16, 16, 1, 0.5f);
    ImageF b(16, 16, 1, 0.5f);
    CHECK(ssim(a, b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim of constant images matches the closed-form luminance term") {
    // (2*0.25*0.75 + 1e-4) / (0.25^2 + 0.75^2 + 1e-4); contrast/structure term is 1
    ImageF a(16, 16, 1, 0.25f);
    ImageF b(16, 16, 1, 0.75f);
    const double expected = (2.0 * 0.25 * 0.75 + 1e-4) / (0.0625 + 0.5625 + 1e-4);
    CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-4));
    CHECK(expected == doctest::Approx(0.60006).epsilon(1e-4));
}

TEST_CASE("ssim is symmetric") {
    ImageF a = testutil::random_image(24, 24, 1, 2);
    ImageF b = testutil::random_image(24, 24, 1, 3);
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) < 1e-9);
}

TEST_CASE("ssim is bounded") {
    // unrelated noise can push the structure term slightly negative but the
    // index must stay inside [-1, 1]
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ImageF a = testutil::random_image(20, 20, 3, seed);
        ImageF b = testutil::random_image(20, 20, 3, seed + 100);
        const double s = ssim(a, b);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
    }
    // related pairs (the protocol's comparisons) land in (0, 1]
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ImageF a = testutil::blob_texture(48, 48, seed);
        ImageF b = testutil::affine_shift_clamped(a, 0.8f, 0.05f);
        const double s = ssim(a, b);
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("ssim rejects mismatched inputs") {
    ImageF a(16, 16, 1);
    ImageF b(17, 16, 1);
    CHECK_THROWS_AS(ssim(a, b), DimensionMismatch);
    ImageF tiny(8, 8, 1);
    CHECK_THROWS_AS(ssim(tiny, tiny), DimensionMismatch);
}

TEST_CASE("psnr closed-form values") {
    ImageF a(10, 10, 1, 0.5f);

    ImageF b = a;
    CHECK(std::isinf(psnr(a, b)));

    for (float& v : b.data()) v += 0.1f;
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-4));

    ImageF c = a;
    for (float& v : c.data()) v += 0.01f;
    CHECK(psnr(a, c) == doctest::Approx(40.0).epsilon(1e-3));
}

TEST_CASE("psnr is symmetric") {
    ImageF a = testutil::random_image(12, 12, 3, 4);
    ImageF b = testutil::random_image(12, 12, 3, 5);
    CHECK(psnr(a, b) == psnr(b, a));
}

TEST_CASE("class_ssim follows its definition") {
    ImageF i = testutil::blob_texture(48, 48, 6);
    ImageF j = testutil::random_image(48, 48, 1, 7);

    CHECK(class_ssim({i, i}) == doctest::Approx(1.0).epsilon(1e-9));
    const double sij = ssim(i, j);
    CHECK(class_ssim({i, i, j}) == doctest::Approx((1.0 + sij) / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS(class_ssim({i}), TooFewImages);
}

TEST_CASE("class_ssim of all-identical lists is 1") {
    ImageF i = testutil::random_image(20, 20, 3, 8);
    CHECK(class_ssim({i, i, i, i}) == doctest::Approx(1.0).epsilon(1e-9));
}
