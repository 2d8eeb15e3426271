#include <doctest.h>

#include <cmath>
#include <random>

#include "neugen/volren.hpp"

using namespace neugen;

namespace {

RaySamples uniform_ray(int n, double length, double sigma, Vec3 color) {
    RaySamples r;
    const double dt = length / n;
    for (int i = 0; i < n; ++i) r.entries.push_back({(i + 0.5) * dt, dt, sigma, color});
    return r;
}

VoxelField slab_field(double sigma, Vec3 color) {
    VoxelField f;
    f.nx = f.ny = f.nz = 4;
    f.bounds_min = {-2, -2, 1};
    f.bounds_max = {2, 2, 2};
    f.sigma_grid.assign(64, sigma);
    f.color_grid.assign(64, color);
    return f;
}

} // namespace

TEST_CASE("transmittance starts at 1 and follows the accumulated density") {
    RaySamples r;
    r.entries.push_back({0.25, 0.5, 2.0, {1, 1, 1}});
    r.entries.push_back({0.75, 0.5, 3.0, {1, 1, 1}});
    auto t = transmittance(r);
    CHECK(t[0] == 1.0);
    CHECK(t[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("zero density means full transmittance and black output") {
    RaySamples r = uniform_ray(16, 1.0, 0.0, {0.5, 0.5, 0.5});
    for (double t : transmittance(r)) CHECK(t == 1.0);
    const Vec3 c = composite_ray(r);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
    CHECK(c[2] == 0.0);
}

TEST_CASE("transmittance is monotone nonincreasing on random rays") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        RaySamples r;
        double t = 0;
        const int n = 2 + static_cast<int>(uni(rng) * 30);
        for (int i = 0; i < n; ++i) {
            const double dt = 0.01 + uni(rng) * 0.2;
            r.entries.push_back({t + dt * 0.5, dt, uni(rng) * 5.0, {uni(rng), uni(rng), uni(rng)}});
            t += dt;
        }
        auto tr = transmittance(r);
        CHECK(tr[0] == 1.0);
        for (std::size_t i = 1; i < tr.size(); ++i) {
            CHECK(tr[i] <= tr[i - 1]);
            CHECK(tr[i] > 0.0);
        }
    }
}

TEST_CASE("invalid rays are rejected") {
    CHECK_THROWS_AS(transmittance(RaySamples{}), EmptyRay);
    RaySamples bad;
    bad.entries.push_back({0.5, 0.1, 1.0, {1, 1, 1}});
    bad.entries.push_back({0.4, 0.1, 1.0, {1, 1, 1}}); // t not increasing
    CHECK_THROWS_AS(transmittance(bad), EmptyRay);
    RaySamples neg;
    neg.entries.push_back({0.5, 0.1, -1.0, {1, 1, 1}});
    CHECK_THROWS_AS(transmittance(neg), EmptyRay);
}

TEST_CASE("homogeneous medium matches the closed-form integral") {
    const double sigma = 1.7, length = 2.0;
    const Vec3 color{0.2, 0.5, 0.8};
    RaySamples r = uniform_ray(1024, length, sigma, color);
    const Vec3 got = composite_ray(r);
    const double scale = 1.0 - std::exp(-sigma * length);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(got[k] - color[k] * scale) / (color[k] * scale) < 1e-3);
}

TEST_CASE("near-opaque first sample dominates the composite") {
    RaySamples r;
    r.entries.push_back({0.5, 1.0, 20.0, {1, 0, 0}});
    r.entries.push_back({1.5, 1.0, 3.0, {0, 1, 0}});
    const Vec3 got = composite_ray(r);
    CHECK(std::abs(got[0] - (1.0 - std::exp(-20.0))) < 1e-6);
    CHECK(got[1] < std::exp(-20.0) + 1e-6);
}

TEST_CASE("accumulated alpha never exceeds 1") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        RaySamples r;
        double t = 0;
        for (int i = 0; i < 20; ++i) {
            const double dt = 0.05 + uni(rng) * 0.1;
            r.entries.push_back({t + dt * 0.5, dt, uni(rng) * 10.0, {1, 1, 1}});
            t += dt;
        }
        auto tr = transmittance(r);
        double alpha = 0;
        for (std::size_t i = 0; i < r.entries.size(); ++i)
            alpha += tr[i] * (1.0 - std::exp(-r.entries[i].sigma * r.entries[i].delta));
        CHECK(alpha <= 1.0 + 1e-12);
        const Vec3 c = composite_ray(r);
        for (int k = 0; k < 3; ++k) CHECK(c[k] <= 1.0 + 1e-12);
    }
}

TEST_CASE("empty field renders black") {
    Camera cam;
    cam.width = cam.height = 32;
    ImageF img = render_field(slab_field(0.0, {1, 0, 0}), cam, 64);
    for (float v : img.data()) CHECK(v == 0.0f);
}

TEST_CASE("opaque slab renders its color") {
    Camera cam;
    cam.width = cam.height = 32;
    // sigma * path length >= 20 through the slab
    ImageF img = render_field(slab_field(25.0, {1, 0, 0}), cam, 256);
    const int c = 16;
    CHECK(img.at(c, c, 0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(img.at(c, c, 1) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("doubling samples converges on the homogeneous slab") {
    Camera cam;
    cam.width = cam.height = 8;
    VoxelField f = slab_field(1.3, {0.4, 0.7, 0.2});
    ImageF a = render_field(f, cam, 512);
    ImageF b = render_field(f, cam, 1024);
    float md = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        md = std::max(md, std::abs(a.data()[i] - b.data()[i]));
    CHECK(md < 1e-4f);
}

TEST_CASE("invalid cameras are rejected") {
    VoxelField f = slab_field(1.0, {1, 1, 1});
    Camera bad;
    bad.width = 0;
    CHECK_THROWS_AS(render_field(f, bad, 16), InvalidCamera);
    Camera fov;
    fov.fov_deg = 0;
    CHECK_THROWS_AS(render_field(f, fov, 16), InvalidCamera);
    Camera ok;
    CHECK_THROWS_AS(render_field(f, ok, 0), InvalidCamera);
}
