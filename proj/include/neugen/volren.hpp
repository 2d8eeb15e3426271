#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "neugen/image.hpp"

namespace neugen {

using Vec3 = std::array<double, 3>;

struct RaySample {
    double t;      // distance along the ray, strictly increasing
    double delta;  // step length, > 0
    double sigma;  // density, >= 0
    Vec3 color;    // components in [0,1]
};

struct RaySamples {
    std::vector<RaySample> entries;
};

struct VoxelField {
    int nx = 0, ny = 0, nz = 0;
    Vec3 bounds_min{};
    Vec3 bounds_max{};
    std::vector<double> sigma_grid;  // nx*ny*nz
    std::vector<Vec3> color_grid;    // nx*ny*nz

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny + y) * nx + x;
    }
    double sigma_at(const Vec3& p) const;  // trilinear
    Vec3 color_at(const Vec3& p) const;
};

struct Camera {
    Vec3 origin{};
    Vec3 forward{0, 0, 1};
    Vec3 up{0, 1, 0};
    double fov_deg = 60.0; // horizontal
    int width = 64;
    int height = 64;
};

// T_0 = 1, T_i = exp(-sum_{j<i} sigma_j * delta_j); nonincreasing, in (0,1].
std::vector<double> transmittance(const RaySamples& samples);

// C = sum_i T_i * (1 - exp(-sigma_i * delta_i)) * c_i
Vec3 composite_ray(const RaySamples& samples);

// Casts one ray per pixel, samples uniformly between box entry and exit
// (midpoint rule; optional stratified jitter behind a seed), trilinear field
// lookup, alpha compositing. Rays missing the box render black.
ImageF render_field(const VoxelField& field, const Camera& camera, int n_samples,
                    std::uint64_t jitter_seed = 0, bool jitter = false);

} // namespace neugen
