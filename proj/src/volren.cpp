#include "neugen/volren.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace neugen {

namespace {

void validate(const RaySamples& s) {
    if (s.entries.empty()) throw EmptyRay("ray has no samples");
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const RaySample& e : s.entries) {
        if (e.t <= prev_t) throw EmptyRay("sample distances must be strictly increasing");
        if (e.delta <= 0) throw EmptyRay("sample step must be positive");
        if (e.sigma < 0) throw EmptyRay("density must be nonnegative");
        prev_t = e.t;
    }
}

struct Lerp {
    int i0, i1;
    double f;
};

Lerp axis_lerp(double p, double lo, double hi, int n) {
    // cell-centered grid: sample k sits at lo + (k+0.5)*(hi-lo)/n
    const double cell = (hi - lo) / n;
    const double g = (p - lo) / cell - 0.5;
    const double gc = std::clamp(g, 0.0, static_cast<double>(n - 1));
    const int i0 = std::min(static_cast<int>(std::floor(gc)), n - 1);
    const int i1 = std::min(i0 + 1, n - 1);
    return {i0, i1, gc - i0};
}

} // namespace

double VoxelField::sigma_at(const Vec3& p) const {
    const Lerp lx = axis_lerp(p[0], bounds_min[0], bounds_max[0], nx);
    const Lerp ly = axis_lerp(p[1], bounds_min[1], bounds_max[1], ny);
    const Lerp lz = axis_lerp(p[2], bounds_min[2], bounds_max[2], nz);
    double acc = 0.0;
    for (int dz = 0; dz <= 1; ++dz)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                const double w = (dx ? lx.f : 1 - lx.f) * (dy ? ly.f : 1 - ly.f) * (dz ? lz.f : 1 - lz.f);
                acc += w * sigma_grid[index(dx ? lx.i1 : lx.i0, dy ? ly.i1 : ly.i0, dz ? lz.i1 : lz.i0)];
            }
    return acc;
}

Vec3 VoxelField::color_at(const Vec3& p) const {
    const Lerp lx = axis_lerp(p[0], bounds_min[0], bounds_max[0], nx);
    const Lerp ly = axis_lerp(p[1], bounds_min[1], bounds_max[1], ny);
    const Lerp lz = axis_lerp(p[2], bounds_min[2], bounds_max[2], nz);
    Vec3 acc{0, 0, 0};
    for (int dz = 0; dz <= 1; ++dz)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                const double w = (dx ? lx.f : 1 - lx.f) * (dy ? ly.f : 1 - ly.f) * (dz ? lz.f : 1 - lz.f);
                const Vec3& c = color_grid[index(dx ? lx.i1 : lx.i0, dy ? ly.i1 : ly.i0, dz ? lz.i1 : lz.i0)];
                for (int k = 0; k < 3; ++k) acc[k] += w * c[k];
            }
    return acc;
}

std::vector<double> transmittance(const RaySamples& samples) {
    validate(samples);
    std::vector<double> t(samples.entries.size());
    double tau = 0.0;
    for (std::size_t i = 0; i < samples.entries.size(); ++i) {
        t[i] = std::exp(-tau);
        tau += samples.entries[i].sigma * samples.entries[i].delta;
    }
    return t;
}

Vec3 composite_ray(const RaySamples& samples) {
    const std::vector<double> t = transmittance(samples);
    Vec3 out{0, 0, 0};
    for (std::size_t i = 0; i < samples.entries.size(); ++i) {
        const RaySample& e = samples.entries[i];
        const double alpha = 1.0 - std::exp(-e.sigma * e.delta);
        for (int k = 0; k < 3; ++k) out[k] += t[i] * alpha * e.color[k];
    }
    return out;
}

namespace {

Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Slab intersection; returns false on miss.
bool intersect_box(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi,
                   double& t0, double& t1) {
    t0 = 0.0;
    t1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        if (std::abs(d[k]) < 1e-15) {
            if (o[k] < lo[k] || o[k] > hi[k]) return false;
            continue;
        }
        double a = (lo[k] - o[k]) / d[k];
        double b = (hi[k] - o[k]) / d[k];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    return t0 < t1;
}

} // namespace

ImageF render_field(const VoxelField& field, const Camera& camera, int n_samples,
                    std::uint64_t jitter_seed, bool jitter) {
    if (camera.width < 1 || camera.height < 1 || camera.fov_deg <= 0 || camera.fov_deg >= 180)
        throw InvalidCamera("render_field: bad camera intrinsics");
    if (n_samples < 1) throw InvalidCamera("render_field: n_samples must be >= 1");
    if (field.nx < 1 || field.ny < 1 || field.nz < 1 ||
        field.sigma_grid.size() != static_cast<std::size_t>(field.nx) * field.ny * field.nz ||
        field.color_grid.size() != field.sigma_grid.size())
        throw InvalidCamera("render_field: malformed voxel field");

    const Vec3 fwd = normalize(camera.forward);
    const Vec3 right = normalize(cross(fwd, camera.up));
    const Vec3 up = cross(right, fwd);
    const double tan_half = std::tan(camera.fov_deg * 0.5 * 3.14159265358979323846 / 180.0);
    const double aspect = static_cast<double>(camera.height) / camera.width;

    ImageF out(camera.width, camera.height, 3);
    for (int py = 0; py < camera.height; ++py) {
        for (int px = 0; px < camera.width; ++px) {
            const double u = ((px + 0.5) / camera.width * 2.0 - 1.0) * tan_half;
            const double v = (1.0 - (py + 0.5) / camera.height * 2.0) * tan_half * aspect;
            Vec3 dir{};
            for (int k = 0; k < 3; ++k) dir[k] = fwd[k] + u * right[k] + v * up[k];
            dir = normalize(dir);

            double t0, t1;
            if (!intersect_box(camera.origin, dir, field.bounds_min, field.bounds_max, t0, t1))
                continue; // background stays black

            // per-pixel stream keeps results independent of pixel order
            std::mt19937_64 rng(jitter_seed ^ (static_cast<std::uint64_t>(py) << 32 | static_cast<std::uint32_t>(px)));
            std::uniform_real_distribution<double> uni(0.0, 1.0);

            const double step = (t1 - t0) / n_samples;
            RaySamples ray;
            ray.entries.reserve(n_samples);
            for (int i = 0; i < n_samples; ++i) {
                const double frac = jitter ? uni(rng) : 0.5;
                const double t = t0 + (i + frac) * step;
                Vec3 pos{};
                for (int k = 0; k < 3; ++k) pos[k] = camera.origin[k] + t * dir[k];
                ray.entries.push_back({t, step, std::max(field.sigma_at(pos), 0.0), field.color_at(pos)});
            }
            const Vec3 c = composite_ray(ray);
            for (int k = 0; k < 3; ++k)
                out.at(px, py, k) = static_cast<float>(std::clamp(c[k], 0.0, 1.0));
        }
    }
    return out;
}

} // namespace neugen
