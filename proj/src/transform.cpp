#include "neugen/transform.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace neugen {

namespace {

constexpr double kDegenerateEps = 1e-12;

void check_patch(const ImageF& img, int s) {
    if (s < 3 || s % 2 == 0)
        throw InvalidPatchSize("patch size must be odd and >= 3");
    if (s > 2 * img.width() - 1 || s > 2 * img.height() - 1)
        throw PatchTooLarge("patch size exceeds 2*dim-1");
}

// Reflect-101 index: mirror about the edge pixel without repeating it.
inline int reflect(int p, int n) {
    if (p < 0) return -p;
    if (p >= n) return 2 * n - 2 - p;
    return p;
}

} // namespace

StatsMap patch_stats(const ImageF& img, int patch_size, BorderPolicy) {
    check_patch(img, patch_size);
    const int w = img.width(), h = img.height(), ch = img.channels();
    const int r = patch_size / 2;
    const double inv_n = 1.0 / (static_cast<double>(patch_size) * patch_size * ch);

    StatsMap out{ImageF(w, h, 1), ImageF(w, h, 1), 0.0};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = reflect(y + dy, h);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = reflect(x + dx, w);
                    for (int c = 0; c < ch; ++c) sum += img.at(xx, yy, c);
                }
            }
            const double mu = sum * inv_n;
            double ss = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = reflect(y + dy, h);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = reflect(x + dx, w);
                    for (int c = 0; c < ch; ++c) {
                        const double d = img.at(xx, yy, c) - mu;
                        ss += d * d;
                    }
                }
            }
            const double sd = std::sqrt(ss * inv_n);
            out.mean.at(x, y) = static_cast<float>(mu);
            out.std.at(x, y) = static_cast<float>(sd);
            out.z = std::max(out.z, static_cast<double>(out.std.at(x, y)));
        }
    }
    return out;
}

StatsMap windowed_stats_fast(const ImageF& img, int patch_size, BorderPolicy) {
    check_patch(img, patch_size);
    const int w = img.width(), h = img.height(), ch = img.channels();
    const int r = patch_size / 2;
    const int pw = w + 2 * r, py_h = h + 2 * r;
    const double inv_n = 1.0 / (static_cast<double>(patch_size) * patch_size * ch);

    // Channel-summed x and x^2 over the reflect-padded image, then SATs.
    // Samples are shifted by the first pixel value so a constant image yields
    // exactly-zero sums (and thus std exactly 0) instead of cancellation dust.
    // sat has an extra leading row/column of zeros.
    const double shift = img.at(0, 0, 0);
    std::vector<double> sat1(static_cast<std::size_t>(pw + 1) * (py_h + 1), 0.0);
    std::vector<double> sat2(static_cast<std::size_t>(pw + 1) * (py_h + 1), 0.0);
    for (int y = 0; y < py_h; ++y) {
        const int sy = reflect(y - r, h);
        double row1 = 0.0, row2 = 0.0;
        for (int x = 0; x < pw; ++x) {
            const int sx = reflect(x - r, w);
            double v1 = 0.0, v2 = 0.0;
            for (int c = 0; c < ch; ++c) {
                const double s = static_cast<double>(img.at(sx, sy, c)) - shift;
                v1 += s;
                v2 += s * s;
            }
            row1 += v1;
            row2 += v2;
            const std::size_t i = static_cast<std::size_t>(y + 1) * (pw + 1) + (x + 1);
            const std::size_t up = static_cast<std::size_t>(y) * (pw + 1) + (x + 1);
            sat1[i] = sat1[up] + row1;
            sat2[i] = sat2[up] + row2;
        }
    }

    auto box = [&](const std::vector<double>& sat, int x0, int y0, int x1, int y1) {
        // inclusive window in padded coordinates
        const std::size_t stride = pw + 1;
        return sat[static_cast<std::size_t>(y1 + 1) * stride + (x1 + 1)] -
               sat[static_cast<std::size_t>(y0) * stride + (x1 + 1)] -
               sat[static_cast<std::size_t>(y1 + 1) * stride + x0] +
               sat[static_cast<std::size_t>(y0) * stride + x0];
    };

    StatsMap out{ImageF(w, h, 1), ImageF(w, h, 1), 0.0};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // window [x, x+2r] x [y, y+2r] in padded coords == centered at (x,y)
            const double s1 = box(sat1, x, y, x + 2 * r, y + 2 * r);
            const double s2 = box(sat2, x, y, x + 2 * r, y + 2 * r);
            const double mu = s1 * inv_n;
            const double var = std::max(s2 * inv_n - mu * mu, 0.0);
            out.mean.at(x, y) = static_cast<float>(mu + shift);
            out.std.at(x, y) = static_cast<float>(std::sqrt(var));
            out.z = std::max(out.z, static_cast<double>(out.std.at(x, y)));
        }
    }
    return out;
}

NeuGenMap neugen_map(const ImageF& img, const NeuGenConfig& cfg) {
    StatsMap stats = windowed_stats_fast(img, cfg.patch_size, cfg.border);
    NeuGenMap out{ImageF(img.width(), img.height(), 1), false};
    if (stats.z <= kDegenerateEps) {
        out.degenerate = true;
        return out;
    }
    for (std::size_t i = 0; i < stats.std.size(); ++i)
        out.map.data()[i] = static_cast<float>(static_cast<double>(stats.std.data()[i]) / stats.z);
    return out;
}

ImageF fuse(const ImageF& img, const ImageF& gmap, double weight) {
    if (gmap.channels() != 1 || !img.same_extent(gmap))
        throw DimensionMismatch("fuse: gmap must be 1-channel with matching extent");
    ImageF out(img.width(), img.height(), img.channels());
    const float w = static_cast<float>(weight);
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                out.at(x, y, c) = std::clamp(img.at(x, y, c) + w * gmap.at(x, y), 0.0f, 1.0f);
    return out;
}

ImageF neugen_enhance(const ImageF& img, const NeuGenConfig& cfg) {
    return fuse(img, neugen_map(img, cfg).map, cfg.fusion_weight);
}

} // namespace neugen
