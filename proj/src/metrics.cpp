#include "neugen/metrics.hpp"

#include <cmath>
#include <limits>

namespace neugen {

namespace {

std::vector<double> gaussian_window(int n, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    const int r = n / 2;
    double total = 0.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double d2 = static_cast<double>((x - r) * (x - r) + (y - r) * (y - r));
            const double v = std::exp(-d2 / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>(y) * n + x] = v;
            total += v;
        }
    }
    for (double& v : w) v /= total;
    return w;
}

} // namespace

double ssim(const ImageF& a_in, const ImageF& b_in, const SsimParams& p) {
    if (!a_in.same_extent(b_in) || a_in.channels() != b_in.channels())
        throw DimensionMismatch("ssim: images must have identical dimensions");
    if (p.window < 3 || p.window % 2 == 0)
        throw UsageError("ssim: window must be odd and >= 3");

    const ImageF a = to_grayscale(a_in);
    const ImageF b = to_grayscale(b_in);
    const int w = a.width(), h = a.height(), n = p.window;
    if (w < n || h < n)
        throw DimensionMismatch("ssim: image smaller than the SSIM window");

    const std::vector<double> win = gaussian_window(n, p.gaussian_sigma);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y + n <= h; ++y) {
        for (int x = 0; x + n <= w; ++x) {
            double mu_a = 0, mu_b = 0, saa = 0, sbb = 0, sab = 0;
            for (int wy = 0; wy < n; ++wy) {
                for (int wx = 0; wx < n; ++wx) {
                    const double wt = win[static_cast<std::size_t>(wy) * n + wx];
                    const double va = a.at(x + wx, y + wy);
                    const double vb = b.at(x + wx, y + wy);
                    mu_a += wt * va;
                    mu_b += wt * vb;
                    saa += wt * va * va;
                    sbb += wt * vb * vb;
                    sab += wt * va * vb;
                }
            }
            const double var_a = saa - mu_a * mu_a;
            const double var_b = sbb - mu_b * mu_b;
            const double cov = sab - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double psnr(const ImageF& a, const ImageF& b) {
    if (!a.same_extent(b) || a.channels() != b.channels())
        throw DimensionMismatch("psnr: images must have identical dimensions");
    double se = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.data()[i]) - b.data()[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double class_ssim(const std::vector<ImageF>& images, const SsimParams& p) {
    if (images.size() < 2) throw TooFewImages("class_ssim: need at least 2 images");
    double total = 0.0;
    for (std::size_t k = 1; k < images.size(); ++k)
        total += ssim(images[0], images[k], p);
    return total / static_cast<double>(images.size() - 1);
}

} // namespace neugen
