#include "neugen/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neugen {

namespace {

constexpr double kPi = 3.14159265358979323846;

ImageF gaussian_blur(const ImageF& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(2 * r + 1);
    double total = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        total += k[i + r];
    }
    for (double& v : k) v /= total;

    const int w = src.width(), h = src.height();
    ImageF tmp(w, h, 1), dst(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += k[i + r] * src.at(xx, y);
            }
            tmp.at(x, y) = static_cast<float>(acc);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += k[i + r] * tmp.at(x, yy);
            }
            dst.at(x, y) = static_cast<float>(acc);
        }
    }
    return dst;
}

ImageF downsample2(const ImageF& src) {
    const int w = std::max(1, src.width() / 2), h = std::max(1, src.height() / 2);
    ImageF dst(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            dst.at(x, y) = src.at(x * 2, y * 2);
    return dst;
}

struct Pyramid {
    // gauss[o][l], l in [0, nspo+3); dog[o][l] = gauss[o][l+1] - gauss[o][l]
    std::vector<std::vector<ImageF>> gauss;
    std::vector<std::vector<ImageF>> dog;
    int nspo = 3;
};

Pyramid build_pyramid(const ImageF& gray, const DetectorParams& p) {
    Pyramid pyr;
    pyr.nspo = p.scales_per_octave;
    const int levels = p.scales_per_octave + 3;
    const double init_sigma = 0.5; // assumed blur of the raw input

    std::vector<double> sig(levels);
    sig[0] = p.base_sigma;
    for (int l = 1; l < levels; ++l) {
        const double prev = p.base_sigma * std::pow(2.0, static_cast<double>(l - 1) / p.scales_per_octave);
        const double cur = p.base_sigma * std::pow(2.0, static_cast<double>(l) / p.scales_per_octave);
        sig[l] = std::sqrt(cur * cur - prev * prev); // incremental blur
    }

    ImageF base = gaussian_blur(gray, std::sqrt(std::max(p.base_sigma * p.base_sigma - init_sigma * init_sigma, 0.01)));
    for (int o = 0; o < p.octaves; ++o) {
        std::vector<ImageF> g;
        g.reserve(levels);
        g.push_back(base);
        for (int l = 1; l < levels; ++l) g.push_back(gaussian_blur(g.back(), sig[l]));

        std::vector<ImageF> d;
        d.reserve(levels - 1);
        for (int l = 0; l + 1 < levels; ++l) {
            ImageF diff(g[l].width(), g[l].height(), 1);
            for (std::size_t i = 0; i < diff.size(); ++i)
                diff.data()[i] = g[l + 1].data()[i] - g[l].data()[i];
            d.push_back(std::move(diff));
        }
        if (o + 1 < p.octaves) base = downsample2(g[p.scales_per_octave]);
        pyr.gauss.push_back(std::move(g));
        pyr.dog.push_back(std::move(d));
    }
    return pyr;
}

bool is_extremum(const std::vector<ImageF>& dog, int l, int x, int y) {
    const float v = dog[l].at(x, y);
    if (v > 0) {
        for (int dl = -1; dl <= 1; ++dl)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dl == 0 && dy == 0 && dx == 0) continue;
                    if (dog[l + dl].at(x + dx, y + dy) >= v) return false;
                }
    } else {
        for (int dl = -1; dl <= 1; ++dl)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dl == 0 && dy == 0 && dx == 0) continue;
                    if (dog[l + dl].at(x + dx, y + dy) <= v) return false;
                }
    }
    return true;
}

// Quadratic refinement of an extremum; returns false on divergence.
bool refine(const std::vector<ImageF>& dog, int& l, int& x, int& y,
            double& ox, double& oy, double& ol, double& contrast, const DetectorParams& p) {
    const int w = dog[0].width(), h = dog[0].height();
    for (int iter = 0; iter < 5; ++iter) {
        const ImageF& d0 = dog[l - 1];
        const ImageF& d1 = dog[l];
        const ImageF& d2 = dog[l + 1];
        const double gx = 0.5 * (d1.at(x + 1, y) - d1.at(x - 1, y));
        const double gy = 0.5 * (d1.at(x, y + 1) - d1.at(x, y - 1));
        const double gl = 0.5 * (d2.at(x, y) - d0.at(x, y));
        const double v = d1.at(x, y);
        const double hxx = d1.at(x + 1, y) + d1.at(x - 1, y) - 2 * v;
        const double hyy = d1.at(x, y + 1) + d1.at(x, y - 1) - 2 * v;
        const double hll = d2.at(x, y) + d0.at(x, y) - 2 * v;
        const double hxy = 0.25 * (d1.at(x + 1, y + 1) - d1.at(x - 1, y + 1) - d1.at(x + 1, y - 1) + d1.at(x - 1, y - 1));
        const double hxl = 0.25 * (d2.at(x + 1, y) - d2.at(x - 1, y) - d0.at(x + 1, y) + d0.at(x - 1, y));
        const double hyl = 0.25 * (d2.at(x, y + 1) - d2.at(x, y - 1) - d0.at(x, y + 1) + d0.at(x, y - 1));

        // solve H * off = -g (Cramer)
        const double det = hxx * (hyy * hll - hyl * hyl) - hxy * (hxy * hll - hyl * hxl) + hxl * (hxy * hyl - hyy * hxl);
        if (std::abs(det) < 1e-12) return false;
        const double bx = -gx, by = -gy, bl = -gl;
        ox = (bx * (hyy * hll - hyl * hyl) - hxy * (by * hll - hyl * bl) + hxl * (by * hyl - hyy * bl)) / det;
        oy = (hxx * (by * hll - hyl * bl) - bx * (hxy * hll - hyl * hxl) + hxl * (hxy * bl - by * hxl)) / det;
        ol = (hxx * (hyy * bl - by * hyl) - hxy * (hxy * bl - by * hxl) + bx * (hxy * hyl - hyy * hxl)) / det;

        if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(ol) < 0.5) {
            contrast = v + 0.5 * (gx * ox + gy * oy + gl * ol);
            // edge response on the 2x2 spatial Hessian
            const double tr = hxx + hyy;
            const double det2 = hxx * hyy - hxy * hxy;
            const double r = p.edge_threshold;
            if (det2 <= 0 || tr * tr * r >= (r + 1) * (r + 1) * det2) return false;
            return true;
        }
        x += static_cast<int>(std::lround(ox));
        y += static_cast<int>(std::lround(oy));
        l += static_cast<int>(std::lround(ol));
        if (l < 1 || l > static_cast<int>(dog.size()) - 2 || x < 1 || x >= w - 1 || y < 1 || y >= h - 1)
            return false;
    }
    return false;
}

// 36-bin gradient orientation histogram around (x,y) in octave coordinates.
std::vector<double> orientation_peaks(const ImageF& g, double x, double y, double sigma_oct) {
    constexpr int kBins = 36;
    double hist[kBins] = {};
    const int radius = static_cast<int>(std::lround(3.0 * 1.5 * sigma_oct));
    const double wsigma = 1.5 * sigma_oct;
    const int cx = static_cast<int>(std::lround(x));
    const int cy = static_cast<int>(std::lround(y));

    for (int dy = -radius; dy <= radius; ++dy) {
        const int py = cy + dy;
        if (py < 1 || py >= g.height() - 1) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
            const int px = cx + dx;
            if (px < 1 || px >= g.width() - 1) continue;
            const double ix = 0.5 * (g.at(px + 1, py) - g.at(px - 1, py));
            const double iy = 0.5 * (g.at(px, py + 1) - g.at(px, py - 1));
            const double mag = std::sqrt(ix * ix + iy * iy);
            const double ang = std::atan2(iy, ix); // [-pi, pi]
            const double wgt = std::exp(-(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) /
                                        (2.0 * wsigma * wsigma));
            int bin = static_cast<int>(std::floor((ang + kPi) / (2.0 * kPi) * kBins));
            bin = ((bin % kBins) + kBins) % kBins;
            hist[bin] += wgt * mag;
        }
    }

    // circular smoothing
    for (int pass = 0; pass < 2; ++pass) {
        double prev = hist[kBins - 1];
        const double first = hist[0];
        for (int i = 0; i < kBins; ++i) {
            const double next = (i + 1 < kBins) ? hist[i + 1] : first;
            const double cur = hist[i];
            hist[i] = 0.25 * prev + 0.5 * cur + 0.25 * next;
            prev = cur;
        }
    }

    double peak = 0.0;
    for (double v : hist) peak = std::max(peak, v);
    std::vector<double> out;
    if (peak <= 0.0) return out;
    for (int i = 0; i < kBins; ++i) {
        const double l = hist[(i + kBins - 1) % kBins];
        const double c = hist[i];
        const double r = hist[(i + 1) % kBins];
        if (c >= 0.8 * peak && c > l && c > r) {
            const double off = 0.5 * (l - r) / (l - 2 * c + r); // parabolic peak
            const double ang = (static_cast<double>(i) + 0.5 + off) / kBins * 2.0 * kPi - kPi;
            out.push_back(ang);
        }
    }
    return out;
}

} // namespace

std::vector<Keypoint> detect_keypoints(const ImageF& gray, const DetectorParams& p) {
    if (gray.channels() != 1) throw InvalidChannelCount("detect_keypoints: grayscale input required");
    if (gray.width() < 16 || gray.height() < 16)
        throw ImageTooSmall("detect_keypoints: image must be at least 16x16");

    const Pyramid pyr = build_pyramid(gray, p);
    std::vector<Keypoint> out;

    for (int o = 0; o < p.octaves; ++o) {
        const auto& dog = pyr.dog[o];
        const int w = dog[0].width(), h = dog[0].height();
        if (w < 8 || h < 8) break;
        for (int l = 1; l <= p.scales_per_octave; ++l) {
            for (int y = 1; y < h - 1; ++y) {
                for (int x = 1; x < w - 1; ++x) {
                    if (std::abs(dog[l].at(x, y)) < 0.5f * static_cast<float>(p.contrast_threshold)) continue;
                    if (!is_extremum(dog, l, x, y)) continue;
                    int rl = l, rx = x, ry = y;
                    double ox = 0, oy = 0, ol = 0, contrast = 0;
                    if (!refine(dog, rl, rx, ry, ox, oy, ol, contrast, p)) continue;
                    if (std::abs(contrast) < p.contrast_threshold) continue;

                    const double scale_factor = std::pow(2.0, o);
                    const double sigma_oct = p.base_sigma * std::pow(2.0, (rl + ol) / p.scales_per_octave);
                    const double kx = (rx + ox) * scale_factor;
                    const double ky = (ry + oy) * scale_factor;
                    if (kx < 0 || kx >= gray.width() || ky < 0 || ky >= gray.height()) continue;

                    for (double ang : orientation_peaks(pyr.gauss[o][rl], rx + ox, ry + oy, sigma_oct)) {
                        Keypoint kp;
                        kp.x = kx;
                        kp.y = ky;
                        kp.scale = sigma_oct * scale_factor;
                        kp.orientation = ang;
                        kp.response = std::abs(contrast);
                        kp.octave = o;
                        kp.level = rl;
                        out.push_back(kp);
                    }
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.orientation < b.orientation;
    });
    return out;
}

std::vector<Descriptor> compute_descriptors(const ImageF& gray, const std::vector<Keypoint>& keypoints,
                                            const DetectorParams& p) {
    const Pyramid pyr = build_pyramid(gray, p);
    constexpr int kD = 4;     // spatial bins per axis
    constexpr int kB = 8;     // orientation bins
    std::vector<Descriptor> out;
    out.reserve(keypoints.size());

    for (const Keypoint& kp : keypoints) {
        const int o = std::clamp(kp.octave, 0, p.octaves - 1);
        const int l = std::clamp(kp.level, 0, p.scales_per_octave + 2);
        const ImageF& g = pyr.gauss[o][l];
        const double inv_sf = 1.0 / std::pow(2.0, o);
        const double px = kp.x * inv_sf;
        const double py = kp.y * inv_sf;
        const double sigma_oct = kp.scale * inv_sf;

        const double hist_width = 3.0 * sigma_oct;
        const int radius = std::min(static_cast<int>(std::lround(hist_width * std::sqrt(2.0) * (kD + 1) * 0.5)),
                                    std::max(g.width(), g.height()));
        const double cos_t = std::cos(kp.orientation);
        const double sin_t = std::sin(kp.orientation);

        double hist[kD][kD][kB] = {};
        const int icx = static_cast<int>(std::lround(px));
        const int icy = static_cast<int>(std::lround(py));
        for (int dy = -radius; dy <= radius; ++dy) {
            const int sy = icy + dy;
            if (sy < 1 || sy >= g.height() - 1) continue;
            for (int dx = -radius; dx <= radius; ++dx) {
                const int sx = icx + dx;
                if (sx < 1 || sx >= g.width() - 1) continue;
                const double rx = static_cast<double>(sx) - px;
                const double ry = static_cast<double>(sy) - py;
                // rotate into the keypoint frame
                const double u = (cos_t * rx + sin_t * ry) / hist_width;
                const double v = (-sin_t * rx + cos_t * ry) / hist_width;
                const double ub = u + kD / 2.0 - 0.5;
                const double vb = v + kD / 2.0 - 0.5;
                if (ub <= -1.0 || ub >= kD || vb <= -1.0 || vb >= kD) continue;

                const double ix = 0.5 * (g.at(sx + 1, sy) - g.at(sx - 1, sy));
                const double iy = 0.5 * (g.at(sx, sy + 1) - g.at(sx, sy - 1));
                const double mag = std::sqrt(ix * ix + iy * iy);
                double ang = std::atan2(iy, ix) - kp.orientation;
                while (ang < 0) ang += 2.0 * kPi;
                while (ang >= 2.0 * kPi) ang -= 2.0 * kPi;
                const double ob = ang / (2.0 * kPi) * kB;
                const double wgt = mag * std::exp(-(u * u + v * v) / (0.5 * kD * kD));

                // trilinear spread over (row, col, orientation)
                const int u0 = static_cast<int>(std::floor(ub));
                const int v0 = static_cast<int>(std::floor(vb));
                const int o0 = static_cast<int>(std::floor(ob));
                const double fu = ub - u0, fv = vb - v0, fo = ob - o0;
                for (int du = 0; du <= 1; ++du) {
                    const int ui = u0 + du;
                    if (ui < 0 || ui >= kD) continue;
                    const double wu = du ? fu : 1.0 - fu;
                    for (int dv = 0; dv <= 1; ++dv) {
                        const int vi = v0 + dv;
                        if (vi < 0 || vi >= kD) continue;
                        const double wv = dv ? fv : 1.0 - fv;
                        for (int dob = 0; dob <= 1; ++dob) {
                            const int oi = (o0 + dob) % kB;
                            const double wo = dob ? fo : 1.0 - fo;
                            hist[vi][ui][oi] += wgt * wu * wv * wo;
                        }
                    }
                }
            }
        }

        Descriptor d;
        int idx = 0;
        for (int r = 0; r < kD; ++r)
            for (int c = 0; c < kD; ++c)
                for (int b = 0; b < kB; ++b)
                    d.vector[idx++] = static_cast<float>(hist[r][c][b]);

        auto l2norm = [](const std::array<float, 128>& v) {
            double s = 0;
            for (float x : v) s += static_cast<double>(x) * x;
            return std::sqrt(s);
        };
        double norm = l2norm(d.vector);
        if (norm > 1e-12)
            for (float& x : d.vector) x = static_cast<float>(x / norm);
        for (float& x : d.vector) x = std::min(x, 0.2f);
        norm = l2norm(d.vector);
        if (norm > 1e-12)
            for (float& x : d.vector) x = static_cast<float>(x / norm);
        out.push_back(d);
    }
    return out;
}

MatchReport match_descriptors(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b,
                              double ratio) {
    if (ratio <= 0.0 || ratio >= 1.0) throw UsageError("match_descriptors: ratio must be in (0,1)");
    MatchReport rep;
    rep.count_a_keypoints = a.size();
    rep.count_b_keypoints = b.size();
    rep.ratio_threshold = ratio;
    if (a.empty() || b.empty()) return rep;

    struct Candidate {
        double dist;
        std::size_t ia, ib;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        std::size_t best = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            double s = 0;
            for (int k = 0; k < 128; ++k) {
                const double d = static_cast<double>(a[i].vector[k]) - b[j].vector[k];
                s += d * d;
            }
            if (s < d1) {
                d2 = d1;
                d1 = s;
                best = j;
            } else if (s < d2) {
                d2 = s;
            }
        }
        // distances are squared; the ratio test compares unsquared distances
        if (std::sqrt(d1) < ratio * std::sqrt(d2)) cands.push_back({d1, i, best});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.ia != y.ia) return x.ia < y.ia;
        return x.ib < y.ib;
    });
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    for (const Candidate& c : cands) {
        if (used_a[c.ia] || used_b[c.ib]) continue;
        used_a[c.ia] = used_b[c.ib] = true;
        ++rep.matches;
    }
    return rep;
}

} // namespace neugen
