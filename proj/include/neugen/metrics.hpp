#pragma once

#include <vector>

#include "neugen/image.hpp"

namespace neugen {

struct SsimParams {
    int window = 11;           // odd, >= 3
    double gaussian_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

struct PairScore {
    double ssim = 0.0;
    double psnr_db = 0.0; // +infinity when MSE == 0
};

// Mean local SSIM over all fully-interior window positions (valid convolution),
// Gaussian-weighted stats, computed on luma for RGB inputs.
double ssim(const ImageF& a, const ImageF& b, const SsimParams& p = {});

// 10*log10(1/MSE) with MAX=1; +infinity for identical images.
double psnr(const ImageF& a, const ImageF& b);

// Mean of ssim(images[0], images[k]) for k = 1..n-1.
double class_ssim(const std::vector<ImageF>& images, const SsimParams& p = {});

} // namespace neugen
