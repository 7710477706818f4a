// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace qfm {

/// 2-D grayscale intensity array, row-major doubles. Nominal range is [0,1]
/// but values outside it are allowed (noisy data is not clipped).
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }

    static Image constant(int h, int w, double v) { return Image(h, w, v); }
};

/// Throws ParameterError if dimensions and buffer disagree or any value is
/// non-finite.
void validate(const Image& img);

/// Returns img + sigma * eps with eps i.i.d. standard normal per pixel.
/// Output is not clipped. sigma = 0 returns a bit-exact copy.
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

/// PSNR and SSIM of a comparison; psnr is +infinity when the images are
/// identical (zero MSE).
struct Metrics {
    double psnr = 0.0;
    double ssim = 0.0;
};

/// 10 * log10(peak^2 / MSE); +infinity sentinel when MSE = 0.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean local SSIM, 11x11 Gaussian window (std 1.5), K1=0.01, K2=0.03,
/// dynamic range 1.0. Requires both images at least 11x11.
double ssim(const Image& a, const Image& b);

/// Clamps every pixel into [lo, hi].
Image clip(const Image& img, double lo = 0.0, double hi = 1.0);

} // namespace qfm
