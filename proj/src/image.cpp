// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#include "qfm/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qfm/errors.hpp"
#include "qfm/rng.hpp"

namespace qfm {

void validate(const Image& img) {
    if (img.height <= 0 || img.width <= 0)
        throw ParameterError("image dimensions must be positive");
    if (img.data.size() != static_cast<std::size_t>(img.height) * img.width)
        throw ParameterError("image buffer size does not match height*width");
    for (double v : img.data)
        if (!std::isfinite(v)) throw ParameterError("image contains non-finite values");
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ParameterError("sigma must be non-negative");
    validate(img);
    if (sigma == 0.0) return img;
    Image out = img;
    Rng rng(seed);
    for (double& v : out.data) v += sigma * rng.normal();
    return out;
}

double psnr(const Image& a, const Image& b, double peak) {
    if (!a.same_shape(b)) throw ShapeError("psnr: image dimensions differ");
    if (peak <= 0.0) throw ParameterError("psnr: peak must be positive");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

namespace {

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;

std::array<double, kWin> gaussian_kernel() {
    std::array<double, kWin> g{};
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double x = i - (kWin - 1) / 2;
        g[i] = std::exp(-x * x / (2.0 * kWinSigma * kWinSigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

// Separable valid-region Gaussian filter: (H x W) -> (H-10 x W-10).
std::vector<double> blur_valid(const std::vector<double>& f, int h, int w,
                               const std::array<double, kWin>& g) {
    const int wv = w - kWin + 1;
    const int hv = h - kWin + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * wv);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < wv; ++c) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k) s += g[k] * f[static_cast<std::size_t>(r) * w + c + k];
            tmp[static_cast<std::size_t>(r) * wv + c] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(hv) * wv);
    for (int r = 0; r < hv; ++r)
        for (int c = 0; c < wv; ++c) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k) s += g[k] * tmp[static_cast<std::size_t>(r + k) * wv + c];
            out[static_cast<std::size_t>(r) * wv + c] = s;
        }
    return out;
}

} // namespace

double ssim(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeError("ssim: image dimensions differ");
    if (a.height < kWin || a.width < kWin)
        throw ParameterError("ssim: images must be at least 11x11");

    static const std::array<double, kWin> g = gaussian_kernel();
    const int h = a.height, w = a.width;
    const std::size_t n = a.data.size();

    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a.data[i] * a.data[i];
        bb[i] = b.data[i] * b.data[i];
        ab[i] = a.data[i] * b.data[i];
    }
    const auto mu_a = blur_valid(a.data, h, w, g);
    const auto mu_b = blur_valid(b.data, h, w, g);
    const auto m_aa = blur_valid(aa, h, w, g);
    const auto m_bb = blur_valid(bb, h, w, g);
    const auto m_ab = blur_valid(ab, h, w, g);

    constexpr double kC1 = 0.01 * 0.01; // (K1 * L)^2, L = 1
    constexpr double kC2 = 0.03 * 0.03;

    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double va = m_aa[i] - mu_a[i] * mu_a[i];
        const double vb = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
        const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (va + vb + kC2);
        sum += num / den;
    }
    return sum / static_cast<double>(mu_a.size());
}

Image clip(const Image& img, double lo, double hi) {
    Image out = img;
    for (double& v : out.data) v = std::clamp(v, lo, hi);
    return out;
}

} // namespace qfm
