// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qfm/image.hpp"

namespace qfm {

/// Order statistics of one 2x2 block: d1 = max - min (range), d2 = gap
/// between the two central values (middle range). 0 <= d2 <= d1.
struct BlockStats {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Expected range (c1) and expected middle range (c2) of 4 i.i.d. standard
/// normals. Dividing block statistics by them gives unbiased sigma estimates
/// on locally constant signal.
struct CalibrationConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Fused global noise-level estimate.
struct NoiseEstimate {
    double sigma_hat = 0.0;
    std::size_t block_count = 0;
    std::uint64_t partition_seed = 0;
    /// Set when a large fraction of pixels sits exactly on 0 or 1; clipped
    /// inputs truncate the noise distribution and bias sigma_hat downward.
    bool clip_suspected = false;
    /// Per-block S_k diagnostics; filled only on request.
    std::vector<double> per_block_estimates;
};

/// sigma_hat mapped to the normalized trajectory position sigma_hat/sigma_max.
struct NoiseRatio {
    double value = 0.0;
    bool clamped = false; // estimate exceeded sigma_max and was clamped to 1
};

/// Splits the image into non-overlapping 2x2 blocks (trailing odd row/column
/// dropped) and returns the sorted-block statistics, row-major block order.
/// Requires at least 2x2 pixels.
std::vector<BlockStats> partition_blocks(const Image& img);

/// Monte-Carlo estimate of the calibration constants over `samples` groups of
/// 4 standard normals. Deterministic for a fixed seed. samples >= 1e5.
CalibrationConstants calibrate_constants(std::uint64_t samples, std::uint64_t seed);

/// Frozen high-precision fixture: calibrate_constants(10^7, seed=20259).
const CalibrationConstants& default_constants();

/// Blind global noise estimate: blocks are partitioned by a seeded shuffle
/// into I1 (range-based, |I1| = round(K/5)) and I2 (middle-range-based), and
/// sigma_hat is the mean of the fused per-block estimates.
NoiseEstimate estimate_sigma(const Image& img, const CalibrationConstants& constants,
                             std::uint64_t partition_seed, bool keep_per_block = false);

/// min(sigma_hat / sigma_max, 1), with a clamp flag when the estimate
/// exceeds sigma_max.
NoiseRatio noise_to_ratio(const NoiseEstimate& estimate, double sigma_max);

void save_constants(const CalibrationConstants& c, const std::filesystem::path& path);
CalibrationConstants load_constants(const std::filesystem::path& path);

} // namespace qfm
