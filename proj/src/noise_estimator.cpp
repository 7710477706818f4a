// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#include "qfm/noise_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <utility>

#include <nlohmann/json.hpp>

#include "qfm/errors.hpp"
#include "qfm/rng.hpp"

namespace qfm {

std::vector<BlockStats> partition_blocks(const Image& img) {
    validate(img);
    if (img.height < 2 || img.width < 2)
        throw ParameterError("partition_blocks: image must be at least 2x2");

    const int bh = img.height / 2;
    const int bw = img.width / 2;
    std::vector<BlockStats> blocks;
    blocks.reserve(static_cast<std::size_t>(bh) * bw);

    for (int br = 0; br < bh; ++br) {
        const int r = 2 * br;
        for (int bc = 0; bc < bw; ++bc) {
            const int c = 2 * bc;
            double v0 = img.at(r, c), v1 = img.at(r, c + 1);
            double v2 = img.at(r + 1, c), v3 = img.at(r + 1, c + 1);
            // 5-comparator sorting network for 4 values
            if (v0 > v1) std::swap(v0, v1);
            if (v2 > v3) std::swap(v2, v3);
            if (v0 > v2) std::swap(v0, v2);
            if (v1 > v3) std::swap(v1, v3);
            if (v1 > v2) std::swap(v1, v2);
            blocks.push_back({v3 - v0, v2 - v1});
        }
    }
    return blocks;
}

CalibrationConstants calibrate_constants(std::uint64_t samples, std::uint64_t seed) {
    if (samples < 100000)
        throw ParameterError("calibrate_constants: need at least 1e5 samples");
    Rng rng(seed);
    double sum_range = 0.0;
    double sum_mid = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double z0 = rng.normal(), z1 = rng.normal();
        double z2 = rng.normal(), z3 = rng.normal();
        if (z0 > z1) std::swap(z0, z1);
        if (z2 > z3) std::swap(z2, z3);
        if (z0 > z2) std::swap(z0, z2);
        if (z1 > z3) std::swap(z1, z3);
        if (z1 > z2) std::swap(z1, z2);
        sum_range += z3 - z0;
        sum_mid += z2 - z1;
    }
    const double n = static_cast<double>(samples);
    return {sum_range / n, sum_mid / n, samples, seed};
}

const CalibrationConstants& default_constants() {
    // calibrate_constants(10'000'000, 20259); reference values from
    // order-statistic quadrature: c1 = 2.058751, c2 = 0.594023.
    static const CalibrationConstants c{2.0587539040127937, 0.5940269941401665,
                                        10000000, 20259};
    return c;
}

NoiseEstimate estimate_sigma(const Image& img, const CalibrationConstants& constants,
                             std::uint64_t partition_seed, bool keep_per_block) {
    if (constants.c1 <= 0.0 || constants.c2 <= 0.0 || constants.c1 <= constants.c2)
        throw ParameterError("estimate_sigma: constants must satisfy c1 > c2 > 0");

    const std::vector<BlockStats> blocks = partition_blocks(img);
    const std::size_t k = blocks.size();
    const std::size_t n1 = static_cast<std::size_t>(std::lround(static_cast<double>(k) / 5.0));

    // Seeded random partition: the first n1 shuffled indices form I1.
    std::vector<std::uint32_t> order(k);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(partition_seed);
    rng.partial_shuffle(order, n1);
    std::vector<bool> in_range_set(k, false);
    for (std::size_t i = 0; i < n1; ++i) in_range_set[order[i]] = true;

    NoiseEstimate est;
    est.block_count = k;
    est.partition_seed = partition_seed;
    if (keep_per_block) est.per_block_estimates.reserve(k);

    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double s = in_range_set[i] ? blocks[i].d1 / constants.c1
                                         : blocks[i].d2 / constants.c2;
        sum += s;
        if (keep_per_block) est.per_block_estimates.push_back(s);
    }
    est.sigma_hat = sum / static_cast<double>(k);

    std::size_t at_bounds = 0;
    for (double v : img.data) at_bounds += (v == 0.0 || v == 1.0);
    est.clip_suspected = at_bounds > img.size() / 100;
    return est;
}

NoiseRatio noise_to_ratio(const NoiseEstimate& estimate, double sigma_max) {
    if (sigma_max <= 0.0) throw ParameterError("noise_to_ratio: sigma_max must be positive");
    const double raw = estimate.sigma_hat / sigma_max;
    if (raw > 1.0) return {1.0, true};
    return {raw, false};
}

void save_constants(const CalibrationConstants& c, const std::filesystem::path& path) {
    nlohmann::json j{{"c1", c.c1}, {"c2", c.c2}, {"samples", c.samples}, {"seed", c.seed}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

CalibrationConstants load_constants(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("invalid constants file " + path.string() + ": " + e.what());
    }
    CalibrationConstants c;
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.samples = j.value("samples", std::uint64_t{0});
    c.seed = j.value("seed", std::uint64_t{0});
    if (!(c.c1 > c.c2 && c.c2 > 0.0))
        throw IoError("constants file violates c1 > c2 > 0: " + path.string());
    return c;
}

} // namespace qfm
