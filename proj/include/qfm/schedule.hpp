// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <nlohmann/json.hpp>

namespace qfm {

/// Shared uniform time grid t_i = i/(S-1), i = 0..S-1, so t_0 = 0 and
/// t_{S-1} = 1 exactly.
struct TimeGrid {
    std::vector<double> points;

    int size() const { return static_cast<int>(points.size()); }
    double operator[](int i) const { return points[static_cast<std::size_t>(i)]; }
};

/// Decreasing sequence of grid points from t_start down to 0: a coarse head
/// sampled at interval M followed by a fine tail at unit grid spacing.
/// indices[k] is the grid index of times[k]; step k moves times[k] -> times[k+1].
struct Schedule {
    std::vector<int> indices;
    std::vector<double> times;
    int coarse_count = 0; // leading entries emitted by the coarse descent
    int i0 = 0;
    int grid_size = 0;
    int coarse_interval = 0;

    int step_count() const { return static_cast<int>(times.size()) - 1; }
    double t_start() const { return times.front(); }
    double dt(int k) const { return times[k] - times[k + 1]; }
};

/// Uniform grid of S >= 2 points on [0, 1].
TimeGrid build_grid(int s);

/// Maps a noise ratio in [0,1] to the start index: round(ratio*(S-1)),
/// clamped to at least 1 for any strictly positive ratio; 0 only for ratio 0.
int start_index(double ratio, const TimeGrid& grid);

/// Coarse descent from i0 by M while the next index stays >= M, then every
/// grid index below the last coarse point down to 0. i0 = 0 gives the single
/// point {0} with zero steps.
Schedule build_schedule(int i0, int coarse_interval, const TimeGrid& grid);

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, const TimeGrid& grid);

} // namespace qfm
