// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#include "qfm/schedule.hpp"

#include <cmath>
#include <string>

#include "qfm/errors.hpp"

namespace qfm {

TimeGrid build_grid(int s) {
    if (s < 2) throw ParameterError("build_grid: need at least 2 grid points");
    TimeGrid grid;
    grid.points.resize(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i)
        grid.points[static_cast<std::size_t>(i)] = static_cast<double>(i) / (s - 1);
    return grid;
}

int start_index(double ratio, const TimeGrid& grid) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw ParameterError("start_index: ratio must lie in [0,1]");
    if (ratio == 0.0) return 0;
    const int s = grid.size();
    int i0 = static_cast<int>(std::lround(ratio * (s - 1)));
    if (i0 < 1) i0 = 1; // noisy input always gets at least one step
    if (i0 > s - 1) i0 = s - 1;
    return i0;
}

Schedule build_schedule(int i0, int coarse_interval, const TimeGrid& grid) {
    const int s = grid.size();
    if (i0 < 0 || i0 > s - 1)
        throw ParameterError("build_schedule: start index out of range [0, " +
                             std::to_string(s - 1) + "]");
    if (coarse_interval < 1)
        throw ParameterError("build_schedule: coarse interval must be >= 1");

    Schedule sched;
    sched.i0 = i0;
    sched.grid_size = s;
    sched.coarse_interval = coarse_interval;

    sched.indices.push_back(i0);
    while (sched.indices.back() - coarse_interval >= coarse_interval)
        sched.indices.push_back(sched.indices.back() - coarse_interval);
    sched.coarse_count = static_cast<int>(sched.indices.size());

    for (int i = sched.indices.back() - 1; i >= 0; --i) sched.indices.push_back(i);

    sched.times.reserve(sched.indices.size());
    for (int idx : sched.indices) sched.times.push_back(grid[idx]);
    return sched;
}

nlohmann::json schedule_to_json(const Schedule& s) {
    return nlohmann::json{{"S", s.grid_size},
                          {"M", s.coarse_interval},
                          {"i0", s.i0},
                          {"indices", s.indices}};
}

Schedule schedule_from_json(const nlohmann::json& j, const TimeGrid& grid) {
    const int s = j.at("S").get<int>();
    const int m = j.at("M").get<int>();
    const int i0 = j.at("i0").get<int>();
    if (s != grid.size())
        throw ParameterError("schedule_from_json: grid size mismatch");
    Schedule sched = build_schedule(i0, m, grid);
    if (j.contains("indices") && j.at("indices").get<std::vector<int>>() != sched.indices)
        throw ParameterError("schedule_from_json: stored indices do not match the rule");
    return sched;
}

} // namespace qfm
