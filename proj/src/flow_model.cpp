// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#include "qfm/flow_model.hpp"

#include "qfm/errors.hpp"

namespace qfm {

OracleField::OracleField(const Image& x0, const Image& x1, double sigma_hat,
                         double sigma_max) {
    if (sigma_hat <= 0.0)
        throw ParameterError("oracle_field: sigma_hat must be positive");
    if (sigma_max <= 0.0)
        throw ParameterError("oracle_field: sigma_max must be positive");
    if (!x0.same_shape(x1)) throw ShapeError("oracle_field: x0 and x1 differ in shape");
    value_ = x0;
    const double scale = sigma_max / sigma_hat;
    for (std::size_t i = 0; i < value_.size(); ++i)
        value_.data[i] = scale * (x1.data[i] - x0.data[i]);
}

Image OracleField::eval(const Image& state, double /*t*/, double /*sigma_hat*/) const {
    if (!state.same_shape(value_))
        throw ShapeError("oracle field evaluated on mismatched state shape");
    return value_;
}

OracleField oracle_field(const Image& x0, const Image& x1, double sigma_hat,
                         double sigma_max) {
    return OracleField(x0, x1, sigma_hat, sigma_max);
}

PathSample make_path_sample(const Image& x0, double sigma_hat, double sigma_max,
                            double t, Rng& rng) {
    if (!(sigma_hat > 0.0))
        throw ParameterError("make_path_sample: sigma_hat must be positive");
    if (sigma_hat > sigma_max)
        throw ParameterError("make_path_sample: sigma_hat must not exceed sigma_max");
    if (!(t >= 0.0 && t <= 1.0))
        throw ParameterError("make_path_sample: t must lie in [0,1]");
    validate(x0);

    PathSample s;
    s.t = t;
    s.sigma_hat = sigma_hat;
    s.x_t = Image(x0.height, x0.width);
    s.target = Image(x0.height, x0.width);
    for (std::size_t i = 0; i < x0.size(); ++i) {
        const double eps = rng.normal();
        const double x1 = x0.data[i] + sigma_hat * eps;
        s.x_t.data[i] = (1.0 - t) * x0.data[i] + t * x1;
        s.target.data[i] = (sigma_max / sigma_hat) * (x1 - x0.data[i]);
    }
    return s;
}

PathSample make_path_sample(const Image& x0, double sigma_hat, double sigma_max,
                            double t, std::uint64_t seed) {
    Rng rng(seed);
    return make_path_sample(x0, sigma_hat, sigma_max, t, rng);
}

double qfm_loss(const VectorField& field, std::span<const PathSample> batch) {
    if (batch.empty()) throw ParameterError("qfm_loss: empty batch");
    double total = 0.0;
    for (const PathSample& s : batch) {
        const Image v = field.eval(s.x_t, s.t, s.sigma_hat);
        if (!v.same_shape(s.target))
            throw ShapeError("qfm_loss: field output shape differs from target");
        double sq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double r = v.data[i] - s.target.data[i];
            sq += r * r;
        }
        total += sq / static_cast<double>(v.size());
    }
    return total / static_cast<double>(batch.size());
}

} // namespace qfm
