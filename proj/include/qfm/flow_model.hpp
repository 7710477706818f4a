// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "qfm/image.hpp"
#include "qfm/rng.hpp"

namespace qfm {

/// One point on a normalized interpolation path together with its regression
/// target. For a pair (x0, x1 = x0 + sigma_hat*eps) the state is
/// x_t = (1-t)*x0 + t*x1 and the target is (sigma_max/sigma_hat)*(x1 - x0),
/// which is constant in t.
struct PathSample {
    Image x_t;
    double t = 0.0;
    double sigma_hat = 0.0;
    Image target;
};

/// Time- and noise-conditioned vector field v(x, t, sigma_hat).
class VectorField {
public:
    virtual ~VectorField() = default;
    /// Output has the shape of `state`; throws ShapeError on mismatch with
    /// the field's expected resolution.
    virtual Image eval(const Image& state, double t, double sigma_hat) const = 0;
};

/// Closed-form constant field (sigma_max/sigma_hat)*(x1 - x0). Euler
/// integration along it is exact, which makes it the solver ground truth.
class OracleField final : public VectorField {
public:
    OracleField(const Image& x0, const Image& x1, double sigma_hat, double sigma_max);
    Image eval(const Image& state, double t, double sigma_hat) const override;

private:
    Image value_;
};

OracleField oracle_field(const Image& x0, const Image& x1, double sigma_hat,
                         double sigma_max);

PathSample make_path_sample(const Image& x0, double sigma_hat, double sigma_max,
                            double t, std::uint64_t seed);
PathSample make_path_sample(const Image& x0, double sigma_hat, double sigma_max,
                            double t, Rng& rng);

/// Mean over the batch of the per-sample mean-squared residual between the
/// field output at (x_t, t, sigma_hat) and the sample target.
double qfm_loss(const VectorField& field, std::span<const PathSample> batch);

} // namespace qfm
