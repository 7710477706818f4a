// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfm/flow_model.hpp"
#include "qfm/image.hpp"

namespace qfm {

/// Training hyperparameters. Defaults follow the reference configuration:
/// learning rate 1e-4, batch size 4, sigma_max 1, noise levels U[0.05, 1].
struct TrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 4;
    int epochs = 100;
    double sigma_max = 1.0;
    double noise_level_low = 0.05;
    double noise_level_high = 1.0;
    std::uint64_t seed = 0;

    void check() const;
};

/// Fully connected vector field on flattened fixed-resolution states.
/// Input is the d = h*w state plus the two conditioning scalars (t, sigma_hat);
/// hidden layers use tanh, the output layer is linear and d-dimensional.
class MlpField final : public VectorField {
public:
    MlpField(int height, int width, std::vector<int> hidden, double sigma_max,
             std::uint64_t seed);

    Image eval(const Image& state, double t, double sigma_hat) const override;

    int height() const { return height_; }
    int width() const { return width_; }
    double sigma_max() const { return sigma_max_; }
    const std::vector<int>& hidden() const { return hidden_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Flat parameter access (layer-major: W then b per layer). Used by the
    /// optimizer and the finite-difference gradient check.
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    /// Mean batch loss; when `grad` is non-null it receives d(loss)/d(params)
    /// accumulated in a fixed order (same flat layout as parameters()).
    double loss_and_gradient(std::span<const PathSample> batch,
                             std::vector<double>* grad) const;

    nlohmann::json to_json() const;
    static MlpField from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static MlpField load(const std::filesystem::path& path);

private:
    struct LayerShape {
        int rows = 0;
        int cols = 0;
        std::size_t w_off = 0;
        std::size_t b_off = 0;
    };

    MlpField() = default;
    void build_shapes();
    void forward(const std::vector<double>& input,
                 std::vector<std::vector<double>>& activations) const;

    int height_ = 0;
    int width_ = 0;
    std::vector<int> hidden_;
    double sigma_max_ = 1.0;
    std::uint64_t init_seed_ = 0;
    std::vector<LayerShape> shapes_;
    std::vector<double> params_;
};

/// Adam on the QFM objective. Every epoch revisits each image once (seeded
/// shuffle) with fresh (t, sigma_hat, eps) draws. Returns per-epoch mean loss.
/// Throws DivergenceError (with the epoch index) if the loss turns non-finite.
std::vector<double> train(MlpField& field, const std::vector<Image>& dataset,
                          const TrainConfig& cfg);

/// Max relative error between analytic and central finite-difference
/// gradients over `probe_count` randomly chosen parameters (>= 100).
double gradient_check(const MlpField& field, const PathSample& sample, double epsilon,
                      int probe_count = 120, std::uint64_t seed = 0);

void write_loss_history_csv(std::span<const double> history,
                            const std::filesystem::path& path);

} // namespace qfm
