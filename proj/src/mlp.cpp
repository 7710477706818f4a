// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#include "qfm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "qfm/errors.hpp"
#include "qfm/rng.hpp"

namespace qfm {

void TrainConfig::check() const {
    if (learning_rate < 0.0) throw ParameterError("train: learning rate must be >= 0");
    if (batch_size < 1) throw ParameterError("train: batch size must be positive");
    if (epochs < 1) throw ParameterError("train: epochs must be positive");
    if (sigma_max <= 0.0) throw ParameterError("train: sigma_max must be positive");
    if (!(noise_level_low > 0.0 && noise_level_low <= noise_level_high &&
          noise_level_high <= sigma_max))
        throw ParameterError("train: noise level range must satisfy 0 < low <= high <= sigma_max");
}

MlpField::MlpField(int height, int width, std::vector<int> hidden, double sigma_max,
                   std::uint64_t seed)
    : height_(height), width_(width), hidden_(std::move(hidden)),
      sigma_max_(sigma_max), init_seed_(seed) {
    if (height_ < 1 || width_ < 1)
        throw ParameterError("mlp: resolution must be positive");
    if (sigma_max_ <= 0.0) throw ParameterError("mlp: sigma_max must be positive");
    for (int h : hidden_)
        if (h < 1) throw ParameterError("mlp: hidden sizes must be positive");

    build_shapes();
    Rng rng(seed);
    for (const LayerShape& ls : shapes_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(ls.cols));
        for (int i = 0; i < ls.rows * ls.cols; ++i)
            params_[ls.w_off + static_cast<std::size_t>(i)] = bound * (2.0 * rng.uniform() - 1.0);
        for (int i = 0; i < ls.rows; ++i)
            params_[ls.b_off + static_cast<std::size_t>(i)] = bound * (2.0 * rng.uniform() - 1.0);
    }
}

void MlpField::build_shapes() {
    const int d = height_ * width_;
    std::vector<int> dims;
    dims.push_back(d + 2);
    for (int h : hidden_) dims.push_back(h);
    dims.push_back(d);

    std::size_t off = 0;
    shapes_.clear();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        LayerShape ls;
        ls.rows = dims[l + 1];
        ls.cols = dims[l];
        ls.w_off = off;
        off += static_cast<std::size_t>(ls.rows) * ls.cols;
        ls.b_off = off;
        off += static_cast<std::size_t>(ls.rows);
        shapes_.push_back(ls);
    }
    params_.assign(off, 0.0);
}

void MlpField::forward(const std::vector<double>& input,
                       std::vector<std::vector<double>>& activations) const {
    activations.resize(shapes_.size() + 1);
    activations[0] = input;
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
        const LayerShape& ls = shapes_[l];
        const std::vector<double>& a = activations[l];
        std::vector<double>& out = activations[l + 1];
        out.assign(static_cast<std::size_t>(ls.rows), 0.0);
        const bool is_hidden = l + 1 < shapes_.size();
        for (int r = 0; r < ls.rows; ++r) {
            const double* w = params_.data() + ls.w_off + static_cast<std::size_t>(r) * ls.cols;
            double z = params_[ls.b_off + static_cast<std::size_t>(r)];
            for (int c = 0; c < ls.cols; ++c) z += w[c] * a[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] = is_hidden ? std::tanh(z) : z;
        }
    }
}

Image MlpField::eval(const Image& state, double t, double sigma_hat) const {
    if (state.height != height_ || state.width != width_)
        throw ShapeError("mlp: state resolution " + std::to_string(state.height) + "x" +
                         std::to_string(state.width) + " does not match field " +
                         std::to_string(height_) + "x" + std::to_string(width_));
    std::vector<double> input = state.data;
    input.push_back(t);
    input.push_back(sigma_hat);

    std::vector<std::vector<double>> acts;
    forward(input, acts);

    Image out(height_, width_);
    out.data = acts.back();
    return out;
}

double MlpField::loss_and_gradient(std::span<const PathSample> batch,
                                   std::vector<double>* grad) const {
    if (batch.empty()) throw ParameterError("mlp loss: empty batch");
    const int d = height_ * width_;
    if (grad) grad->assign(params_.size(), 0.0);

    const double inv_scale = 1.0 / (static_cast<double>(d) * static_cast<double>(batch.size()));
    double total = 0.0;

    std::vector<std::vector<double>> acts;
    std::vector<double> delta, delta_prev;
    for (const PathSample& s : batch) {
        if (s.x_t.height != height_ || s.x_t.width != width_)
            throw ShapeError("mlp loss: sample resolution does not match field");

        std::vector<double> input = s.x_t.data;
        input.push_back(s.t);
        input.push_back(s.sigma_hat);
        forward(input, acts);

        const std::vector<double>& out = acts.back();
        double sq = 0.0;
        for (int i = 0; i < d; ++i) {
            const double r = out[static_cast<std::size_t>(i)] - s.target.data[static_cast<std::size_t>(i)];
            sq += r * r;
        }
        total += sq / static_cast<double>(d);
        if (!grad) continue;

        // Backprop. delta holds dLoss/dz of the current layer; hidden layers
        // apply tanh' = 1 - a^2 on the way down.
        delta.assign(static_cast<std::size_t>(d), 0.0);
        for (int i = 0; i < d; ++i)
            delta[static_cast<std::size_t>(i)] =
                2.0 * (out[static_cast<std::size_t>(i)] - s.target.data[static_cast<std::size_t>(i)]) * inv_scale;

        for (std::size_t l = shapes_.size(); l-- > 0;) {
            const LayerShape& ls = shapes_[l];
            const std::vector<double>& a = acts[l];
            double* gw = grad->data() + ls.w_off;
            double* gb = grad->data() + ls.b_off;
            for (int r = 0; r < ls.rows; ++r) {
                const double dr = delta[static_cast<std::size_t>(r)];
                gb[r] += dr;
                double* grow = gw + static_cast<std::size_t>(r) * ls.cols;
                for (int c = 0; c < ls.cols; ++c) grow[c] += dr * a[static_cast<std::size_t>(c)];
            }
            if (l == 0) break;
            delta_prev.assign(static_cast<std::size_t>(ls.cols), 0.0);
            for (int r = 0; r < ls.rows; ++r) {
                const double dr = delta[static_cast<std::size_t>(r)];
                const double* w = params_.data() + ls.w_off + static_cast<std::size_t>(r) * ls.cols;
                for (int c = 0; c < ls.cols; ++c) delta_prev[static_cast<std::size_t>(c)] += dr * w[c];
            }
            for (int c = 0; c < shapes_[l - 1].rows; ++c) {
                const double av = acts[l][static_cast<std::size_t>(c)];
                delta_prev[static_cast<std::size_t>(c)] *= 1.0 - av * av;
            }
            delta.swap(delta_prev);
        }
    }
    return total / static_cast<double>(batch.size());
}

nlohmann::json MlpField::to_json() const {
    nlohmann::json layers = nlohmann::json::array();
    for (const LayerShape& ls : shapes_) {
        const auto wb = params_.begin() + static_cast<std::ptrdiff_t>(ls.w_off);
        const auto bb = params_.begin() + static_cast<std::ptrdiff_t>(ls.b_off);
        layers.push_back(
            {{"rows", ls.rows},
             {"cols", ls.cols},
             {"w", std::vector<double>(wb, wb + static_cast<std::ptrdiff_t>(ls.rows) * ls.cols)},
             {"b", std::vector<double>(bb, bb + ls.rows)}});
    }
    return nlohmann::json{{"kind", "mlp"},
                          {"resolution", {height_, width_}},
                          {"hidden", hidden_},
                          {"layers", layers},
                          {"sigma_max", sigma_max_},
                          {"seed", init_seed_}};
}

MlpField MlpField::from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "mlp")
        throw IoError("checkpoint: expected kind \"mlp\"");
    MlpField f;
    const auto res = j.at("resolution").get<std::vector<int>>();
    if (res.size() != 2 || res[0] < 1 || res[1] < 1)
        throw IoError("checkpoint: bad resolution");
    f.height_ = res[0];
    f.width_ = res[1];
    f.hidden_ = j.at("hidden").get<std::vector<int>>();
    f.sigma_max_ = j.at("sigma_max").get<double>();
    f.init_seed_ = j.value("seed", std::uint64_t{0});
    if (f.sigma_max_ <= 0.0) throw IoError("checkpoint: sigma_max must be positive");
    f.build_shapes();

    const auto& layers = j.at("layers");
    if (layers.size() != f.shapes_.size())
        throw IoError("checkpoint: layer count does not match hidden sizes");
    for (std::size_t l = 0; l < f.shapes_.size(); ++l) {
        const LayerShape& ls = f.shapes_[l];
        const auto& jl = layers[l];
        if (jl.at("rows").get<int>() != ls.rows || jl.at("cols").get<int>() != ls.cols)
            throw IoError("checkpoint: layer " + std::to_string(l) + " has inconsistent shape");
        const auto w = jl.at("w").get<std::vector<double>>();
        const auto b = jl.at("b").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(ls.rows) * ls.cols ||
            b.size() != static_cast<std::size_t>(ls.rows))
            throw IoError("checkpoint: layer " + std::to_string(l) + " has wrong buffer size");
        std::copy(w.begin(), w.end(), f.params_.begin() + static_cast<std::ptrdiff_t>(ls.w_off));
        std::copy(b.begin(), b.end(), f.params_.begin() + static_cast<std::ptrdiff_t>(ls.b_off));
    }
    for (double v : f.params_)
        if (!std::isfinite(v)) throw IoError("checkpoint: non-finite parameter");
    return f;
}

void MlpField::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << to_json().dump(2) << '\n';
}

MlpField MlpField::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("invalid checkpoint " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

std::vector<double> train(MlpField& field, const std::vector<Image>& dataset,
                          const TrainConfig& cfg) {
    cfg.check();
    if (dataset.empty()) throw ParameterError("train: empty dataset");
    for (const Image& img : dataset)
        if (img.height != field.height() || img.width != field.width())
            throw ShapeError("train: dataset image does not match field resolution");

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;

    const std::size_t p = field.parameter_count();
    std::vector<double> m(p, 0.0), v(p, 0.0), grad;
    long step = 0;

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss_sum = 0.0;

        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            std::vector<PathSample> batch;
            batch.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                const double t = rng.uniform();
                const double sigma_hat =
                    cfg.noise_level_low + (cfg.noise_level_high - cfg.noise_level_low) * rng.uniform();
                batch.push_back(make_path_sample(dataset[order[i]], sigma_hat, cfg.sigma_max, t, rng));
            }

            const double batch_loss = field.loss_and_gradient(batch, &grad);
            epoch_loss_sum += batch_loss * static_cast<double>(batch.size());

            ++step;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            std::span<double> params = field.parameters();
            for (std::size_t i = 0; i < p; ++i) {
                m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
                v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
                params[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
            }
        }

        const double epoch_loss = epoch_loss_sum / static_cast<double>(dataset.size());
        if (!std::isfinite(epoch_loss))
            throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch), epoch);
        history.push_back(epoch_loss);
    }
    return history;
}

double gradient_check(const MlpField& field, const PathSample& sample, double epsilon,
                      int probe_count, std::uint64_t seed) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
        throw ParameterError("gradient_check: epsilon must lie in [1e-7, 1e-3]");
    if (probe_count < 1) throw ParameterError("gradient_check: probe count must be positive");

    const PathSample batch[1] = {sample};
    std::vector<double> analytic;
    field.loss_and_gradient(batch, &analytic);

    MlpField probe = field; // value copy; perturbations stay local
    const std::size_t p = probe.parameter_count();
    std::vector<std::uint32_t> idx(p);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed);
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(probe_count), p);
    rng.partial_shuffle(idx, count);

    double max_err = 0.0;
    std::span<double> params = probe.parameters();
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = idx[i];
        const double saved = params[k];
        params[k] = saved + epsilon;
        const double lp = probe.loss_and_gradient(batch, nullptr);
        params[k] = saved - epsilon;
        const double lm = probe.loss_and_gradient(batch, nullptr);
        params[k] = saved;

        const double numeric = (lp - lm) / (2.0 * epsilon);
        const double denom = std::max(std::abs(analytic[k]), std::abs(numeric));
        const double err = denom < 1e-6 ? std::abs(analytic[k] - numeric)
                                        : std::abs(analytic[k] - numeric) / denom;
        max_err = std::max(max_err, err);
    }
    return max_err;
}

void write_loss_history_csv(std::span<const double> history,
                            const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "epoch,mean_loss\n";
    out.precision(17);
    for (std::size_t i = 0; i < history.size(); ++i)
        out << (i + 1) << ',' << history[i] << '\n';
}

} // namespace qfm
