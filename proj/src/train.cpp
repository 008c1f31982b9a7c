#include "cusp/train.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/objective.hpp"
#include "cusp/rng.hpp"

namespace cusp {

const char* optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::Adam ? "adam" : "sgd-momentum";
}

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd-momentum") return OptimizerKind::SgdMomentum;
    throw ConfigError("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params)
    : kind_(kind), lr_(learning_rate), m_(n_params, 0.0) {
    if (kind_ == OptimizerKind::Adam) v_.assign(n_params, 0.0);
}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw UsageError("optimizer: parameter count mismatch");
    }
    ++t_;
    if (kind_ == OptimizerKind::Adam) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(beta1, t_);
        const double bc2 = 1.0 - std::pow(beta2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1 * m_[i] + (1.0 - beta1) * grads[i];
            v_[i] = beta2 * v_[i] + (1.0 - beta2) * grads[i] * grads[i];
            params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps);
        }
    } else {
        constexpr double momentum = 0.9;
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = momentum * m_[i] + grads[i];
            params[i] -= lr_ * m_[i];
        }
    }
}

TrainReport train(SurrogateModel& model, const Dataset& data,
                  const PatternSet& patterns, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
    cfg.validate();
    if (patterns.class_count() != model.class_count()) {
        throw ConfigError("pattern set class count does not match the model");
    }
    if (patterns.pixel_count() != model.m()) {
        throw ConfigError("pattern pixel count does not match the surrogate size");
    }
    for (int l : data.labels) {
        if (l < 0 || l >= model.class_count()) {
            throw ConfigError("training label out of range");
        }
    }
    if (data.size() == 0) throw ConfigError("empty training set");

    const std::size_t n = data.size();
    std::vector<double> params = model.flatten_parameters();
    Optimizer opt(cfg.optimizer, cfg.learning_rate, params.size());
    Rng rng(cfg.seed);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    TrainReport report;
    std::vector<double> batch_grad(params.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        EpochStats stats;
        std::size_t correct = 0;

        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            const double inv_bs = 1.0 / static_cast<double>(end - start);
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);

            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t i = order[bi];
                const Prediction pred = model.forward(data.images[i]);
                Tensor g_logits, g_surrogate;
                const LossValue loss =
                    combined_loss(pred.class_probs, pred.surrogate_logits,
                                  data.labels[i], patterns, cfg.alpha,
                                  &g_logits, &g_surrogate);
                if (!std::isfinite(loss.total)) {
                    throw NumericError(
                        "non-finite training loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(start / static_cast<std::size_t>(cfg.batch_size)));
                }
                stats.loss_total += loss.total;
                stats.loss_classification += loss.classification;
                stats.loss_reconstruction += loss.reconstruction;
                const auto& y = pred.class_probs.vec();
                const int argmax = static_cast<int>(
                    std::max_element(y.begin(), y.end()) - y.begin());
                correct += argmax == data.labels[i];

                const GradBundle g = model.backward(g_logits, &g_surrogate);
                std::size_t off = 0;
                for (const auto& lp : g.param_grads) {
                    for (const Tensor& t : lp) {
                        for (std::size_t j = 0; j < t.numel(); ++j) {
                            batch_grad[off + j] += inv_bs * t[j];
                        }
                        off += t.numel();
                    }
                }
            }
            opt.step(params, batch_grad);
            model.load_parameters(params);
        }

        const double inv_n = 1.0 / static_cast<double>(n);
        stats.loss_total *= inv_n;
        stats.loss_classification *= inv_n;
        stats.loss_reconstruction *= inv_n;
        stats.accuracy = static_cast<double>(correct) * inv_n;
        report.epochs.push_back(stats);
        if (on_epoch) on_epoch(epoch, model);
    }
    return report;
}

}  // namespace cusp
