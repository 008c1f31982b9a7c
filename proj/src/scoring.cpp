#include "cusp/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/objective.hpp"
#include "cusp/train.hpp"

namespace cusp {
namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid1(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

int argmax_of(const Tensor& t) {
    return static_cast<int>(std::max_element(t.vec().begin(), t.vec().end()) -
                            t.vec().begin());
}

}  // namespace

ScoreDelta score_delta_from_name(const std::string& name) {
    if (name == "mse") return ScoreDelta::Mse;
    if (name == "bce") return ScoreDelta::Bce;
    throw ConfigError("unknown score delta '" + name + "'");
}

double cusp_score(const Tensor& surrogate, const Pattern& pattern, ScoreDelta delta) {
    const std::size_t m = surrogate.numel();
    if (m != pattern.bits.size()) {
        throw UsageError("cusp_score: surrogate length does not match pattern");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = surrogate[i];
        const double p = pattern.bits[i];
        if (delta == ScoreDelta::Mse) {
            acc += (s - p) * (s - p);
        } else {
            const double sp = std::clamp(s, kProbClamp, 1.0 - kProbClamp);
            acc += -(p * std::log(sp) + (1.0 - p) * std::log(1.0 - sp));
        }
    }
    return acc / static_cast<double>(m);
}

double baseline_entropy(const Tensor& y) {
    double h = 0.0;
    for (double v : y.vec()) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

double baseline_largest(const Tensor& y) {
    return 1.0 - *std::max_element(y.vec().begin(), y.vec().end());
}

double baseline_functional(const Tensor& y) {
    double top1 = -1.0, top2 = -1.0;
    for (double v : y.vec()) {
        if (v > top1) {
            top2 = top1;
            top1 = v;
        } else if (v > top2) {
            top2 = v;
        }
    }
    return 1.0 - (top1 - top2);
}

double baseline_random(Rng& rng) { return rng.uniform(); }

double baseline_oracle(bool certain) { return certain ? 0.0 : 1.0; }

double softmax_baseline(const Tensor& class_probs, BaselineMethod method,
                        Rng* rng, const bool* certain) {
    switch (method) {
        case BaselineMethod::Entropy: return baseline_entropy(class_probs);
        case BaselineMethod::Largest: return baseline_largest(class_probs);
        case BaselineMethod::Functional: return baseline_functional(class_probs);
        case BaselineMethod::Random:
            if (!rng) throw UsageError("random baseline needs an RNG");
            return baseline_random(*rng);
        case BaselineMethod::Oracle:
            if (!certain) throw UsageError("oracle baseline needs ground truth");
            return baseline_oracle(*certain);
    }
    throw UsageError("unknown baseline method");
}

double geometrical_margin(const Tensor& class_logits, const Tensor& classifier_weights,
                          const Tensor& classifier_bias) {
    (void)classifier_bias;
    const int K = static_cast<int>(class_logits.numel());
    if (K < 2) throw UsageError("geometrical margin needs K >= 2");
    int top = 0, runner = -1;
    for (int k = 1; k < K; ++k) {
        if (class_logits[static_cast<std::size_t>(k)] >
            class_logits[static_cast<std::size_t>(top)]) {
            top = k;
        }
    }
    for (int k = 0; k < K; ++k) {
        if (k == top) continue;
        if (runner < 0 || class_logits[static_cast<std::size_t>(k)] >
                              class_logits[static_cast<std::size_t>(runner)]) {
            runner = k;
        }
    }
    const int m = classifier_weights.dim(1);
    double norm_sq = 0.0;
    for (int j = 0; j < m; ++j) {
        const double d = classifier_weights.at(top, j) - classifier_weights.at(runner, j);
        norm_sq += d * d;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) return 1.0;
    const double margin = (class_logits[static_cast<std::size_t>(top)] -
                           class_logits[static_cast<std::size_t>(runner)]) /
                          norm;
    return 1.0 / (1.0 + margin);
}

double odin_score(SurrogateModel& model, const Tensor& x, double temperature,
                  double perturb_eps) {
    if (temperature <= 0.0) throw UsageError("odin: temperature must be > 0");
    if (perturb_eps < 0.0) throw UsageError("odin: perturbation must be >= 0");

    const Prediction pred = model.forward(x);
    const int top = argmax_of(pred.class_logits);

    // Gradient of -log softmax(z/T)[top] w.r.t. the input.
    Tensor scaled(pred.class_logits.shape());
    for (std::size_t i = 0; i < scaled.numel(); ++i) {
        scaled[i] = pred.class_logits[i] / temperature;
    }
    Tensor grad_logits = softmax(scaled);
    grad_logits[static_cast<std::size_t>(top)] -= 1.0;
    for (std::size_t i = 0; i < grad_logits.numel(); ++i) {
        grad_logits[i] /= temperature;
    }
    const GradBundle g = model.backward(grad_logits);

    Tensor x_tilde = x;
    for (std::size_t i = 0; i < x_tilde.numel(); ++i) {
        const double s = g.input_grad[i] > 0.0 ? 1.0 : (g.input_grad[i] < 0.0 ? -1.0 : 0.0);
        x_tilde[i] -= perturb_eps * s;
    }

    const Prediction pred2 = model.predict(x_tilde);
    Tensor scaled2(pred2.class_logits.shape());
    for (std::size_t i = 0; i < scaled2.numel(); ++i) {
        scaled2[i] = pred2.class_logits[i] / temperature;
    }
    const Tensor probs = softmax(scaled2);
    return 1.0 - *std::max_element(probs.vec().begin(), probs.vec().end());
}

DetectorRecord make_detector_record(const Tensor& surrogate, const Pattern& pattern,
                                    int label) {
    if (surrogate.numel() != pattern.bits.size()) {
        throw UsageError("detector record: surrogate/pattern size mismatch");
    }
    DetectorRecord rec;
    rec.surrogate = surrogate.vec();
    rec.pattern = pattern.bits;
    rec.mse = cusp_score(surrogate, pattern, ScoreDelta::Mse);
    rec.label = label;
    return rec;
}

DetectorModel DetectorModel::build(int side, int filters1, int filters2,
                                   std::uint64_t seed) {
    if (side < 4 || side % 4 != 0) {
        throw ConfigError("detector needs a pattern side divisible by 4");
    }
    DetectorModel det;
    det.side_ = side;
    det.conv_stack_ = {
        LayerSpec::conv2d(2, filters1), LayerSpec::relu(), LayerSpec::maxpool2d(),
        LayerSpec::conv2d(filters1, filters2), LayerSpec::relu(), LayerSpec::maxpool2d(),
        LayerSpec::flatten(),
    };
    const int flat = filters2 * (side / 4) * (side / 4);

    Rng rng(seed);
    for (const LayerSpec& spec : det.conv_stack_) {
        det.conv_params_.emplace_back();
        for (const auto& ps : spec.param_shapes()) {
            det.conv_params_.back().emplace_back(ps);
        }
        if (spec.kind == LayerKind::Conv2d) {
            const double bound = std::sqrt(6.0 / (spec.in_ch * 9 + spec.out_ch * 9));
            Tensor& w = det.conv_params_.back()[0];
            for (std::size_t i = 0; i < w.numel(); ++i) {
                w[i] = rng.uniform(-bound, bound);
            }
        }
    }
    det.dense_w_ = Tensor({1, flat + 1});
    det.dense_b_ = Tensor({1});
    const double bound = std::sqrt(6.0 / (flat + 2));
    for (std::size_t i = 0; i < det.dense_w_.numel(); ++i) {
        det.dense_w_[i] = rng.uniform(-bound, bound);
    }
    return det;
}

double DetectorModel::run(const DetectorRecord& rec, std::vector<Tensor>* cache,
                          std::vector<double>* dense_input) const {
    const std::size_t m = static_cast<std::size_t>(side_ * side_);
    if (rec.surrogate.size() != m || rec.pattern.size() != m) {
        throw UsageError("detector input does not match the configured side");
    }
    Tensor input({2, side_, side_});
    for (std::size_t i = 0; i < m; ++i) {
        input[i] = rec.surrogate[i];
        input[m + i] = rec.pattern[i];
    }
    Tensor cur = input;
    if (cache) {
        cache->clear();
        cache->push_back(cur);
    }
    for (std::size_t i = 0; i < conv_stack_.size(); ++i) {
        cur = layer_forward(conv_stack_[i], conv_params_[i], cur);
        if (cache) cache->push_back(cur);
    }
    std::vector<double> joined = cur.vec();
    joined.push_back(rec.mse);
    if (dense_input) *dense_input = joined;
    double logit = dense_b_[0];
    for (std::size_t i = 0; i < joined.size(); ++i) {
        logit += dense_w_[i] * joined[i];
    }
    return sigmoid1(logit);
}

double DetectorModel::predict(const DetectorRecord& rec) const {
    return run(rec, nullptr, nullptr);
}

double DetectorModel::uncertainty(const DetectorRecord& rec) const {
    return 1.0 - predict(rec);
}

double detector_score(const DetectorModel& detector, const Tensor& surrogate,
                      const Pattern& pattern, double mse) {
    DetectorRecord rec;
    rec.surrogate = surrogate.vec();
    rec.pattern = pattern.bits;
    rec.mse = mse;
    return 1.0 - detector.predict(rec);
}

DetectorModel train_detector(const std::vector<DetectorRecord>& records,
                             const DetectorTrainConfig& cfg) {
    if (records.empty()) throw UsageError("train_detector: no records");
    bool saw0 = false, saw1 = false;
    for (const DetectorRecord& r : records) {
        saw0 |= r.label == 0;
        saw1 |= r.label == 1;
    }
    if (!saw0 || !saw1) throw UsageError("train_detector: degenerate labels");

    const int side = static_cast<int>(
        std::lround(std::sqrt(static_cast<double>(records[0].surrogate.size()))));
    DetectorModel det = DetectorModel::build(side, cfg.filters1, cfg.filters2,
                                             cfg.seed ^ 0xD37EC70FULL);

    // Flatten parameters: conv params in order, then dense W, then bias.
    auto flatten = [&det]() {
        std::vector<double> flat;
        for (const auto& lp : det.conv_params_) {
            for (const Tensor& t : lp) {
                flat.insert(flat.end(), t.vec().begin(), t.vec().end());
            }
        }
        flat.insert(flat.end(), det.dense_w_.vec().begin(), det.dense_w_.vec().end());
        flat.push_back(det.dense_b_[0]);
        return flat;
    };
    auto unflatten = [&det](const std::vector<double>& flat) {
        std::size_t off = 0;
        for (auto& lp : det.conv_params_) {
            for (Tensor& t : lp) {
                std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                          flat.begin() + static_cast<std::ptrdiff_t>(off + t.numel()),
                          t.vec().begin());
                off += t.numel();
            }
        }
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                  flat.begin() + static_cast<std::ptrdiff_t>(off + det.dense_w_.numel()),
                  det.dense_w_.vec().begin());
        off += det.dense_w_.numel();
        det.dense_b_[0] = flat[off];
    };

    std::vector<double> params = flatten();
    Optimizer opt(OptimizerKind::Adam, cfg.learning_rate, params.size());
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> grad(params.size());
    std::vector<Tensor> cache;
    std::vector<double> dense_input;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < records.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(records.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double inv_bs = 1.0 / static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);

            for (std::size_t bi = start; bi < end; ++bi) {
                const DetectorRecord& rec = records[order[bi]];
                const double prob = det.run(rec, &cache, &dense_input);
                double d_prob = 0.0;
                const double loss = focal_bce(prob, rec.label, cfg.gamma, &d_prob);
                if (!std::isfinite(loss)) {
                    throw NumericError("non-finite detector loss at epoch " +
                                       std::to_string(epoch));
                }
                const double d_logit = d_prob * prob * (1.0 - prob);

                // Dense layer gradients and the gradient into the conv trunk.
                const std::size_t flat_n = dense_input.size() - 1;
                Tensor upstream(det.conv_stack_.empty()
                                    ? std::vector<int>{static_cast<int>(flat_n)}
                                    : cache.back().shape());
                std::size_t off = 0;
                for (const auto& lp : det.conv_params_) {
                    for (const Tensor& t : lp) off += t.numel();
                }
                for (std::size_t i = 0; i < dense_input.size(); ++i) {
                    grad[off + i] += inv_bs * d_logit * dense_input[i];
                    if (i < flat_n) upstream[i] = d_logit * det.dense_w_[i];
                }
                grad[off + det.dense_w_.numel()] += inv_bs * d_logit;

                // Back through the conv stack.
                std::vector<std::vector<Tensor>> conv_grads;
                for (const auto& lp : det.conv_params_) {
                    conv_grads.emplace_back();
                    for (const Tensor& t : lp) conv_grads.back().emplace_back(t.shape());
                }
                for (int li = static_cast<int>(det.conv_stack_.size()) - 1; li >= 0; --li) {
                    upstream = layer_backward(det.conv_stack_[static_cast<std::size_t>(li)],
                                              det.conv_params_[static_cast<std::size_t>(li)],
                                              cache[static_cast<std::size_t>(li)], upstream,
                                              conv_grads[static_cast<std::size_t>(li)]);
                }
                std::size_t goff = 0;
                for (const auto& lp : conv_grads) {
                    for (const Tensor& t : lp) {
                        for (std::size_t j = 0; j < t.numel(); ++j) {
                            grad[goff + j] += inv_bs * t[j];
                        }
                        goff += t.numel();
                    }
                }
            }
            opt.step(params, grad);
            unflatten(params);
        }
    }
    return det;
}

}  // namespace cusp
