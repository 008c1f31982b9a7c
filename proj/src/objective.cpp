#include "cusp/objective.hpp"

#include <cmath>

#include "cusp/errors.hpp"

namespace cusp {
namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid1(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double cce(const Tensor& class_probs, int target, Tensor* grad_logits) {
    const int K = static_cast<int>(class_probs.numel());
    if (target < 0 || target >= K) {
        throw UsageError("cce: target class out of range");
    }
    const double yt = std::max(class_probs[static_cast<std::size_t>(target)], kProbClamp);
    if (grad_logits) {
        *grad_logits = class_probs;
        (*grad_logits)[static_cast<std::size_t>(target)] -= 1.0;
    }
    return -std::log(yt);
}

double bce_reconstruction(const Tensor& surrogate_logits, const Pattern& target,
                          Tensor* grad) {
    const std::size_t m = surrogate_logits.numel();
    if (m != target.bits.size()) {
        throw UsageError("bce_reconstruction: logits length does not match pattern");
    }
    if (grad) *grad = Tensor(surrogate_logits.shape());
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double z = surrogate_logits[i];
        const double p = target.bits[i];
        // Stable logits form: max(z,0) - z*p + log(1+exp(-|z|)).
        loss += std::max(z, 0.0) - z * p + std::log1p(std::exp(-std::abs(z)));
        if (grad) (*grad)[i] = sigmoid1(z) - p;
    }
    return loss;
}

LossValue combined_loss(const Tensor& class_probs, const Tensor& surrogate_logits,
                        int target, const PatternSet& patterns, double alpha,
                        Tensor* grad_class_logits, Tensor* grad_surrogate_logits) {
    LossValue v;
    v.alpha = alpha;
    v.classification = cce(class_probs, target, grad_class_logits);
    v.reconstruction = bce_reconstruction(surrogate_logits,
                                          patterns.of_class(target),
                                          grad_surrogate_logits);
    if (grad_surrogate_logits) {
        for (std::size_t i = 0; i < grad_surrogate_logits->numel(); ++i) {
            (*grad_surrogate_logits)[i] *= alpha;
        }
    }
    v.total = v.classification + alpha * v.reconstruction;
    return v;
}

double focal_bce(double prob, int label, double gamma, double* grad_prob) {
    if (label != 0 && label != 1) throw UsageError("focal_bce: label must be 0 or 1");
    if (gamma < 0.0) throw UsageError("focal_bce: gamma must be >= 0");
    const double pt_raw = label == 1 ? prob : 1.0 - prob;
    const double pt = std::max(pt_raw, kProbClamp);
    const double one_minus = 1.0 - pt;
    const double loss = -std::pow(one_minus, gamma) * std::log(pt);
    if (grad_prob) {
        double d_pt;
        if (gamma == 0.0) {
            d_pt = -1.0 / pt;
        } else {
            d_pt = gamma * std::pow(one_minus, gamma - 1.0) * std::log(pt) -
                   std::pow(one_minus, gamma) / pt;
        }
        *grad_prob = label == 1 ? d_pt : -d_pt;
    }
    return loss;
}

}  // namespace cusp
