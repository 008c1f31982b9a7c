#pragma once

#include "cusp/patterns.hpp"
#include "cusp/tensor.hpp"

namespace cusp {

struct LossValue {
    double total = 0.0;           // L = L1 + alpha * L2
    double classification = 0.0;  // L1
    double reconstruction = 0.0;  // L2
    double alpha = 0.0;
};

// Categorical cross entropy -log(y[t]) with y clamped to >= 1e-12.
// grad_logits, when non-null, receives softmax(z) - onehot(t) computed from
// the given probabilities.
double cce(const Tensor& class_probs, int target, Tensor* grad_logits = nullptr);

// Logits-form binary cross entropy summed over the m pixels of the target
// pattern. grad, when non-null, receives sigma(z) - p.
double bce_reconstruction(const Tensor& surrogate_logits, const Pattern& target,
                          Tensor* grad = nullptr);

// Eq-style combined loss: L1 from the class probabilities plus
// alpha * L2 from the surrogate logits against patterns[target].
LossValue combined_loss(const Tensor& class_probs, const Tensor& surrogate_logits,
                        int target, const PatternSet& patterns, double alpha,
                        Tensor* grad_class_logits = nullptr,
                        Tensor* grad_surrogate_logits = nullptr);

// Focal BCE -(1-p_t)^gamma * log(p_t) on a sigmoid output. grad_prob, when
// non-null, receives d/dprob.
double focal_bce(double prob, int label, double gamma,
                 double* grad_prob = nullptr);

}  // namespace cusp
