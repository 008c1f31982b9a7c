#pragma once

#include <functional>

#include "cusp/network.hpp"

namespace cusp {

// Scalar objective over a model output, with its analytic gradients at the
// class-logit and (optionally) pre-sigmoid surrogate nodes.
struct LossHandle {
    std::function<double(const Prediction&)> value;
    // Fill grad_class_logits; set use_surrogate and fill grad_surrogate when
    // the objective also touches the surrogate head.
    std::function<void(const Prediction&, Tensor& grad_class_logits,
                       bool& use_surrogate, Tensor& grad_surrogate)>
        gradients;
};

// Max over all parameters and input entries of
// |analytic - central difference| / max(1, |analytic| + |central|):
// relative error above unit scale, absolute below it, so gradients under
// the truncation noise of the central difference do not register as error.
// Enumerates every parameter, so only for small models. Throws NumericError
// on a non-finite loss.
double finite_diff_check(SurrogateModel& model, const Tensor& input,
                         const LossHandle& loss, double step);

}  // namespace cusp
