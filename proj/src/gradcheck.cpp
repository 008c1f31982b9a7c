#include "cusp/gradcheck.hpp"

#include <cmath>

#include "cusp/errors.hpp"

namespace cusp {
namespace {

double checked_value(const LossHandle& loss, const Prediction& pred) {
    const double v = loss.value(pred);
    if (!std::isfinite(v)) throw NumericError("non-finite loss in gradient check");
    return v;
}

}  // namespace

double finite_diff_check(SurrogateModel& model, const Tensor& input,
                         const LossHandle& loss, double step) {
    if (step <= 0.0) throw UsageError("finite_diff_check: step must be > 0");

    const Prediction pred = model.forward(input);
    Tensor grad_logits(std::vector<int>{model.class_count()});
    Tensor grad_surrogate(std::vector<int>{model.m()});
    bool use_surrogate = false;
    loss.gradients(pred, grad_logits, use_surrogate, grad_surrogate);
    const GradBundle analytic =
        model.backward(grad_logits, use_surrogate ? &grad_surrogate : nullptr);

    double max_err = 0.0;
    auto update = [&max_err](double a, double n) {
        // Relative above unit scale, absolute below it: tiny gradients sit
        // under the truncation noise of the central difference, so a pure
        // ratio there measures noise rather than correctness.
        const double err = std::abs(a - n) / std::max(1.0, std::abs(a) + std::abs(n));
        max_err = std::max(max_err, err);
    };

    std::vector<double> params = model.flatten_parameters();
    std::size_t off = 0;
    for (const auto& lp : analytic.param_grads) {
        for (const Tensor& g : lp) {
            for (std::size_t j = 0; j < g.numel(); ++j) {
                const double saved = params[off + j];
                params[off + j] = saved + step;
                model.load_parameters(params);
                const double up = checked_value(loss, model.predict(input));
                params[off + j] = saved - step;
                model.load_parameters(params);
                const double down = checked_value(loss, model.predict(input));
                params[off + j] = saved;
                update(g[j], (up - down) / (2.0 * step));
            }
            off += g.numel();
        }
    }
    model.load_parameters(params);

    Tensor probe = input;
    for (std::size_t i = 0; i < probe.numel(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + step;
        const double up = checked_value(loss, model.predict(probe));
        probe[i] = saved - step;
        const double down = checked_value(loss, model.predict(probe));
        probe[i] = saved;
        update(analytic.input_grad[i], (up - down) / (2.0 * step));
    }
    return max_err;
}

}  // namespace cusp
