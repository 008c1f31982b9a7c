#include "cusp/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/objective.hpp"
#include "cusp/rng.hpp"

namespace cusp {

void AttackConfig::validate() const {
    if (epsilon < 0.0) throw ConfigError("attack epsilon must be >= 0");
    if (lo >= hi) throw ConfigError("attack clamp range must have lo < hi");
}

Tensor fgm_attack(SurrogateModel& model, const Tensor& x, int target,
                  const AttackConfig& cfg, const PatternSet* patterns,
                  double alpha) {
    cfg.validate();
    if (target < 0 || target >= model.class_count()) {
        throw UsageError("fgm: target label out of range");
    }

    const Prediction pred = model.forward(x);
    Tensor grad_logits, grad_surrogate;
    GradBundle g;
    if (patterns != nullptr && alpha > 0.0) {
        combined_loss(pred.class_probs, pred.surrogate_logits, target, *patterns,
                      alpha, &grad_logits, &grad_surrogate);
        g = model.backward(grad_logits, &grad_surrogate);
    } else {
        cce(pred.class_probs, target, &grad_logits);
        g = model.backward(grad_logits);
    }

    Tensor x_adv = x;
    for (std::size_t i = 0; i < x_adv.numel(); ++i) {
        const double gi = g.input_grad[i];
        const double s = gi > 0.0 ? 1.0 : (gi < 0.0 ? -1.0 : 0.0);
        x_adv[i] = std::clamp(x_adv[i] + cfg.epsilon * s, cfg.lo, cfg.hi);
    }
    return x_adv;
}

Tensor add_noise(const Tensor& x, double sigma, std::uint64_t seed, double lo,
                 double hi) {
    if (sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
    if (sigma == 0.0) return x;
    Rng rng(seed);
    Tensor out = x;
    for (std::size_t i = 0; i < out.numel(); ++i) {
        out[i] = std::clamp(out[i] + rng.normal(0.0, sigma), lo, hi);
    }
    return out;
}

Tensor random_erase(const Tensor& x, double patch_fraction, int count,
                    std::uint64_t seed, double lo) {
    if (patch_fraction <= 0.0 || patch_fraction > 1.0) {
        throw ConfigError("patch fraction must be in (0,1]");
    }
    if (count < 0) throw ConfigError("patch count must be >= 0");
    const int side = x.dim(1);
    const int patch = static_cast<int>(std::lround(patch_fraction * side));
    if (patch > side) throw ConfigError("erase patch larger than the image");
    Tensor out = x;
    if (count == 0 || patch == 0) return out;

    Rng rng(seed);
    const int channels = x.dim(0);
    for (int p = 0; p < count; ++p) {
        const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(side - patch + 1)));
        const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(side - patch + 1)));
        for (int c = 0; c < channels; ++c) {
            for (int y = y0; y < y0 + patch; ++y) {
                for (int xx = x0; xx < x0 + patch; ++xx) {
                    out.at(c, y, xx) = lo;
                }
            }
        }
    }
    return out;
}

Tensor rotate(const Tensor& x, double degrees, double lo) {
    if (degrees < 0.0 || degrees > 360.0) {
        throw UsageError("rotation must be in [0, 360] degrees");
    }
    if (degrees == 0.0) return x;

    const int channels = x.dim(0);
    const int h = x.dim(1), w = x.dim(2);
    const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
    const double theta = degrees * M_PI / 180.0;
    const double c = std::cos(theta), s = std::sin(theta);

    Tensor out(x.shape());
    for (int ch = 0; ch < channels; ++ch) {
        for (int y = 0; y < h; ++y) {
            for (int xx = 0; xx < w; ++xx) {
                // Inverse map the output pixel into the source frame.
                const double dy = y - cy, dx = xx - cx;
                const double sy = cy + (c * dy - s * dx);
                const double sx = cx + (s * dy + c * dx);
                const int y0 = static_cast<int>(std::floor(sy));
                const int x0 = static_cast<int>(std::floor(sx));
                const double fy = sy - y0, fx = sx - x0;
                double acc = 0.0;
                for (int oy = 0; oy <= 1; ++oy) {
                    for (int ox = 0; ox <= 1; ++ox) {
                        const double wgt = (oy ? fy : 1.0 - fy) * (ox ? fx : 1.0 - fx);
                        const int yy = y0 + oy, xc = x0 + ox;
                        const double v = (yy >= 0 && yy < h && xc >= 0 && xc < w)
                                             ? x.at(ch, yy, xc)
                                             : lo;
                        acc += wgt * v;
                    }
                }
                out.at(ch, y, xx) = acc;
            }
        }
    }
    return out;
}

void FlipSpec::validate(int class_count) const {
    if (rate < 0.0 || rate > 1.0) throw ConfigError("flip rate must be in [0,1]");
    for (const auto& [from, to] : pairs) {
        if (from == to) throw ConfigError("flip pair must have from != to");
        if (from < 0 || from >= class_count || to < 0 || to >= class_count) {
            throw ConfigError("flip pair class out of range");
        }
    }
}

FlipResult flip_labels(const std::vector<int>& labels, const FlipSpec& spec) {
    // Flip targets may name classes absent from the current labels; validate
    // against the widest class index seen anywhere.
    int max_class = 0;
    for (int l : labels) max_class = std::max(max_class, l);
    for (const auto& [from, to] : spec.pairs) {
        max_class = std::max({max_class, from, to});
    }
    spec.validate(max_class + 1);

    FlipResult result;
    result.labels = labels;
    result.flipped.assign(labels.size(), 0);

    Rng rng(spec.seed);
    for (const auto& [from, to] : spec.pairs) {
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == from) eligible.push_back(i);
        }
        const std::size_t n_flip = static_cast<std::size_t>(
            std::lround(spec.rate * static_cast<double>(eligible.size())));
        shuffle(eligible, rng);
        for (std::size_t i = 0; i < n_flip; ++i) {
            result.labels[eligible[i]] = to;
            result.flipped[eligible[i]] = 1;
        }
    }
    return result;
}

}  // namespace cusp
