#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cusp/network.hpp"
#include "cusp/patterns.hpp"
#include "cusp/tensor.hpp"

namespace cusp {

struct AttackConfig {
    double epsilon = 0.0;  // per-pixel step in input value units
    double lo = 0.0;
    double hi = 1.0;

    void validate() const;
};

// One-step gradient-sign attack x' = clamp(x + eps * sign(grad_x J)). J is
// the attacked model's own training objective: combined classification +
// reconstruction loss when patterns are given, plain CCE otherwise.
// sign(0) = 0, so a zero gradient leaves x untouched.
Tensor fgm_attack(SurrogateModel& model, const Tensor& x, int target,
                  const AttackConfig& cfg, const PatternSet* patterns = nullptr,
                  double alpha = 0.0);

// Additive i.i.d. Gaussian pixel noise, clamped to [lo, hi].
Tensor add_noise(const Tensor& x, double sigma, std::uint64_t seed,
                 double lo = 0.0, double hi = 1.0);

// `count` axis-aligned square patches of side round(patch_fraction * side)
// set to lo, positions uniform under seed.
Tensor random_erase(const Tensor& x, double patch_fraction, int count,
                    std::uint64_t seed, double lo = 0.0);

// Rotation about the image center ((side-1)/2) with bilinear interpolation;
// out-of-frame samples fill with lo. rotate(x, 0) == x exactly.
Tensor rotate(const Tensor& x, double degrees, double lo = 0.0);

struct FlipSpec {
    std::vector<std::pair<int, int>> pairs;  // (from_class, to_class)
    double rate = 0.0;
    std::uint64_t seed = 0;

    void validate(int class_count) const;
};

struct FlipResult {
    std::vector<int> labels;
    std::vector<std::uint8_t> flipped;  // 1 where the label was changed
};

// Per pair, relabels exactly round(rate * count(from-class)) seeded-chosen
// samples to the to-class.
FlipResult flip_labels(const std::vector<int>& labels, const FlipSpec& spec);

}  // namespace cusp
