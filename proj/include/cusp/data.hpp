#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusp/tensor.hpp"

namespace cusp {

// Immutable labelled image collection. Images are [1, side, side] with
// pixel values in [0,1].
struct Dataset {
    int side = 0;
    int class_count = 0;
    std::vector<Tensor> images;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::string provenance;

    std::size_t size() const { return images.size(); }
    void validate() const;
};

// MNIST-style IDX pair: big-endian u32 magic 2051 (images) / 2049 (labels).
// Pixels scale byte/255. Requires square images and matching counts.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Hermetic dataset: class k's images are the (k + symbol_offset)-th symbol
// of the shared pattern bank plus clamped Gaussian noise. Offsets past the
// bank fall back to fixed seeded random bitmaps, giving an "other domain"
// without external files.
Dataset make_synthetic(int K, int side, int n_per_class, double noise_sigma,
                       std::uint64_t seed, int symbol_offset = 0);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

struct SplitPlan {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> indices;
};

// Shuffled 10/12, 1/12, 1/12 partition; remainders go to the first part.
SplitPlan split_ratio_10_1_1(const Dataset& ds, std::uint64_t seed);

// Shuffled two-way partition with round(test_fraction * N) test samples.
SplitPlan split_train_test(const Dataset& ds, double test_fraction,
                           std::uint64_t seed);

struct ClassSplit {
    Dataset in_domain;   // relabelled to 0..K/2-1
    Dataset out_domain;  // original labels kept
    std::vector<int> in_classes;
    std::vector<int> out_classes;
};

// Seeded class permutation; first K/2 classes become in-domain. K must be
// even.
ClassSplit split_class_half(const Dataset& ds, std::uint64_t seed);

}  // namespace cusp
