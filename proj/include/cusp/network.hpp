#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusp/layers.hpp"
#include "cusp/tensor.hpp"

namespace cusp {

// Stable softmax.
Tensor softmax(const Tensor& logits);

struct Prediction {
    Tensor class_probs;       // y = softmax(z), K entries
    Tensor surrogate;         // s in (0,1)^m
    Tensor class_logits;      // z, K entries
    Tensor surrogate_logits;  // pre-sigmoid surrogate, m entries
};

struct GradBundle {
    std::vector<std::vector<Tensor>> param_grads;  // per layer, matches params
    Tensor input_grad;
};

// Sequential classifier with a sigmoid surrogate head of size m feeding a
// linear layer of K class logits. The trunk ends at the dense(m) layer; the
// last layer is always the classifier.
class SurrogateModel {
  public:
    // arch is "small-conv" or "mlp"; m must be a perfect square; K >= 2.
    static SurrogateModel build(const std::string& arch,
                                std::vector<int> input_shape, int m, int K,
                                std::uint64_t seed);

    // Assemble from explicit layers (checkpoint load path).
    static SurrogateModel from_layers(std::string arch,
                                      std::vector<int> input_shape,
                                      std::vector<LayerSpec> layers, int m,
                                      int K);

    // Pure forward pass; does not touch the cache, shareable read-only.
    Prediction predict(const Tensor& x) const;

    // Forward pass that records per-layer activations for backward().
    Prediction forward(const Tensor& x);

    // Reverse pass from cached activations. grad_class_logits is dL/dz;
    // grad_surrogate_logits, when given, is injected at the pre-sigmoid
    // surrogate node (the reconstruction-loss path). Throws UsageError when
    // no forward cache exists.
    GradBundle backward(const Tensor& grad_class_logits,
                        const Tensor* grad_surrogate_logits = nullptr) const;

    GradBundle zero_grads() const;

    std::size_t parameter_count() const;
    std::vector<double> flatten_parameters() const;
    void load_parameters(const std::vector<double>& flat);

    const std::vector<LayerSpec>& layers() const { return layers_; }
    std::vector<std::vector<Tensor>>& params() { return params_; }
    const std::vector<std::vector<Tensor>>& params() const { return params_; }
    const std::vector<int>& input_shape() const { return input_shape_; }
    const std::string& arch() const { return arch_; }
    int m() const { return m_; }
    int class_count() const { return K_; }

    // Classifier weight matrix [K, m] and bias [K].
    const Tensor& classifier_weights() const { return params_.back()[0]; }
    const Tensor& classifier_bias() const { return params_.back()[1]; }

  private:
    Prediction run(const Tensor& x, std::vector<Tensor>* cache) const;

    std::string arch_;
    std::vector<int> input_shape_;
    std::vector<LayerSpec> layers_;
    std::vector<std::vector<Tensor>> params_;
    int m_ = 0;
    int K_ = 0;
    int surrogate_dense_index_ = -1;  // index of the dense(m) layer

    std::vector<Tensor> cache_;  // cache_[i] = input to layer i; back() = z
    bool has_cache_ = false;
};

}  // namespace cusp
