#pragma once

#include <vector>

#include "cusp/tensor.hpp"

namespace cusp {

enum class LayerKind { Dense, Conv2d, Relu, Sigmoid, MaxPool2d, Flatten };

// conv2d is fixed at 3x3 kernels, stride 1, zero padding 1.
// maxpool2d is fixed at 2x2 windows, stride 2.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    int in_size = 0;   // dense
    int out_size = 0;  // dense
    int in_ch = 0;     // conv2d
    int out_ch = 0;    // conv2d

    static LayerSpec dense(int in_size, int out_size);
    static LayerSpec conv2d(int in_ch, int out_ch);
    static LayerSpec relu() { return {LayerKind::Relu}; }
    static LayerSpec sigmoid() { return {LayerKind::Sigmoid}; }
    static LayerSpec maxpool2d() { return {LayerKind::MaxPool2d}; }
    static LayerSpec flatten() { return {LayerKind::Flatten}; }

    // Throws ConfigError on an incompatible input shape.
    std::vector<int> output_shape(const std::vector<int>& input_shape) const;

    // Parameter shapes in storage order: dense -> {W[out,in], b[out]};
    // conv2d -> {W[oc,ic,3,3], b[oc]}; others have none.
    std::vector<std::vector<int>> param_shapes() const;

    const char* name() const;
};

// Pure forward evaluation of one layer.
Tensor layer_forward(const LayerSpec& spec, const std::vector<Tensor>& params,
                     const Tensor& input);

// Reverse-mode step: given the layer input and the gradient of some scalar
// w.r.t. the layer output, accumulates parameter gradients into param_grads
// (which must be preallocated with param shapes) and returns the gradient
// w.r.t. the input. Maxpool ties route to the first maximum in row-major
// order.
Tensor layer_backward(const LayerSpec& spec, const std::vector<Tensor>& params,
                      const Tensor& input, const Tensor& upstream,
                      std::vector<Tensor>& param_grads);

}  // namespace cusp
