#include "cusp/network.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/rng.hpp"

namespace cusp {

Tensor softmax(const Tensor& logits) {
    Tensor out(logits.shape());
    const double zmax = *std::max_element(logits.vec().begin(), logits.vec().end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.numel(); ++i) {
        out[i] = std::exp(logits[i] - zmax);
        sum += out[i];
    }
    for (std::size_t i = 0; i < logits.numel(); ++i) out[i] /= sum;
    return out;
}

namespace {

bool is_perfect_square(int m) {
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return r * r == m;
}

void init_params(std::vector<std::vector<Tensor>>& params,
                 const std::vector<LayerSpec>& layers, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t pi = 0; pi < params[li].size(); ++pi) {
            Tensor& p = params[li][pi];
            if (pi != 0) continue;  // biases stay zero
            int fan_in = 0, fan_out = 0;
            if (layers[li].kind == LayerKind::Dense) {
                fan_in = layers[li].in_size;
                fan_out = layers[li].out_size;
            } else {  // conv2d, 3x3 receptive field
                fan_in = layers[li].in_ch * 9;
                fan_out = layers[li].out_ch * 9;
            }
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (std::size_t i = 0; i < p.numel(); ++i) {
                p[i] = rng.uniform(-bound, bound);
            }
        }
    }
}

}  // namespace

SurrogateModel SurrogateModel::build(const std::string& arch,
                                     std::vector<int> input_shape, int m,
                                     int K, std::uint64_t seed) {
    if (!is_perfect_square(m)) {
        throw ConfigError("surrogate size m=" + std::to_string(m) +
                          " must be a perfect square");
    }
    if (K < 2) throw ConfigError("class count K must be >= 2");

    std::vector<LayerSpec> layers;
    if (arch == "small-conv") {
        if (input_shape.size() != 3) {
            throw ConfigError("small-conv expects a [C,H,W] input shape");
        }
        layers.push_back(LayerSpec::conv2d(input_shape[0], 16));
        layers.push_back(LayerSpec::relu());
        layers.push_back(LayerSpec::maxpool2d());
        layers.push_back(LayerSpec::conv2d(16, 32));
        layers.push_back(LayerSpec::relu());
        layers.push_back(LayerSpec::maxpool2d());
        if (input_shape[1] % 4 != 0 || input_shape[2] % 4 != 0) {
            throw ConfigError("small-conv needs H and W divisible by 4");
        }
        layers.push_back(LayerSpec::flatten());
        const int flat = 32 * (input_shape[1] / 4) * (input_shape[2] / 4);
        layers.push_back(LayerSpec::dense(flat, m));
    } else if (arch == "mlp") {
        const int flat = static_cast<int>(Tensor::numel_of(input_shape));
        layers.push_back(LayerSpec::flatten());
        layers.push_back(LayerSpec::dense(flat, 256));
        layers.push_back(LayerSpec::relu());
        layers.push_back(LayerSpec::dense(256, m));
    } else {
        throw ConfigError("unknown architecture '" + arch + "'");
    }
    layers.push_back(LayerSpec::sigmoid());
    layers.push_back(LayerSpec::dense(m, K));

    SurrogateModel model =
        from_layers(arch, std::move(input_shape), std::move(layers), m, K);
    init_params(model.params_, model.layers_, seed);
    return model;
}

SurrogateModel SurrogateModel::from_layers(std::string arch,
                                           std::vector<int> input_shape,
                                           std::vector<LayerSpec> layers,
                                           int m, int K) {
    SurrogateModel model;
    model.arch_ = std::move(arch);
    model.input_shape_ = std::move(input_shape);
    model.layers_ = std::move(layers);
    model.m_ = m;
    model.K_ = K;

    // Validate the chain and locate the surrogate head.
    std::vector<int> shape = model.input_shape_;
    for (std::size_t i = 0; i < model.layers_.size(); ++i) {
        shape = model.layers_[i].output_shape(shape);
        model.params_.emplace_back();
        for (const auto& ps : model.layers_[i].param_shapes()) {
            model.params_.back().emplace_back(ps);
        }
    }
    if (shape != std::vector<int>{K}) {
        throw ConfigError("layer stack does not end in K=" + std::to_string(K) +
                          " class logits");
    }
    const std::size_t n = model.layers_.size();
    if (n < 3 || model.layers_[n - 1].kind != LayerKind::Dense ||
        model.layers_[n - 2].kind != LayerKind::Sigmoid ||
        model.layers_[n - 3].kind != LayerKind::Dense ||
        model.layers_[n - 3].out_size != m) {
        throw ConfigError("layer stack lacks the dense(m)+sigmoid surrogate head");
    }
    model.surrogate_dense_index_ = static_cast<int>(n) - 3;
    return model;
}

Prediction SurrogateModel::run(const Tensor& x, std::vector<Tensor>* cache) const {
    if (x.shape() != input_shape_) {
        throw UsageError("input shape " + shape_str(x.shape()) +
                         " does not match model input " + shape_str(input_shape_));
    }
    Prediction pred;
    Tensor cur = x;
    if (cache) {
        cache->clear();
        cache->push_back(cur);
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        cur = layer_forward(layers_[i], params_[i], cur);
        if (cache) cache->push_back(cur);
        if (static_cast<int>(i) == surrogate_dense_index_) {
            pred.surrogate_logits = cur;
        } else if (static_cast<int>(i) == surrogate_dense_index_ + 1) {
            pred.surrogate = cur;
        }
    }
    pred.class_logits = cur;
    pred.class_probs = softmax(cur);
    return pred;
}

Prediction SurrogateModel::predict(const Tensor& x) const { return run(x, nullptr); }

Prediction SurrogateModel::forward(const Tensor& x) {
    Prediction pred = run(x, &cache_);
    has_cache_ = true;
    return pred;
}

GradBundle SurrogateModel::zero_grads() const {
    GradBundle g;
    g.param_grads.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        for (const Tensor& p : params_[i]) {
            g.param_grads[i].emplace_back(p.shape());
        }
    }
    g.input_grad = Tensor(input_shape_);
    return g;
}

GradBundle SurrogateModel::backward(const Tensor& grad_class_logits,
                                    const Tensor* grad_surrogate_logits) const {
    if (!has_cache_) {
        throw UsageError("backward called without a cached forward pass");
    }
    if (grad_class_logits.shape() != std::vector<int>{K_}) {
        throw UsageError("upstream gradient must have K entries");
    }
    GradBundle g = zero_grads();
    Tensor upstream = grad_class_logits;
    for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
        upstream = layer_backward(layers_[static_cast<std::size_t>(i)],
                                  params_[static_cast<std::size_t>(i)],
                                  cache_[static_cast<std::size_t>(i)], upstream,
                                  g.param_grads[static_cast<std::size_t>(i)]);
        // After the sigmoid's backward step, upstream sits at the pre-sigmoid
        // surrogate node; the reconstruction-loss gradient joins here.
        if (i - 1 == surrogate_dense_index_ && grad_surrogate_logits != nullptr) {
            if (grad_surrogate_logits->shape() != std::vector<int>{m_}) {
                throw UsageError("surrogate upstream gradient must have m entries");
            }
            for (std::size_t j = 0; j < upstream.numel(); ++j) {
                upstream[j] += (*grad_surrogate_logits)[j];
            }
        }
    }
    g.input_grad = upstream;
    return g;
}

std::size_t SurrogateModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& lp : params_) {
        for (const Tensor& p : lp) n += p.numel();
    }
    return n;
}

std::vector<double> SurrogateModel::flatten_parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& lp : params_) {
        for (const Tensor& p : lp) {
            flat.insert(flat.end(), p.vec().begin(), p.vec().end());
        }
    }
    return flat;
}

void SurrogateModel::load_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) {
        throw UsageError("parameter blob length mismatch");
    }
    std::size_t off = 0;
    for (auto& lp : params_) {
        for (Tensor& p : lp) {
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                      flat.begin() + static_cast<std::ptrdiff_t>(off + p.numel()),
                      p.vec().begin());
            off += p.numel();
        }
    }
}

}  // namespace cusp
