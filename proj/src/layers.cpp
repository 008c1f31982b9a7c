#include "cusp/layers.hpp"

#include <cmath>

#include "cusp/errors.hpp"

namespace cusp {
namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

int flat_size(const std::vector<int>& shape) {
    return static_cast<int>(Tensor::numel_of(shape));
}

double sigmoid1(double z) {
    // Split on sign so exp never overflows.
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

LayerSpec LayerSpec::dense(int in_size, int out_size) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.in_size = in_size;
    s.out_size = out_size;
    return s;
}

LayerSpec LayerSpec::conv2d(int in_ch, int out_ch) {
    LayerSpec s;
    s.kind = LayerKind::Conv2d;
    s.in_ch = in_ch;
    s.out_ch = out_ch;
    return s;
}

std::vector<int> LayerSpec::output_shape(const std::vector<int>& in) const {
    switch (kind) {
        case LayerKind::Dense:
            require(flat_size(in) == in_size,
                    "dense: input " + shape_str(in) + " does not flatten to " +
                        std::to_string(in_size));
            return {out_size};
        case LayerKind::Conv2d:
            require(in.size() == 3 && in[0] == in_ch,
                    "conv2d: expected [C,H,W] input with C=" +
                        std::to_string(in_ch) + ", got " + shape_str(in));
            return {out_ch, in[1], in[2]};
        case LayerKind::MaxPool2d:
            require(in.size() == 3 && in[1] % 2 == 0 && in[2] % 2 == 0,
                    "maxpool2d: expected [C,H,W] with even H,W, got " +
                        shape_str(in));
            return {in[0], in[1] / 2, in[2] / 2};
        case LayerKind::Flatten:
            return {flat_size(in)};
        case LayerKind::Relu:
        case LayerKind::Sigmoid:
            return in;
    }
    throw ConfigError("unknown layer kind");
}

std::vector<std::vector<int>> LayerSpec::param_shapes() const {
    switch (kind) {
        case LayerKind::Dense:
            return {{out_size, in_size}, {out_size}};
        case LayerKind::Conv2d:
            return {{out_ch, in_ch, 3, 3}, {out_ch}};
        default:
            return {};
    }
}

const char* LayerSpec::name() const {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

Tensor layer_forward(const LayerSpec& spec, const std::vector<Tensor>& params,
                     const Tensor& input) {
    const auto out_shape = spec.output_shape(input.shape());
    Tensor out(out_shape);

    switch (spec.kind) {
        case LayerKind::Dense: {
            const Tensor& W = params[0];
            const Tensor& b = params[1];
            for (int o = 0; o < spec.out_size; ++o) {
                double acc = b[static_cast<std::size_t>(o)];
                const double* wrow = W.data() + static_cast<std::size_t>(o) * spec.in_size;
                const double* x = input.data();
                for (int i = 0; i < spec.in_size; ++i) acc += wrow[i] * x[i];
                out[static_cast<std::size_t>(o)] = acc;
            }
            break;
        }
        case LayerKind::Conv2d: {
            const Tensor& W = params[0];
            const Tensor& b = params[1];
            const int H = input.dim(1), Wd = input.dim(2);
            for (int oc = 0; oc < spec.out_ch; ++oc) {
                for (int y = 0; y < H; ++y) {
                    for (int x = 0; x < Wd; ++x) {
                        double acc = b[static_cast<std::size_t>(oc)];
                        for (int ic = 0; ic < spec.in_ch; ++ic) {
                            for (int ky = -1; ky <= 1; ++ky) {
                                const int sy = y + ky;
                                if (sy < 0 || sy >= H) continue;
                                for (int kx = -1; kx <= 1; ++kx) {
                                    const int sx = x + kx;
                                    if (sx < 0 || sx >= Wd) continue;
                                    const std::size_t wi = static_cast<std::size_t>(
                                        ((oc * spec.in_ch + ic) * 3 + (ky + 1)) * 3 + (kx + 1));
                                    acc += W[wi] * input.at(ic, sy, sx);
                                }
                            }
                        }
                        out.at(oc, y, x) = acc;
                    }
                }
            }
            break;
        }
        case LayerKind::Relu:
            for (std::size_t i = 0; i < input.numel(); ++i) {
                out[i] = input[i] > 0.0 ? input[i] : 0.0;
            }
            break;
        case LayerKind::Sigmoid:
            for (std::size_t i = 0; i < input.numel(); ++i) {
                out[i] = sigmoid1(input[i]);
            }
            break;
        case LayerKind::MaxPool2d: {
            const int C = input.dim(0), H = input.dim(1), Wd = input.dim(2);
            for (int c = 0; c < C; ++c) {
                for (int y = 0; y < H / 2; ++y) {
                    for (int x = 0; x < Wd / 2; ++x) {
                        double m = input.at(c, 2 * y, 2 * x);
                        m = std::max(m, input.at(c, 2 * y, 2 * x + 1));
                        m = std::max(m, input.at(c, 2 * y + 1, 2 * x));
                        m = std::max(m, input.at(c, 2 * y + 1, 2 * x + 1));
                        out.at(c, y, x) = m;
                    }
                }
            }
            break;
        }
        case LayerKind::Flatten:
            out.vec() = input.vec();
            break;
    }
    return out;
}

Tensor layer_backward(const LayerSpec& spec, const std::vector<Tensor>& params,
                      const Tensor& input, const Tensor& upstream,
                      std::vector<Tensor>& param_grads) {
    Tensor gin(input.shape());

    switch (spec.kind) {
        case LayerKind::Dense: {
            const Tensor& W = params[0];
            Tensor& gW = param_grads[0];
            Tensor& gb = param_grads[1];
            for (int o = 0; o < spec.out_size; ++o) {
                const double u = upstream[static_cast<std::size_t>(o)];
                gb[static_cast<std::size_t>(o)] += u;
                const double* wrow = W.data() + static_cast<std::size_t>(o) * spec.in_size;
                double* gwrow = gW.data() + static_cast<std::size_t>(o) * spec.in_size;
                for (int i = 0; i < spec.in_size; ++i) {
                    gwrow[i] += u * input[static_cast<std::size_t>(i)];
                    gin[static_cast<std::size_t>(i)] += u * wrow[i];
                }
            }
            break;
        }
        case LayerKind::Conv2d: {
            const Tensor& W = params[0];
            Tensor& gW = param_grads[0];
            Tensor& gb = param_grads[1];
            const int H = input.dim(1), Wd = input.dim(2);
            for (int oc = 0; oc < spec.out_ch; ++oc) {
                for (int y = 0; y < H; ++y) {
                    for (int x = 0; x < Wd; ++x) {
                        const double u = upstream.at(oc, y, x);
                        gb[static_cast<std::size_t>(oc)] += u;
                        for (int ic = 0; ic < spec.in_ch; ++ic) {
                            for (int ky = -1; ky <= 1; ++ky) {
                                const int sy = y + ky;
                                if (sy < 0 || sy >= H) continue;
                                for (int kx = -1; kx <= 1; ++kx) {
                                    const int sx = x + kx;
                                    if (sx < 0 || sx >= Wd) continue;
                                    const std::size_t wi = static_cast<std::size_t>(
                                        ((oc * spec.in_ch + ic) * 3 + (ky + 1)) * 3 + (kx + 1));
                                    gW[wi] += u * input.at(ic, sy, sx);
                                    gin.at(ic, sy, sx) += u * W[wi];
                                }
                            }
                        }
                    }
                }
            }
            break;
        }
        case LayerKind::Relu:
            for (std::size_t i = 0; i < input.numel(); ++i) {
                gin[i] = input[i] > 0.0 ? upstream[i] : 0.0;
            }
            break;
        case LayerKind::Sigmoid:
            for (std::size_t i = 0; i < input.numel(); ++i) {
                const double s = sigmoid1(input[i]);
                gin[i] = upstream[i] * s * (1.0 - s);
            }
            break;
        case LayerKind::MaxPool2d: {
            const int C = input.dim(0), H = input.dim(1), Wd = input.dim(2);
            for (int c = 0; c < C; ++c) {
                for (int y = 0; y < H / 2; ++y) {
                    for (int x = 0; x < Wd / 2; ++x) {
                        // First maximal element in row-major window order.
                        int by = 2 * y, bx = 2 * x;
                        double best = input.at(c, by, bx);
                        for (int dy = 0; dy < 2; ++dy) {
                            for (int dx = 0; dx < 2; ++dx) {
                                const double v = input.at(c, 2 * y + dy, 2 * x + dx);
                                if (v > best) {
                                    best = v;
                                    by = 2 * y + dy;
                                    bx = 2 * x + dx;
                                }
                            }
                        }
                        gin.at(c, by, bx) += upstream.at(c, y, x);
                    }
                }
            }
            break;
        }
        case LayerKind::Flatten:
            gin.vec() = upstream.vec();
            break;
    }
    return gin;
}

}  // namespace cusp
