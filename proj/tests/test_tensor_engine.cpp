#include "doctest.h"

#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/gradcheck.hpp"
#include "cusp/layers.hpp"
#include "cusp/network.hpp"
#include "cusp/objective.hpp"
#include "cusp/patterns.hpp"
#include "cusp/rng.hpp"

using namespace cusp;

namespace {

Tensor random_tensor(const std::vector<int>& shape, Rng& rng, double scale = 1.0) {
    Tensor t(shape);
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.normal(0.0, scale);
    return t;
}

// Tiny fully-enumerable model: flatten -> dense(6,4) -> sigmoid -> dense(4,2).
SurrogateModel tiny_mlp(std::uint64_t seed) {
    std::vector<LayerSpec> layers = {
        LayerSpec::flatten(),
        LayerSpec::dense(6, 4),
        LayerSpec::sigmoid(),
        LayerSpec::dense(4, 2),
    };
    SurrogateModel model = SurrogateModel::from_layers("tiny", {6}, layers, 4, 2);
    Rng rng(seed);
    auto params = model.flatten_parameters();
    for (double& p : params) p = rng.normal(0.0, 0.5);
    model.load_parameters(params);
    return model;
}

LossHandle combined_handle(const PatternSet& patterns, int target, double alpha) {
    LossHandle h;
    h.value = [&patterns, target, alpha](const Prediction& pred) {
        return combined_loss(pred.class_probs, pred.surrogate_logits, target,
                             patterns, alpha)
            .total;
    };
    h.gradients = [&patterns, target, alpha](const Prediction& pred, Tensor& gz,
                                             bool& use_s, Tensor& gs) {
        combined_loss(pred.class_probs, pred.surrogate_logits, target, patterns,
                      alpha, &gz, &gs);
        use_s = true;
    };
    return h;
}

}  // namespace

TEST_CASE("relu forward matches definition") {
    Tensor in({3}, {-1.0, 0.0, 2.0});
    Tensor out = layer_forward(LayerSpec::relu(), {}, in);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == 2.0);
}

TEST_CASE("sigmoid of zero is one half") {
    Tensor in({2}, {0.0, 0.0});
    Tensor out = layer_forward(LayerSpec::sigmoid(), {}, in);
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));
}

TEST_CASE("sigmoid stays strictly inside (0,1)") {
    // 30 is near the largest magnitude where 1 - sigma(z) is still
    // representable; beyond that the result rounds to exactly 1.0.
    Tensor in({4}, {-700.0, -30.0, 0.0, 30.0});
    Tensor out = layer_forward(LayerSpec::sigmoid(), {}, in);
    for (std::size_t i = 0; i < out.numel(); ++i) {
        CHECK(out[i] > 0.0);
        CHECK(out[i] < 1.0);
    }
}

TEST_CASE("dense with identity weights is the identity") {
    const int n = 5;
    Tensor w({n, n});
    for (int i = 0; i < n; ++i) w.at(i, i) = 1.0;
    Tensor b({n});
    Rng rng(7);
    Tensor v = random_tensor({n}, rng);
    Tensor out = layer_forward(LayerSpec::dense(n, n), {w, b}, v);
    for (std::size_t i = 0; i < v.numel(); ++i) CHECK(out[i] == v[i]);
}

TEST_CASE("conv2d with a zero kernel gives zeros") {
    Tensor w({1, 1, 3, 3});
    Tensor b({1});
    Rng rng(11);
    Tensor img = random_tensor({1, 6, 6}, rng);
    Tensor out = layer_forward(LayerSpec::conv2d(1, 1), {w, b}, img);
    for (std::size_t i = 0; i < out.numel(); ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("layer forward is deterministic") {
    Rng rng(3);
    Tensor img = random_tensor({2, 4, 4}, rng);
    Tensor w = random_tensor({3, 2, 3, 3}, rng);
    Tensor b = random_tensor({3}, rng);
    Tensor a = layer_forward(LayerSpec::conv2d(2, 3), {w, b}, img);
    Tensor c = layer_forward(LayerSpec::conv2d(2, 3), {w, b}, img);
    CHECK(a.vec() == c.vec());
}

TEST_CASE("shape bookkeeping of pointwise and pooling layers") {
    Rng rng(5);
    Tensor img = random_tensor({3, 8, 8}, rng);
    CHECK(layer_forward(LayerSpec::relu(), {}, img).shape() == img.shape());
    CHECK(layer_forward(LayerSpec::sigmoid(), {}, img).shape() == img.shape());
    CHECK(layer_forward(LayerSpec::maxpool2d(), {}, img).shape() ==
          std::vector<int>{3, 4, 4});
    CHECK(layer_forward(LayerSpec::flatten(), {}, img).numel() == img.numel());
}

TEST_CASE("dense layer shape mismatch raises a configuration error") {
    Tensor w({2, 3});
    Tensor b({2});
    Tensor in({4});
    CHECK_THROWS_AS(layer_forward(LayerSpec::dense(3, 2), {w, b}, in), ConfigError);
}

TEST_CASE("single dense layer input gradient is W^T u") {
    Rng rng(13);
    Tensor w = random_tensor({4, 3}, rng);
    Tensor b = random_tensor({4}, rng);
    Tensor x = random_tensor({3}, rng);
    Tensor u = random_tensor({4}, rng);
    std::vector<Tensor> grads = {Tensor({4, 3}), Tensor({4})};
    Tensor gin = layer_backward(LayerSpec::dense(3, 4), {w, b}, x, u, grads);
    for (int i = 0; i < 3; ++i) {
        double expect = 0.0;
        for (int o = 0; o < 4; ++o) expect += w.at(o, i) * u[static_cast<std::size_t>(o)];
        CHECK(gin[static_cast<std::size_t>(i)] == doctest::Approx(expect));
    }
}

TEST_CASE("zero upstream gives zero gradients everywhere") {
    SurrogateModel model = tiny_mlp(21);
    Rng rng(22);
    Tensor x = random_tensor({6}, rng);
    model.forward(x);
    Tensor zero_u({2});
    const GradBundle g = model.backward(zero_u);
    for (const auto& lp : g.param_grads) {
        for (const Tensor& t : lp) {
            for (std::size_t i = 0; i < t.numel(); ++i) CHECK(t[i] == 0.0);
        }
    }
    for (std::size_t i = 0; i < g.input_grad.numel(); ++i) {
        CHECK(g.input_grad[i] == 0.0);
    }
}

TEST_CASE("backward without a forward cache is a usage error") {
    SurrogateModel model = tiny_mlp(31);
    Tensor u({2});
    CHECK_THROWS_AS(model.backward(u), UsageError);
}

TEST_CASE("tiny net gradients match central finite differences") {
    SurrogateModel model = tiny_mlp(41);
    Rng rng(42);
    Tensor x = random_tensor({6}, rng);
    PatternSet patterns = gen_orthogonal(2, 2);
    const LossHandle loss = combined_handle(patterns, 1, 0.5);
    const double err = finite_diff_check(model, x, loss, 1e-5);
    CHECK(err < 1e-6);
}

TEST_CASE("small conv net gradients match finite differences") {
    SurrogateModel model = SurrogateModel::build("small-conv", {1, 4, 4}, 4, 2, 77);
    Rng rng(78);
    Tensor x = random_tensor({1, 4, 4}, rng, 0.5);
    PatternSet patterns = gen_orthogonal(2, 2);
    const LossHandle loss = combined_handle(patterns, 0, 0.5);
    const double err = finite_diff_check(model, x, loss, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("maxpool ties route to the first maximal element") {
    Tensor in({1, 2, 2}, {1.0, 1.0, 1.0, 1.0});
    Tensor up({1, 1, 1}, {1.0});
    std::vector<Tensor> none;
    Tensor gin = layer_backward(LayerSpec::maxpool2d(), {}, in, up, none);
    CHECK(gin[0] == 1.0);
    CHECK(gin[1] == 0.0);
    CHECK(gin[2] == 0.0);
    CHECK(gin[3] == 0.0);
}
