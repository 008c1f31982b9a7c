#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cusp/data.hpp"
#include "cusp/network.hpp"
#include "cusp/patterns.hpp"

namespace cusp {

enum class OptimizerKind { Adam, SgdMomentum };

const char* optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& name);

struct TrainConfig {
    double alpha = 0.5;
    int epochs = 30;
    int batch_size = 64;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    double loss_total = 0.0;
    double loss_classification = 0.0;
    double loss_reconstruction = 0.0;
    double accuracy = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
};

// First-moment/second-moment (adam) or velocity (sgd-momentum) updates over
// a flat parameter vector.
class Optimizer {
  public:
    Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params);
    void step(std::vector<double>& params, const std::vector<double>& grads);

  private:
    OptimizerKind kind_;
    double lr_;
    int t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

using EpochCallback = std::function<void(int epoch, const SurrogateModel& model)>;

// Minibatch training of the combined classification + reconstruction
// objective. L1 is averaged over the batch; L2 is summed over pixels and
// averaged over the batch. Bit-reproducible for a fixed seed. Throws
// NumericError (with epoch/batch) if the loss goes non-finite.
TrainReport train(SurrogateModel& model, const Dataset& data,
                  const PatternSet& patterns, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace cusp
