#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusp/network.hpp"
#include "cusp/patterns.hpp"
#include "cusp/rng.hpp"
#include "cusp/tensor.hpp"

namespace cusp {

// All scores are oriented "higher = more uncertain".
struct ScoreRecord {
    std::string method;
    double score = 0.0;
    int predicted_class = -1;
    int true_class = -1;   // -1 when unknown
    int domain_flag = -1;  // 0 = in, 1 = out, -1 when not applicable
};

enum class ScoreDelta { Mse, Bce };

ScoreDelta score_delta_from_name(const std::string& name);

// Reconstruction distance between the surrogate activations and the pattern
// of the predicted class: mean over pixels of squared error, or of clamped
// binary cross entropy.
double cusp_score(const Tensor& surrogate, const Pattern& pattern, ScoreDelta delta);

double baseline_entropy(const Tensor& class_probs);
double baseline_largest(const Tensor& class_probs);     // 1 - max(y)
double baseline_functional(const Tensor& class_probs);  // 1 - (top1 - top2)
double baseline_random(Rng& rng);
double baseline_oracle(bool certain);  // 0 when certain, else 1

enum class BaselineMethod { Entropy, Largest, Functional, Random, Oracle };

double softmax_baseline(const Tensor& class_probs, BaselineMethod method,
                        Rng* rng = nullptr, const bool* certain = nullptr);

// Logit gap between the top two classes normalized by the distance between
// their classifier weight rows; returned as 1/(1+margin). Near-identical
// rows give uncertainty 1.
double geometrical_margin(const Tensor& class_logits, const Tensor& classifier_weights,
                          const Tensor& classifier_bias);

// Temperature-scaled max-softmax after a small input perturbation against
// the predicted-label NLL. Defaults follow the published method: T=1000,
// eps=0.0014. Returns 1 - max softmax(z(x~)/T).
double odin_score(SurrogateModel& model, const Tensor& x, double temperature = 1000.0,
                  double perturb_eps = 0.0014);

// One training/evaluation record for the secondary detector.
struct DetectorRecord {
    std::vector<double> surrogate;     // m reconstructed values
    std::vector<std::uint8_t> pattern; // m target bits (predicted class)
    double mse = 0.0;
    int label = 0;  // 1 = primary prediction was correct
};

struct DetectorTrainConfig {
    double gamma = 2.0;
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    int filters1 = 8;
    int filters2 = 16;
};

// Light CNN over [predicted pattern, target pattern] channels, with the
// scalar MSE score joined at the final dense layer; single sigmoid output.
class DetectorModel {
  public:
    static DetectorModel build(int side, int filters1, int filters2,
                               std::uint64_t seed);

    // Probability that the primary prediction is correct, in (0,1).
    double predict(const DetectorRecord& rec) const;

    // 1 - predict(rec): the uncertainty orientation.
    double uncertainty(const DetectorRecord& rec) const;

    int side() const { return side_; }

    friend DetectorModel train_detector(const std::vector<DetectorRecord>&,
                                        const DetectorTrainConfig&);

  private:
    double run(const DetectorRecord& rec, std::vector<Tensor>* cache,
               std::vector<double>* dense_input) const;

    int side_ = 0;
    std::vector<LayerSpec> conv_stack_;
    std::vector<std::vector<Tensor>> conv_params_;
    Tensor dense_w_;  // [1, flat+1]
    Tensor dense_b_;  // [1]
};

// Trains with focal BCE; throws UsageError("degenerate labels") when all
// records share one label.
DetectorModel train_detector(const std::vector<DetectorRecord>& records,
                             const DetectorTrainConfig& cfg);

double detector_score(const DetectorModel& detector, const Tensor& surrogate,
                      const Pattern& pattern, double mse);

DetectorRecord make_detector_record(const Tensor& surrogate, const Pattern& pattern,
                                    int label);

}  // namespace cusp
