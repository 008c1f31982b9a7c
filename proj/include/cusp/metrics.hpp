#pragma once

#include <string>
#include <vector>

namespace cusp {

struct RocPoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;

    // Trapezoidal area in (FPR, TPR), for cross-checking against auc().
    double trapezoid_area() const;

    void write_csv(const std::string& path) const;
};

// Fraction of exact matches; throws UsageError on empty or mismatched input.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths);

// Mann-Whitney rank AUC with half-credit ties. Scores are oriented
// "higher = positive class"; labels are 0/1 and both must occur.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Min-max normalization to [0,1]; constant input maps to all zeros.
std::vector<double> minmax_normalize(const std::vector<double>& scores);

// Fixed grid t_k = k/99, k = 0..99; positive call is score >= t_k. Scores
// must already be normalized to [0,1].
RocCurve roc_100(const std::vector<double>& normalized_scores,
                 const std::vector<int>& labels);

}  // namespace cusp
