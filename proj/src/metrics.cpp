#include "cusp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "cusp/errors.hpp"

namespace cusp {

double RocCurve::trapezoid_area() const {
    // Points run from threshold 0 (TPR=FPR=1) toward threshold 1; integrate
    // over FPR in ascending order.
    std::vector<RocPoint> pts = points;
    std::sort(pts.begin(), pts.end(),
              [](const RocPoint& a, const RocPoint& b) { return a.fpr < b.fpr; });
    double area = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    for (const RocPoint& p : pts) {
        area += (p.fpr - prev_fpr) * (p.tpr + prev_tpr) / 2.0;
        prev_fpr = p.fpr;
        prev_tpr = p.tpr;
    }
    area += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    return area;
}

void RocCurve::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ROC csv: " + path);
    out << "threshold,tpr,fpr\n";
    out.precision(17);
    for (const RocPoint& p : points) {
        out << p.threshold << "," << p.tpr << "," << p.fpr << "\n";
    }
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths) {
    if (predictions.empty() || predictions.size() != truths.size()) {
        throw UsageError("accuracy: empty or mismatched inputs");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        hits += predictions[i] == truths[i];
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw UsageError("auc: empty or mismatched inputs");
    }
    std::size_t n_pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw UsageError("auc: labels must be 0/1");
        n_pos += static_cast<std::size_t>(l);
    }
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UsageError("auc: both classes must be present");
    }

    // Average ranks with ties, then the Mann-Whitney U statistic.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<double> minmax_normalize(const std::vector<double>& scores) {
    if (scores.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(scores.size(), 0.0);
    if (hi > lo) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            out[i] = (scores[i] - lo) / (hi - lo);
        }
    }
    return out;
}

RocCurve roc_100(const std::vector<double>& normalized_scores,
                 const std::vector<int>& labels) {
    if (normalized_scores.size() != labels.size() || normalized_scores.empty()) {
        throw UsageError("roc_100: empty or mismatched inputs");
    }
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += static_cast<std::size_t>(l);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UsageError("roc_100: both classes must be present");
    }

    RocCurve curve;
    for (int k = 0; k < 100; ++k) {
        const double t = static_cast<double>(k) / 99.0;
        std::size_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < normalized_scores.size(); ++i) {
            if (normalized_scores[i] >= t) {
                if (labels[i] == 1) {
                    ++tp;
                } else {
                    ++fp;
                }
            }
        }
        curve.points.push_back({t, static_cast<double>(tp) / static_cast<double>(n_pos),
                                static_cast<double>(fp) / static_cast<double>(n_neg)});
    }
    return curve;
}

}  // namespace cusp
