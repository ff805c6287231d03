#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dimred/error.hpp"
#include "dimred/types.hpp"

namespace dimred {

struct ConfusionCounts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

// Threshold-sweep ROC from (0,0) to (1,1); `auc` is the trapezoidal area,
// which coincides with the tie-half-credit pairwise ranking statistic.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
  double auc = 0.0;
};

RocCurve roc_and_auc(const std::vector<double>& scores, const std::vector<int>& labels01);

// 2 tp / (2 tp + fp + fn); 0 when no true or predicted positives exist.
double f1_score(const ConfusionCounts& c);

// Chance-corrected agreement from the marginals; 0 when chance agreement is 1.
double cohens_kappa(const ConfusionCounts& c);

// Predictions are score >= threshold.
ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels01, double threshold);

// Threshold (taken from the observed scores) maximizing F1; ties prefer the
// larger threshold.
double best_f1_threshold(const std::vector<double>& scores, const std::vector<int>& labels01);

// Subjects are sorted, shuffled by seed, and dealt round-robin; returns the
// fold id of every sample. All samples of a subject share a fold.
std::vector<int> subject_folds(const std::vector<std::string>& subjects, int folds,
                               std::uint64_t seed);

struct DownsampleResult {
  std::vector<Index> indices;  // ascending original positions
  std::vector<std::string> warnings;
};

// Keeps positives up to floor(keep_fraction * n), then seeded-uniform
// negatives at neg_per_pos per kept positive (truncated when scarce).
DownsampleResult downsample(const std::vector<int>& labels01,
                            const std::vector<std::string>& subjects,
                            double keep_fraction, double neg_per_pos,
                            std::uint64_t seed);

}  // namespace dimred
