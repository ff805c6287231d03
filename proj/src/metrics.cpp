#include "dimred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "dimred/error.hpp"
#include "dimred/rng.hpp"

namespace dimred {

RocCurve roc_and_auc(const std::vector<double>& scores, const std::vector<int>& labels01) {
  if (scores.size() != labels01.size())
    fail(Err::DimensionMismatch, "scores/labels length mismatch");
  long pos = 0, neg = 0;
  for (int l : labels01) (l == 1 ? pos : neg)++;
  if (pos == 0 || neg == 0) fail(Err::SingleClass, "roc needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  long tp = 0, fp = 0;
  // Integer trapezoid accumulation keeps the area exactly equal to the
  // pairwise statistic up to the single final division.
  long long area2 = 0;  // 2 * area * pos * neg
  std::size_t i = 0;
  while (i < order.size()) {
    // Group tied scores into one sweep step.
    const double s = scores[order[i]];
    long dtp = 0, dfp = 0;
    while (i < order.size() && scores[order[i]] == s) {
      (labels01[order[i]] == 1 ? dtp : dfp)++;
      ++i;
    }
    area2 += static_cast<long long>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.emplace_back(static_cast<double>(fp) / neg, static_cast<double>(tp) / pos);
  }
  if (roc.points.back() != std::make_pair(1.0, 1.0)) roc.points.emplace_back(1.0, 1.0);
  roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

double f1_score(const ConfusionCounts& c) {
  const long denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0 || c.tp == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double cohens_kappa(const ConfusionCounts& c) {
  const long t = c.total();
  if (t == 0) fail(Err::DimensionMismatch, "kappa needs at least one sample");
  // Exact rational form: kappa = (t*(tp+tn) - e) / (t^2 - e) with the chance
  // term e accumulated from the marginals.
  const long long e = static_cast<long long>(c.tp + c.fp) * (c.tp + c.fn) +
                      static_cast<long long>(c.fn + c.tn) * (c.fp + c.tn);
  const long long num = static_cast<long long>(t) * (c.tp + c.tn) - e;
  const long long den = static_cast<long long>(t) * t - e;
  if (den == 0) return 0.0;  // chance agreement is 1
  return static_cast<double>(num) / static_cast<double>(den);
}

ConfusionCounts confusion_at(const std::vector<double>& scores,
                             const std::vector<int>& labels01, double threshold) {
  if (scores.size() != labels01.size())
    fail(Err::DimensionMismatch, "scores/labels length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels01[i] == 1;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double best_f1_threshold(const std::vector<double>& scores, const std::vector<int>& labels01) {
  if (scores.empty() || scores.size() != labels01.size())
    fail(Err::DimensionMismatch, "scores/labels length mismatch");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  long total_pos = 0;
  for (int l : labels01) total_pos += l == 1;

  // Sweep thresholds downward; predictions are score >= threshold.
  double best_f1 = -1.0, best_t = scores[order[0]];
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      (labels01[order[i]] == 1 ? tp : fp)++;
      ++i;
    }
    const long denom = 2 * tp + fp + (total_pos - tp);
    const double f1 = (denom == 0 || tp == 0)
                          ? 0.0
                          : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

std::vector<int> subject_folds(const std::vector<std::string>& subjects, int folds,
                               std::uint64_t seed) {
  if (folds < 1) fail(Err::ConfigError, "fold count must be positive");
  std::set<std::string> unique(subjects.begin(), subjects.end());
  if (static_cast<int>(unique.size()) < folds)
    fail(Err::TooFewSubjects, "need at least " + std::to_string(folds) +
                                  " distinct subjects, have " + std::to_string(unique.size()));

  std::vector<std::string> ordered(unique.begin(), unique.end());
  Rng rng(derive_seed(seed, "subject_folds"));
  rng.shuffle(ordered);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < ordered.size(); ++i)
    fold_of[ordered[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  std::vector<int> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) out.push_back(fold_of[s]);
  return out;
}

DownsampleResult downsample(const std::vector<int>& labels01,
                            const std::vector<std::string>& subjects,
                            double keep_fraction, double neg_per_pos,
                            std::uint64_t seed) {
  if (subjects.size() != labels01.size())
    fail(Err::DimensionMismatch, "labels/subjects length mismatch");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    fail(Err::ConfigError, "keep_fraction must lie in (0, 1]");
  if (neg_per_pos < 0.0) fail(Err::ConfigError, "neg_per_pos must be nonnegative");

  std::vector<Index> pos_idx, neg_idx;
  for (std::size_t i = 0; i < labels01.size(); ++i)
    (labels01[i] == 1 ? pos_idx : neg_idx).push_back(static_cast<Index>(i));
  if (pos_idx.empty()) fail(Err::NoPositives, "no positive samples to retain");

  DownsampleResult out;
  Rng rng(derive_seed(seed, "downsample"));

  const std::size_t pos_budget = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(keep_fraction * static_cast<double>(labels01.size()))));
  std::vector<Index> kept_pos = pos_idx;
  if (kept_pos.size() > pos_budget) {
    const auto pick = rng.sample_indices(kept_pos.size(), pos_budget);
    std::vector<Index> sub;
    sub.reserve(pick.size());
    for (std::size_t p : pick) sub.push_back(kept_pos[p]);
    kept_pos = std::move(sub);
    out.warnings.push_back("positives truncated to the keep_fraction budget (" +
                           std::to_string(pos_budget) + ")");
  }

  std::size_t neg_target =
      static_cast<std::size_t>(std::llround(neg_per_pos * static_cast<double>(kept_pos.size())));
  if (neg_target > neg_idx.size()) {
    out.warnings.push_back("only " + std::to_string(neg_idx.size()) +
                           " negatives available for a target of " + std::to_string(neg_target));
    neg_target = neg_idx.size();
  }
  std::vector<Index> kept_neg;
  kept_neg.reserve(neg_target);
  for (std::size_t p : rng.sample_indices(neg_idx.size(), neg_target))
    kept_neg.push_back(neg_idx[p]);

  out.indices = std::move(kept_pos);
  out.indices.insert(out.indices.end(), kept_neg.begin(), kept_neg.end());
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

}  // namespace dimred
