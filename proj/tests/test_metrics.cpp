#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dimred/metrics.hpp"
#include "dimred/rng.hpp"

using namespace dimred;

namespace {

// Pairwise ranking statistic with half credit for ties.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  long long wins2 = 0;  // 2*wins + ties
  long pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j]) wins2 += 2;
      else if (scores[i] == scores[j]) wins2 += 1;
    }
  }
  for (int l : labels) neg += l != 1;
  return static_cast<double>(wins2) / (2.0 * pos * neg);
}

}  // namespace

TEST_CASE("roc trivial cases") {
  CHECK(roc_and_auc({0.9, 0.1}, {1, 0}).auc == 1.0);
  CHECK(roc_and_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}).auc == 0.5);
  try {
    roc_and_auc({1.0, 2.0}, {1, 1});
    FAIL("expected SingleClass");
  } catch (const Error& e) {
    CHECK(e.code() == Err::SingleClass);
  }
}

TEST_CASE("roc curve structure and exact pairwise equality") {
  Rng rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 10 + static_cast<int>(rng.below(40));
    std::vector<double> scores;
    std::vector<int> labels;
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      // coarse grid scores force plenty of ties
      scores.push_back(std::floor(rng.uniform() * 8.0) / 8.0);
      labels.push_back(rng.uniform() < 0.4 ? 1 : 0);
      pos += labels.back();
    }
    if (pos == 0 || pos == n) {
      labels[0] = 1 - labels[0];
    }
    const RocCurve roc = roc_and_auc(scores, labels);
    CHECK(std::abs(roc.auc - pairwise_auc(scores, labels)) <= 1e-12);

    CHECK(roc.points.front() == std::make_pair(0.0, 0.0));
    CHECK(roc.points.back() == std::make_pair(1.0, 1.0));
    double trapezoid = 0.0;
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].first >= roc.points[i - 1].first);
      CHECK(roc.points[i].second >= roc.points[i - 1].second);
      trapezoid += (roc.points[i].first - roc.points[i - 1].first) *
                   (roc.points[i].second + roc.points[i - 1].second) / 2.0;
    }
    CHECK(std::abs(trapezoid - roc.auc) <= 1e-12);

    // invariance under strictly increasing transforms
    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::exp(2.0 * s) + 1.0);
    CHECK(roc_and_auc(warped, labels).auc == roc.auc);
  }
}

TEST_CASE("f1 closed forms") {
  // precision = recall = 0.5
  CHECK(f1_score({5, 5, 0, 5}) == doctest::Approx(0.5));
  CHECK(f1_score({0, 3, 4, 2}) == 0.0);
  // tp=8 fp=2 fn=4: F1 = 8/11
  CHECK(f1_score({8, 2, 0, 4}) == doctest::Approx(8.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("kappa closed forms are exact") {
  CHECK(cohens_kappa({10, 0, 10, 0}) == 1.0);
  // independent predictions (tp*tn == fp*fn) sit exactly at chance
  CHECK(cohens_kappa({8, 2, 8, 32}) == 0.0);
  CHECK(cohens_kappa({30, 30, 20, 20}) == 0.0);
  // hand-computed marginals: p_o = 0.7, p_e = 0.5
  CHECK(cohens_kappa({40, 20, 30, 10}) == 0.4);
  // degenerate marginals
  CHECK(cohens_kappa({5, 0, 0, 0}) == 0.0);
}

TEST_CASE("confusion_at thresholds on >=") {
  const std::vector<double> scores = {0.1, 0.5, 0.9};
  const std::vector<int> labels = {0, 1, 1};
  const ConfusionCounts c = confusion_at(scores, labels, 0.5);
  CHECK(c.tp == 2);
  CHECK(c.fp == 0);
  CHECK(c.tn == 1);
  CHECK(c.fn == 0);
}

TEST_CASE("best_f1_threshold maximizes over observed scores") {
  const std::vector<double> scores = {0.1, 0.2, 0.7, 0.8, 0.9};
  const std::vector<int> labels = {0, 0, 1, 1, 0};
  const double t = best_f1_threshold(scores, labels);
  // Exhaustive check over candidate thresholds.
  double best = -1.0;
  for (double cand : scores) {
    const double f1 = f1_score(confusion_at(scores, labels, cand));
    best = std::max(best, f1);
  }
  CHECK(f1_score(confusion_at(scores, labels, t)) == best);
}

TEST_CASE("subject folds") {
  std::vector<std::string> subjects;
  for (int s = 0; s < 10; ++s)
    for (int r = 0; r < 7; ++r) subjects.push_back("s" + std::to_string(s));

  const auto folds = subject_folds(subjects, 5, 11);
  // every sample of a subject shares a fold
  std::map<std::string, int> fold_of;
  std::map<int, std::set<std::string>> members;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    auto it = fold_of.find(subjects[i]);
    if (it == fold_of.end()) fold_of[subjects[i]] = folds[i];
    else CHECK(it->second == folds[i]);
    members[folds[i]].insert(subjects[i]);
  }
  // 10 subjects over 5 folds: 2 subjects per fold, disjoint
  CHECK(members.size() == 5);
  for (const auto& [f, subs] : members) CHECK(subs.size() == 2);

  // leave-one-subject-out
  const auto loso = subject_folds(subjects, 10, 3);
  std::set<int> distinct(loso.begin(), loso.end());
  CHECK(distinct.size() == 10);

  // determinism
  CHECK(subject_folds(subjects, 5, 11) == folds);

  try {
    subject_folds(subjects, 11, 0);
    FAIL("expected TooFewSubjects");
  } catch (const Error& e) {
    CHECK(e.code() == Err::TooFewSubjects);
  }
}

TEST_CASE("downsample honors the positive/negative ratio") {
  // 100 positives, 5000 negatives, ratio 10 -> 100 + 1000 retained
  std::vector<int> labels(5100, 0);
  std::vector<std::string> subjects(5100, "s");
  for (int i = 0; i < 100; ++i) labels[static_cast<std::size_t>(i * 51)] = 1;

  const DownsampleResult r = downsample(labels, subjects, 0.2, 10.0, 5);
  long pos = 0, neg = 0;
  for (Index i : r.indices) (labels[static_cast<std::size_t>(i)] == 1 ? pos : neg)++;
  CHECK(pos == 100);
  CHECK(neg == 1000);
  CHECK(std::is_sorted(r.indices.begin(), r.indices.end()));

  // determinism
  const DownsampleResult again = downsample(labels, subjects, 0.2, 10.0, 5);
  CHECK(again.indices == r.indices);
  const DownsampleResult other = downsample(labels, subjects, 0.2, 10.0, 6);
  CHECK(other.indices != r.indices);
}

TEST_CASE("downsample truncates when negatives run short") {
  std::vector<int> labels(60, 1);
  for (int i = 0; i < 50; ++i) labels[static_cast<std::size_t>(i)] = 1;
  for (int i = 50; i < 60; ++i) labels[static_cast<std::size_t>(i)] = 0;
  std::vector<std::string> subjects(60, "s");
  const DownsampleResult r = downsample(labels, subjects, 1.0, 10.0, 1);
  long neg = 0;
  for (Index i : r.indices) neg += labels[static_cast<std::size_t>(i)] == 0;
  CHECK(neg == 10);  // all available negatives
  CHECK(!r.warnings.empty());
}

TEST_CASE("downsample requires positives") {
  try {
    downsample(std::vector<int>(5, 0), std::vector<std::string>(5, "s"), 0.5, 2.0, 1);
    FAIL("expected NoPositives");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NoPositives);
  }
}
