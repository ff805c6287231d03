#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dimred/types.hpp"

namespace dimred {

struct LinearSvmModel {
  Vector weights;
  double bias = 0.0;
  double cost = 1.0;
  double objective = 0.0;  // primal value at the returned solution
  int iterations = 0;
};

// Hinge-loss linear SVM: minimizes 0.5|w|^2 + C sum max(0, 1 - y(w.x + b)).
// Solved in the dual by maximal-violating-pair updates; fully deterministic
// (the seed is part of the contract but the solver draws nothing).
LinearSvmModel train_svm(const Matrix& x, const std::vector<int>& y, double cost,
                         std::uint64_t seed = 0);

Vector decision_scores(const LinearSvmModel& model, const Matrix& x);

struct TuningGrid {
  std::vector<double> cost_values;
  // Per-method reduction parameter lists; consumed by the experiment runner,
  // which refits the reduction inside each fold.
  std::map<std::string, std::vector<double>> dr_params;
};

struct TuneResult {
  double best_cost = 1.0;
  std::size_t best_index = 0;
  std::vector<double> mean_f1;  // one entry per cost value
};

// Subject-wise cross-validated F1 (decision threshold 0) over the cost grid
// on a fixed embedding. Ties break toward smaller C, then first occurrence.
TuneResult tune(const Matrix& x, const std::vector<int>& y,
                const std::vector<std::string>& subjects, const TuningGrid& grid,
                int folds, std::uint64_t seed = 0);

}  // namespace dimred
