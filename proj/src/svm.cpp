#include "dimred/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dimred/error.hpp"
#include "dimred/metrics.hpp"

namespace dimred {

namespace {

constexpr double kTau = 1e-12;

double primal_objective(const Matrix& x, const std::vector<int>& y, const Vector& w,
                        double b, double cost) {
  double hinge = 0.0;
  const Vector f = x.transpose() * w;
  for (Index t = 0; t < x.cols(); ++t)
    hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(t)] * (f(t) + b));
  return 0.5 * w.squaredNorm() + cost * hinge;
}

}  // namespace

LinearSvmModel train_svm(const Matrix& x, const std::vector<int>& y, double cost,
                         std::uint64_t /*seed*/) {
  const Index n = x.cols();
  if (static_cast<Index>(y.size()) != n) fail(Err::DimensionMismatch, "label count mismatch");
  if (!(cost > 0.0)) fail(Err::ConfigError, "svm cost must be positive");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else fail(Err::ConfigError, "labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) fail(Err::SingleClass, "training labels contain a single class");

  const Vector qd = x.colwise().squaredNorm();  // K(t, t)
  Vector alpha = Vector::Zero(n);
  Vector w = Vector::Zero(x.rows());
  Vector f = Vector::Zero(n);  // w . x_t, maintained incrementally

  const auto yv = [&](Index t) { return static_cast<double>(y[static_cast<std::size_t>(t)]); };
  const auto in_up = [&](Index t) {
    return yv(t) > 0 ? alpha(t) < cost : alpha(t) > 0.0;
  };
  const auto in_low = [&](Index t) {
    return yv(t) > 0 ? alpha(t) > 0.0 : alpha(t) < cost;
  };

  const int max_iter = 2000000;
  int it = 0;
  double m_up = 0.0, m_low = 0.0;
  for (; it < max_iter; ++it) {
    // First-order pick for i, second-order pick for j.
    Index i = -1;
    m_up = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      if (!in_up(t)) continue;
      const double v = yv(t) - f(t);  // -y grad
      if (v > m_up) {
        m_up = v;
        i = t;
      }
    }
    m_low = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      m_low = std::min(m_low, yv(t) - f(t));
    }
    if (i < 0 || m_up - m_low <= 1e-12) break;

    const Vector ki = x.transpose() * x.col(i);  // kernel row of i
    Index j = -1;
    double best_gain = 0.0;
    for (Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double vt = yv(t) - f(t);
      const double b_it = m_up - vt;
      if (b_it <= 0.0) continue;
      double a_it = qd(i) + qd(t) - 2.0 * ki(t);  // |x_i - x_t|^2
      if (a_it <= 0.0) a_it = kTau;
      const double gain = -(b_it * b_it) / a_it;
      if (gain < best_gain) {
        best_gain = gain;
        j = t;
      }
    }
    if (j < 0) break;

    // Analytic two-variable update with box clipping.
    const double grad_i = yv(i) * f(i) - 1.0;
    const double grad_j = yv(j) * f(j) - 1.0;
    const double old_ai = alpha(i), old_aj = alpha(j);
    if (y[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(j)]) {
      double quad = qd(i) + qd(j) - 2.0 * ki(j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_i - grad_j) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) { alpha(j) = 0.0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0.0) { alpha(i) = 0.0; alpha(j) = -diff; }
      }
      if (diff > 0.0) {
        if (alpha(i) > cost) { alpha(i) = cost; alpha(j) = cost - diff; }
      } else {
        if (alpha(j) > cost) { alpha(j) = cost; alpha(i) = cost + diff; }
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * ki(j);
      if (quad <= 0.0) quad = kTau;  // degenerate pair, take a tiny safe step
      const double delta = (grad_i - grad_j) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > cost) {
        if (alpha(i) > cost) { alpha(i) = cost; alpha(j) = sum - cost; }
        if (alpha(j) > cost) { alpha(j) = cost; alpha(i) = sum - cost; }
      } else {
        if (alpha(j) < 0.0) { alpha(j) = 0.0; alpha(i) = sum; }
        if (alpha(i) < 0.0) { alpha(i) = 0.0; alpha(j) = sum; }
      }
    }

    const double di = (alpha(i) - old_ai) * yv(i);
    const double dj = (alpha(j) - old_aj) * yv(j);
    if (di == 0.0 && dj == 0.0) break;  // numerically stuck
    const Vector dw = di * x.col(i) + dj * x.col(j);
    w += dw;
    f += x.transpose() * dw;

    // Certify the solution via the duality gap now and then.
    if ((it & 63) == 63) {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      double free_sum = 0.0;
      int free_count = 0;
      for (Index t = 0; t < n; ++t) {
        const double v = yv(t) - f(t);
        if (alpha(t) > kTau * cost && alpha(t) < cost * (1.0 - 1e-12)) {
          free_sum += v;
          ++free_count;
        } else {
          if (in_up(t)) lo = std::max(lo, v);
          if (in_low(t)) hi = std::min(hi, v);
        }
      }
      double b;
      if (free_count > 0) b = free_sum / free_count;
      else if (std::isfinite(lo) && std::isfinite(hi)) b = 0.5 * (lo + hi);
      else b = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
      const double primal = primal_objective(x, y, w, b, cost);
      const double dual = alpha.sum() - 0.5 * w.squaredNorm();
      if (primal - dual <= 1e-6 * std::max(1.0, std::abs(primal))) {
        ++it;
        break;
      }
    }
  }

  LinearSvmModel model;
  model.cost = cost;
  model.iterations = it;
  model.weights = w;

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_count = 0;
  for (Index t = 0; t < n; ++t) {
    const double v = yv(t) - f(t);
    if (alpha(t) > kTau * cost && alpha(t) < cost * (1.0 - 1e-12)) {
      free_sum += v;
      ++free_count;
    } else {
      if (in_up(t)) lo = std::max(lo, v);
      if (in_low(t)) hi = std::min(hi, v);
    }
  }
  if (free_count > 0) model.bias = free_sum / free_count;
  else if (std::isfinite(lo) && std::isfinite(hi)) model.bias = 0.5 * (lo + hi);
  else model.bias = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);

  model.objective = primal_objective(x, y, model.weights, model.bias, cost);
  return model;
}

Vector decision_scores(const LinearSvmModel& model, const Matrix& x) {
  if (x.rows() != model.weights.size())
    fail(Err::DimensionMismatch, "decision_scores dimension mismatch");
  return (x.transpose() * model.weights).array() + model.bias;
}

TuneResult tune(const Matrix& x, const std::vector<int>& y,
                const std::vector<std::string>& subjects, const TuningGrid& grid,
                int folds, std::uint64_t seed) {
  if (grid.cost_values.empty()) fail(Err::ConfigError, "empty cost grid");
  const std::vector<int> fold_of = subject_folds(subjects, folds, seed);
  const Index n = x.cols();

  TuneResult out;
  out.mean_f1.assign(grid.cost_values.size(), 0.0);
  double best = -1.0;
  for (std::size_t g = 0; g < grid.cost_values.size(); ++g) {
    const double cost = grid.cost_values[g];
    double sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Index> tr, va;
      for (Index t = 0; t < n; ++t)
        (fold_of[static_cast<std::size_t>(t)] == f ? va : tr).push_back(t);
      if (tr.empty() || va.empty()) continue;  // fold F1 counts as 0
      Matrix xtr(x.rows(), static_cast<Index>(tr.size()));
      Matrix xva(x.rows(), static_cast<Index>(va.size()));
      std::vector<int> ytr, yva;
      for (std::size_t t = 0; t < tr.size(); ++t) {
        xtr.col(static_cast<Index>(t)) = x.col(tr[t]);
        ytr.push_back(y[static_cast<std::size_t>(tr[t])]);
      }
      for (std::size_t t = 0; t < va.size(); ++t) {
        xva.col(static_cast<Index>(t)) = x.col(va[t]);
        yva.push_back(y[static_cast<std::size_t>(va[t])]);
      }
      try {
        const LinearSvmModel model = train_svm(xtr, ytr, cost, seed);
        const Vector scores = decision_scores(model, xva);
        ConfusionCounts c;
        for (Index t = 0; t < scores.size(); ++t) {
          const bool pred = scores(t) > 0.0;
          const bool truth = yva[static_cast<std::size_t>(t)] == 1;
          if (pred && truth) ++c.tp;
          else if (pred && !truth) ++c.fp;
          else if (!pred && truth) ++c.fn;
          else ++c.tn;
        }
        sum += f1_score(c);
      } catch (const Error& e) {
        if (e.code() != Err::SingleClass) throw;
        // Degenerate fold: contributes F1 = 0.
      }
    }
    const double mean = sum / folds;
    out.mean_f1[g] = mean;
    if (mean > best || (mean == best && cost < out.best_cost)) {
      best = mean;
      out.best_cost = cost;
      out.best_index = g;
    }
  }
  return out;
}

}  // namespace dimred
