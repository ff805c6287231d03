#pragma once

#include <vector>

#include "dimred/linalg.hpp"
#include "dimred/rng.hpp"
#include "dimred/types.hpp"

namespace testutil {

using dimred::Index;
using dimred::Matrix;
using dimred::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  dimred::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix a = random_matrix(n, n, seed);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_spd(Index n, std::uint64_t seed) {
  const Matrix a = random_matrix(n, n, seed);
  return a * a.transpose() + Matrix::Identity(n, n);
}

// Largest principal angle (radians) between the column spaces of a and b,
// via the sine form (accurate for tiny angles).
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qa(a), qb(b);
  const Matrix ua = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix ub = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Matrix residual = ub - ua * (ua.transpose() * ub);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = std::clamp(svd.singularValues().maxCoeff(), 0.0, 1.0);
  return std::asin(s);
}

inline double cosine(const Vector& a, const Vector& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

// Spearman rank correlation.
inline double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

}  // namespace testutil
