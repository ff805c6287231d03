#include "dimred/kernels.hpp"

#include "dimred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace dimred {

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::polynomial: return "polynomial";
  }
  return "linear";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "polynomial") return KernelKind::polynomial;
  fail(Err::ConfigError, "unknown kernel kind '" + name + "'");
}

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(sigma > 0.0))
    fail(Err::ConfigError, "rbf kernel requires sigma > 0");
  if (kind == KernelKind::polynomial && degree < 1)
    fail(Err::ConfigError, "polynomial kernel requires degree >= 1");
}

namespace {

// Pairwise squared distances between columns of a and b.
Matrix squared_distances(const Matrix& a, const Matrix& b) {
  const Vector na = a.colwise().squaredNorm();
  const Vector nb = b.colwise().squaredNorm();
  Matrix d2 = (-2.0 * (a.transpose() * b));
  d2.colwise() += na;
  d2.rowwise() += nb.transpose();
  return d2.cwiseMax(0.0);
}

Matrix evaluate(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::linear:
      return a.transpose() * b;
    case KernelKind::rbf: {
      const double denom = 2.0 * spec.sigma * spec.sigma;
      return (-squared_distances(a, b) / denom).array().exp();
    }
    case KernelKind::polynomial: {
      Matrix base = (a.transpose() * b).array() + spec.offset;
      Matrix out = Matrix::Ones(base.rows(), base.cols());
      for (int i = 0; i < spec.degree; ++i) out = out.cwiseProduct(base);
      return out;
    }
  }
  fail(Err::ConfigError, "unhandled kernel kind");
}

}  // namespace

Matrix gram_matrix(const Matrix& x, const KernelSpec& spec) {
  spec.validate();
  require_finite(x, "gram_matrix input");
  if (x.cols() < 1) fail(Err::DimensionMismatch, "gram_matrix needs at least one column");
  Matrix k = evaluate(x, x, spec);
  k = 0.5 * (k + k.transpose());
  if (spec.kind == KernelKind::rbf) k.diagonal().setOnes();
  return k;
}

Matrix center_gram(const Matrix& k) {
  if (k.rows() != k.cols()) fail(Err::DimensionMismatch, "center_gram input must be square");
  require_finite(k, "center_gram input");
  const Index n = k.rows();
  const Vector row_mean = k.rowwise().mean();
  const double total_mean = k.mean();
  Matrix out = k;
  out.colwise() -= row_mean;
  out.rowwise() -= row_mean.transpose();
  out.array() += total_mean;
  return 0.5 * (out + out.transpose());
}

Matrix cross_kernel(const Matrix& train, const Matrix& query, const KernelSpec& spec) {
  spec.validate();
  require_finite(train, "cross_kernel train");
  require_finite(query, "cross_kernel query");
  if (train.rows() != query.rows())
    fail(Err::DimensionMismatch, "cross_kernel feature dimensions differ");
  return evaluate(train, query, spec);
}

double median_pairwise_sigma(const Matrix& x) {
  const Index n = x.cols();
  const Index cap = std::min<Index>(n, 500);
  std::vector<Index> pick(cap);
  for (Index i = 0; i < cap; ++i) pick[i] = i * n / cap;

  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(cap) * (cap - 1) / 2);
  for (Index i = 0; i < cap; ++i)
    for (Index j = i + 1; j < cap; ++j) {
      const double d = (x.col(pick[i]) - x.col(pick[j])).norm();
      if (d > 0.0) dists.push_back(d);
    }
  if (dists.empty()) return 1.0;
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

}  // namespace dimred
