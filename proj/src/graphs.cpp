#include "dimred/graphs.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "dimred/linalg.hpp"

namespace dimred {

Vector AffinityGraph::degree() const {
  Vector deg = Vector::Zero(weights.rows());
  for (int j = 0; j < weights.outerSize(); ++j)
    for (SpMatrix::InnerIterator it(weights, j); it; ++it) deg(it.row()) += it.value();
  return deg;
}

SpMatrix AffinityGraph::laplacian() const {
  const Vector deg = degree();
  SpMatrix lap = -weights;
  for (Index i = 0; i < lap.rows(); ++i) lap.coeffRef(i, i) += deg(i);
  lap.makeCompressed();
  return lap;
}

std::vector<std::vector<Index>> knn_lists(const Matrix& d, int p) {
  const Index n = d.cols();
  if (p < 1 || p >= n) fail(Err::TooFewSamples, "need 1 <= p < n neighbors");
  require_finite(d, "knn input");

  const Vector sq = d.colwise().squaredNorm();
  std::vector<std::vector<Index>> lists(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> cand(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    const Vector dots = d.transpose() * d.col(i);
    std::size_t m = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dist2 = std::max(0.0, sq(i) + sq(j) - 2.0 * dots(j));
      cand[m++] = {dist2, j};
    }
    std::partial_sort(cand.begin(), cand.begin() + p, cand.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first < b.first;
                        return a.second < b.second;
                      });
    auto& out = lists[static_cast<std::size_t>(i)];
    out.reserve(static_cast<std::size_t>(p));
    for (int t = 0; t < p; ++t) out.push_back(cand[static_cast<std::size_t>(t)].second);
  }
  return lists;
}

namespace {

SpMatrix symmetrize(const std::vector<std::vector<Index>>& lists, Index n, bool mutual) {
  std::vector<std::unordered_set<Index>> directed(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j : lists[static_cast<std::size_t>(i)])
      directed[static_cast<std::size_t>(i)].insert(j);

  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < n; ++i) {
    for (Index j : lists[static_cast<std::size_t>(i)]) {
      const bool back = directed[static_cast<std::size_t>(j)].count(i) > 0;
      const bool keep = mutual ? back : true;
      if (!keep) continue;
      if (i < j || !back) {  // emit each undirected edge once
        const Index a = std::min(i, j), b = std::max(i, j);
        trip.emplace_back(a, b, 1.0);
        trip.emplace_back(b, a, 1.0);
      }
    }
  }
  SpMatrix w(n, n);
  w.setFromTriplets(trip.begin(), trip.end(),
                    [](const double&, const double& b) { return b; });
  w.makeCompressed();
  return w;
}

}  // namespace

AffinityGraph knn_graph(const Matrix& d, int p, bool mutual) {
  const auto lists = knn_lists(d, p);
  return AffinityGraph{symmetrize(lists, d.cols(), mutual)};
}

LleWeights lle_weights(const Matrix& d, int p, double reg) {
  const Index n = d.cols();
  if (reg < 0.0) fail(Err::ConfigError, "lle_weights reg must be nonnegative");
  const auto lists = knn_lists(d, p);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
  for (Index i = 0; i < n; ++i) {
    const auto& nb = lists[static_cast<std::size_t>(i)];
    Matrix diff(d.rows(), p);
    for (int t = 0; t < p; ++t) diff.col(t) = d.col(nb[static_cast<std::size_t>(t)]) - d.col(i);
    Matrix local = diff.transpose() * diff;
    const double shift = reg * local.trace() / static_cast<double>(p);
    local.diagonal().array() += shift;

    Eigen::LDLT<Matrix> ldlt(local);
    Vector w = ldlt.solve(Vector::Ones(p));
    const double total = w.sum();
    if (!w.allFinite() || std::abs(total) < 1e-300)
      fail(Err::SingularLocalGram,
           "local Gram system unsolvable at sample " + std::to_string(i) +
               (reg == 0.0 ? " (reg = 0)" : ""));
    w /= total;
    for (int t = 0; t < p; ++t) trip.emplace_back(nb[static_cast<std::size_t>(t)], i, w(t));
  }

  LleWeights out;
  out.weights = SpMatrix(n, n);
  out.weights.setFromTriplets(trip.begin(), trip.end());
  out.weights.makeCompressed();
  out.objective = (d - d * out.weights).squaredNorm();
  return out;
}

AffinityGraph heat_affinity(const Matrix& d, const AffinityGraph& graph,
                            std::optional<double> sigma) {
  if (graph.size() != d.cols())
    fail(Err::DimensionMismatch, "heat_affinity graph/data size mismatch");
  if (!sigma) return graph;
  if (!(*sigma > 0.0)) fail(Err::ConfigError, "heat_affinity sigma must be positive");

  const double denom = 2.0 * (*sigma) * (*sigma);
  SpMatrix w = graph.weights;
  for (int j = 0; j < w.outerSize(); ++j)
    for (SpMatrix::InnerIterator it(w, j); it; ++it) {
      const double dist2 = (d.col(it.row()) - d.col(it.col())).squaredNorm();
      it.valueRef() = std::exp(-dist2 / denom);
    }
  return AffinityGraph{w};
}

LsdaGraphs lsda_graphs(const Matrix& d, const std::vector<int>& labels, int p) {
  const Index n = d.cols();
  if (static_cast<Index>(labels.size()) != n)
    fail(Err::DimensionMismatch, "lsda_graphs label count mismatch");
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) fail(Err::SingleClass, "lsda_graphs needs at least two classes");

  const auto lists = knn_lists(d, p);
  std::vector<std::vector<Index>> within(static_cast<std::size_t>(n)),
      between(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j : lists[static_cast<std::size_t>(i)]) {
      auto& dst = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                      ? within
                      : between;
      dst[static_cast<std::size_t>(i)].push_back(j);
    }
  return {AffinityGraph{symmetrize(within, n, false)},
          AffinityGraph{symmetrize(between, n, false)}};
}

double median_edge_sigma(const Matrix& d, const AffinityGraph& graph) {
  std::vector<double> dists;
  for (int j = 0; j < graph.weights.outerSize(); ++j)
    for (SpMatrix::InnerIterator it(graph.weights, j); it; ++it) {
      if (it.row() >= it.col()) continue;
      const double dist = (d.col(it.row()) - d.col(it.col())).norm();
      if (dist > 0.0) dists.push_back(dist);
    }
  if (dists.empty()) return 1.0;
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

}  // namespace dimred
