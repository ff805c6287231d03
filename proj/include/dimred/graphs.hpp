#pragma once

#include <optional>
#include <vector>

#include "dimred/error.hpp"
#include "dimred/types.hpp"

namespace dimred {

// Symmetric weighted neighborhood graph with its degree vector and Laplacian.
struct AffinityGraph {
  SpMatrix weights;  // symmetric n x n

  Index size() const { return weights.rows(); }
  Vector degree() const;
  SpMatrix laplacian() const;  // diag(degree) - weights
  Matrix dense_weights() const { return Matrix(weights); }
  Matrix dense_laplacian() const { return Matrix(laplacian()); }
};

// Per-sample reconstruction weights: column i holds the coefficients that
// rebuild sample i from its neighbors and sums to one.
struct LleWeights {
  SpMatrix weights;
  double objective = 0.0;  // |D(I - W)|_F^2
};

// Exact p nearest neighbors per column by Euclidean distance, ties broken by
// lower column index. Symmetrized by union, or by intersection when `mutual`.
AffinityGraph knn_graph(const Matrix& d, int p, bool mutual = false);

// Neighbor indices per column (the directed p-NN lists behind knn_graph).
std::vector<std::vector<Index>> knn_lists(const Matrix& d, int p);

LleWeights lle_weights(const Matrix& d, int p, double reg);

// Heat-kernel weights exp(-dist^2 / (2 sigma^2)) on the edges of a binary
// adjacency; sigma = nullopt passes the binary weights through.
AffinityGraph heat_affinity(const Matrix& d, const AffinityGraph& graph,
                            std::optional<double> sigma);

struct LsdaGraphs {
  AffinityGraph within;
  AffinityGraph between;
};

// Splits each sample's p-NN set by label equality into within/between graphs.
LsdaGraphs lsda_graphs(const Matrix& d, const std::vector<int>& labels, int p);

// Median Euclidean distance over the graph's edges (for heat weights).
double median_edge_sigma(const Matrix& d, const AffinityGraph& graph);

}  // namespace dimred
