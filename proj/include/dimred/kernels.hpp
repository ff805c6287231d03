#pragma once

#include "dimred/error.hpp"
#include "dimred/types.hpp"

namespace dimred {

enum class KernelKind { linear, rbf, polynomial };

const char* to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;    // rbf bandwidth
  int degree = 2;        // polynomial degree
  double offset = 1.0;   // polynomial offset

  void validate() const;
};

// Pairwise kernel evaluations k(x_i, x_j) over the columns of x.
Matrix gram_matrix(const Matrix& x, const KernelSpec& spec);

// Double-centered Gram: H K H with H = I - ones/n.
Matrix center_gram(const Matrix& k);

// n_train x n_query matrix of k(train_i, query_j).
Matrix cross_kernel(const Matrix& train, const Matrix& query, const KernelSpec& spec);

// Median of pairwise Euclidean distances over a deterministic subsample of at
// most 500 columns; falls back to 1 when all distances vanish.
double median_pairwise_sigma(const Matrix& x);

}  // namespace dimred
