#pragma once

#include <cstdint>
#include <vector>

#include "dimred/kernels.hpp"
#include "dimred/method.hpp"
#include "dimred/types.hpp"

namespace dimred {

// One instance of the weighted-kernel reduced-rank regression objective
//   E(A, B) = | w_r (gamma - B A^T upsilon) w_c |_F^2
// with B in R^{d_d x k} and A in R^{d_x x k}.
struct WkrrrProblem {
  Matrix gamma;    // d_d x n
  Matrix upsilon;  // d_x x n
  Matrix w_r;      // d_d x d_d
  Matrix w_c;      // n x n
  Index k = 1;

  void validate() const;
};

struct WkrrrResult {
  Matrix a;
  Matrix b;
  std::vector<double> objective_trace;  // objective after init and each sweep
  int iterations = 0;
  bool converged = false;
};

double wkrrr_objective(const WkrrrProblem& p, const Matrix& a, const Matrix& b);

// Alternating closed-form updates of A given B and B given A. B starts from
// the thin SVD of w_r * gamma * w_c (seeded Gaussian fallback when that
// product is rank-deficient below k). Throws Diverged if the objective ever
// rises beyond slack, Singular if an inner solve fails.
WkrrrResult wkrrr_solve(const WkrrrProblem& p, std::uint64_t init_seed, double tol,
                        int max_iter);

// Parameters for the per-method problem construction below.
struct InstantiationParams {
  KernelSpec kernel;     // lift used by kpca/kda and the lpp/lsda targets
  int p = 12;            // graph neighbors
  double lle_reg = 1e-3;
  double alpha = 0.5;    // lsda mixing constant
  Index k = 1;
};

// Builds the method's quadruple (gamma, upsilon, w_r, w_c). Implicit lifts
// phi(D) are realized as empirical kernel maps of the centered Gram matrix.
// `labels` is required for the supervised methods.
WkrrrProblem method_problem(Method method, const Matrix& features,
                            const std::vector<int>* labels,
                            const InstantiationParams& params);

// Rank-deficiency-tolerant lift: rows sqrt(lambda_i) * u_i^T over the
// eigenvalues of `psd` above a relative floor, so the result F satisfies
// F^T F = psd (up to the clamp).
Matrix empirical_kernel_map(const Matrix& psd);

// Symmetric PSD square root with negative eigenvalues clamped to zero.
Matrix psd_sqrt(const Matrix& m);

// One-hot indicator (n x c) over the distinct labels in ascending order.
Matrix indicator_matrix(const std::vector<int>& labels);

}  // namespace dimred
