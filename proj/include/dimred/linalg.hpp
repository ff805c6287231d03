#pragma once

#include "dimred/error.hpp"
#include "dimred/types.hpp"

namespace dimred {

// Eigenpairs of a symmetric matrix, eigenvalues sorted descending and one
// orthonormal column per value. Column signs follow a fixed convention
// (largest-magnitude entry positive, ties to the lowest index) so repeated
// runs produce identical factors.
struct EigResult {
  Vector values;
  Matrix vectors;
};

// Result of the symmetric-definite generalized problem a*v = lambda*b*v.
// Vectors are b-orthonormal with respect to the (possibly ridged) b;
// `ridge` records the diagonal shift that was actually applied.
struct GenEigResult {
  Vector values;
  Matrix vectors;
  double ridge = 0.0;
};

struct SvdResult {
  Matrix u;
  Vector s;
  Matrix v;
};

// Scales each column so its largest-magnitude entry is positive (ties broken
// by lowest row index).
void fix_column_signs(Matrix& m);

void require_finite(const Matrix& m, const char* what);

EigResult sym_eig(const Matrix& m);

// Cholesky-whitening solver; b must be positive definite after at most the
// built-in ridge ladder {0, 1e-10, 1e-8, 1e-6} * trace(b)/dim.
GenEigResult gen_eig(const Matrix& a, const Matrix& b);

// Same problem with a caller-pinned absolute ridge on b (no ladder).
GenEigResult gen_eig(const Matrix& a, const Matrix& b, double ridge);

SvdResult thin_svd(const Matrix& m, Index k);

// X minimizing |a*X - b|_F^2 + lambda*|X|_F^2 via the normal equations.
Matrix ridge_solve(const Matrix& a, const Matrix& b, double lambda);

}  // namespace dimred
