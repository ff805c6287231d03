#include "dimred/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

namespace dimred {

const char* to_string(Err code) {
  switch (code) {
    case Err::NonSymmetric: return "NonSymmetric";
    case Err::NonFinite: return "NonFinite";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::NotPositiveDefinite: return "NotPositiveDefinite";
    case Err::Singular: return "Singular";
    case Err::TooFewSamples: return "TooFewSamples";
    case Err::SingularLocalGram: return "SingularLocalGram";
    case Err::SingleClass: return "SingleClass";
    case Err::AllZeroSpectrum: return "AllZeroSpectrum";
    case Err::DegenerateData: return "DegenerateData";
    case Err::OutOfSampleUnsupported: return "OutOfSampleUnsupported";
    case Err::Diverged: return "Diverged";
    case Err::TooFewSubjects: return "TooFewSubjects";
    case Err::NoPositives: return "NoPositives";
    case Err::ParseError: return "ParseError";
    case Err::SchemaMismatch: return "SchemaMismatch";
    case Err::MissingCell: return "MissingCell";
    case Err::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) fail(Err::NonFinite, std::string(what) + " contains NaN or Inf");
}

void fix_column_signs(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (m(arg, j) < 0.0) m.col(j) = -m.col(j);
  }
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    fail(Err::DimensionMismatch, std::string(what) + " must be square");
}

void require_symmetric(const Matrix& m, const char* what) {
  require_square(m, what);
  const double scale = m.cwiseAbs().maxCoeff();
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (dev > 1e-10 * std::max(scale, 1e-300))
    fail(Err::NonSymmetric, std::string(what) + " is not symmetric within tolerance");
}

EigResult descending_eig(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    fail(Err::Singular, "symmetric eigendecomposition did not converge");
  const Index n = sym.rows();
  EigResult out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  (void)n;
  fix_column_signs(out.vectors);
  return out;
}

}  // namespace

EigResult sym_eig(const Matrix& m) {
  require_finite(m, "sym_eig input");
  require_symmetric(m, "sym_eig input");
  // Work on the symmetrized copy so roundoff in the caller cannot leak in.
  const Matrix sym = 0.5 * (m + m.transpose());
  return descending_eig(sym);
}

namespace {

GenEigResult gen_eig_with(const Matrix& a, const Matrix& b, double ridge, bool ladder) {
  require_finite(a, "gen_eig a");
  require_finite(b, "gen_eig b");
  require_symmetric(a, "gen_eig a");
  require_symmetric(b, "gen_eig b");
  if (a.rows() != b.rows()) fail(Err::DimensionMismatch, "gen_eig operands differ in size");

  const Index n = b.rows();
  const double trace_scale = b.trace() / static_cast<double>(n);
  const double ladder_steps[] = {0.0, 1e-10, 1e-8, 1e-6};

  Eigen::LLT<Matrix> llt;
  double used = ridge;
  bool ok = false;
  const int tries = ladder ? 4 : 1;
  for (int t = 0; t < tries; ++t) {
    used = ladder ? ladder_steps[t] * trace_scale : ridge;
    Matrix shifted = 0.5 * (b + b.transpose());
    shifted.diagonal().array() += used;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) continue;
    // Reject factorizations of numerically singular matrices: they pass the
    // pivot test but produce useless whitened operators.
    const Vector d = llt.matrixL().toDenseMatrix().diagonal();
    const double dmin = d.minCoeff(), dmax = d.maxCoeff();
    if (dmin * dmin <= static_cast<double>(n) *
                           std::numeric_limits<double>::epsilon() * dmax * dmax)
      continue;
    ok = true;
    break;
  }
  if (!ok) fail(Err::NotPositiveDefinite, "b is not positive definite (ridge ladder exhausted)");

  // Whitened operator C = L^-1 A L^-T, then map eigenvectors back by L^-T.
  const Matrix sym_a = 0.5 * (a + a.transpose());
  Matrix c = llt.matrixL().solve(sym_a);
  c = llt.matrixL().solve(c.transpose()).transpose();
  c = 0.5 * (c + c.transpose());

  EigResult inner = descending_eig(c);
  GenEigResult out;
  out.values = std::move(inner.values);
  out.vectors = llt.matrixU().solve(inner.vectors);
  out.ridge = used;
  fix_column_signs(out.vectors);
  return out;
}

}  // namespace

GenEigResult gen_eig(const Matrix& a, const Matrix& b) {
  return gen_eig_with(a, b, 0.0, /*ladder=*/true);
}

GenEigResult gen_eig(const Matrix& a, const Matrix& b, double ridge) {
  return gen_eig_with(a, b, ridge, /*ladder=*/false);
}

SvdResult thin_svd(const Matrix& m, Index k) {
  require_finite(m, "thin_svd input");
  if (k < 1 || k > std::min(m.rows(), m.cols()))
    fail(Err::DimensionMismatch, "thin_svd rank out of range");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  // Sign convention is driven by U; V follows so U*S*V^T is preserved.
  for (Index j = 0; j < k; ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < out.u.rows(); ++i) {
      const double a = std::abs(out.u(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (out.u(arg, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

Matrix ridge_solve(const Matrix& a, const Matrix& b, double lambda) {
  require_finite(a, "ridge_solve a");
  require_finite(b, "ridge_solve b");
  if (a.rows() != b.rows()) fail(Err::DimensionMismatch, "ridge_solve row counts differ");
  if (lambda < 0.0) fail(Err::ConfigError, "ridge_solve lambda must be nonnegative");

  Matrix normal = a.transpose() * a;
  normal.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success)
    fail(Err::Singular, "normal matrix factorization failed");
  const Vector d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double tol = static_cast<double>(normal.rows()) *
                     std::numeric_limits<double>::epsilon() * std::max(dmax, 1e-300);
  if (d.cwiseAbs().minCoeff() <= tol)
    fail(Err::Singular, "normal matrix is singular at the given lambda");
  return ldlt.solve(a.transpose() * b);
}

}  // namespace dimred
