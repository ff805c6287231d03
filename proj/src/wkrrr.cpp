#include "dimred/wkrrr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dimred/graphs.hpp"
#include "dimred/linalg.hpp"
#include "dimred/rng.hpp"

namespace dimred {

void WkrrrProblem::validate() const {
  const Index n = gamma.cols();
  if (upsilon.cols() != n) fail(Err::DimensionMismatch, "gamma/upsilon column counts differ");
  if (w_r.rows() != gamma.rows() || w_r.cols() != gamma.rows())
    fail(Err::DimensionMismatch, "w_r must match gamma's row count");
  if (w_c.rows() != n || w_c.cols() != n)
    fail(Err::DimensionMismatch, "w_c must be n x n");
  const Index feasible = std::min({gamma.rows(), upsilon.rows(), n});
  if (k < 1 || k > feasible) fail(Err::DimensionMismatch, "rank k out of range");
  require_finite(gamma, "gamma");
  require_finite(upsilon, "upsilon");
  require_finite(w_r, "w_r");
  require_finite(w_c, "w_c");
}

double wkrrr_objective(const WkrrrProblem& p, const Matrix& a, const Matrix& b) {
  return (p.w_r * (p.gamma - b * a.transpose() * p.upsilon) * p.w_c).squaredNorm();
}

WkrrrResult wkrrr_solve(const WkrrrProblem& p, std::uint64_t init_seed, double tol,
                        int max_iter) {
  p.validate();
  if (!(tol > 0.0)) fail(Err::ConfigError, "wkrrr_solve tol must be positive");
  if (max_iter < 1) fail(Err::ConfigError, "wkrrr_solve max_iter must be positive");

  const Matrix gamma_w = p.w_r * p.gamma * p.w_c;   // d_d x n
  const Matrix upsilon_w = p.upsilon * p.w_c;       // d_x x n
  const Matrix gamma_c = p.gamma * p.w_c;           // d_d x n

  // B from the top-k left singular vectors of the weighted target; seeded
  // Gaussian when the target is rank-deficient below k.
  Matrix b;
  {
    const SvdResult svd = thin_svd(gamma_w, p.k);
    const double top = svd.s(0);
    if (top <= 0.0 || svd.s(p.k - 1) <= 1e-12 * top) {
      Rng rng(derive_seed(init_seed, "wkrrr_init"));
      b.resize(p.gamma.rows(), p.k);
      for (Index j = 0; j < p.k; ++j)
        for (Index i = 0; i < b.rows(); ++i) b(i, j) = rng.normal();
      // Orthonormalize for a well-posed first A-step.
      Eigen::HouseholderQR<Matrix> qr(b);
      b = qr.householderQ() * Matrix::Identity(b.rows(), p.k);
    } else {
      b = svd.u;
    }
  }

  const auto solve_a = [&](const Matrix& cur_b) -> Matrix {
    const Matrix bw = p.w_r * cur_b;
    const Matrix m = ridge_solve(bw, gamma_w, 0.0);            // k x n
    return ridge_solve(upsilon_w.transpose(), m.transpose(), 0.0);  // d_x x k
  };
  const auto solve_b = [&](const Matrix& cur_a) -> Matrix {
    const Matrix proj = cur_a.transpose() * upsilon_w;  // k x n
    return ridge_solve(proj.transpose(), gamma_c.transpose(), 0.0).transpose();
  };

  WkrrrResult out;
  Matrix a = solve_a(b);
  double obj = wkrrr_objective(p, a, b);
  out.objective_trace.push_back(obj);

  for (int it = 0; it < max_iter; ++it) {
    b = solve_b(a);
    a = solve_a(b);
    const double next = wkrrr_objective(p, a, b);
    if (next > obj + 1e-12 * std::max(1.0, obj))
      fail(Err::Diverged, "objective increased at iteration " + std::to_string(it));
    out.objective_trace.push_back(next);
    out.iterations = it + 1;
    const double drop = obj - next;
    obj = next;
    if (drop <= tol * std::max(obj, 1e-300)) {
      out.converged = true;
      break;
    }
  }

  out.a = std::move(a);
  out.b = std::move(b);
  return out;
}

Matrix empirical_kernel_map(const Matrix& psd) {
  const EigResult eig = sym_eig(psd);
  const double top = eig.values.size() > 0 ? std::max(eig.values(0), 0.0) : 0.0;
  const double floor = 1e-12 * std::max(top, 1e-300);
  Index keep = 0;
  while (keep < eig.values.size() && eig.values(keep) > floor) ++keep;
  if (keep == 0) fail(Err::AllZeroSpectrum, "kernel matrix is numerically zero");
  Matrix map(keep, psd.cols());
  for (Index i = 0; i < keep; ++i)
    map.row(i) = std::sqrt(eig.values(i)) * eig.vectors.col(i).transpose();
  return map;
}

Matrix psd_sqrt(const Matrix& m) {
  const EigResult eig = sym_eig(m);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= 0.0) continue;
    out += std::sqrt(eig.values(i)) * eig.vectors.col(i) * eig.vectors.col(i).transpose();
  }
  return 0.5 * (out + out.transpose());
}

Matrix indicator_matrix(const std::vector<int>& labels) {
  const std::set<int> classes(labels.begin(), labels.end());
  if (classes.size() < 2) fail(Err::SingleClass, "need at least two classes");
  Matrix g = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(classes.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Index c = static_cast<Index>(
        std::distance(classes.begin(), classes.find(labels[i])));
    g(static_cast<Index>(i), c) = 1.0;
  }
  return g;
}

namespace {

Matrix centered(const Matrix& d) {
  const Vector mean = d.rowwise().mean();
  return d.colwise() - mean;
}

Matrix kernel_lift(const Matrix& d, const KernelSpec& spec) {
  return empirical_kernel_map(center_gram(gram_matrix(d, spec)));
}

}  // namespace

WkrrrProblem method_problem(Method method, const Matrix& features,
                            const std::vector<int>* labels,
                            const InstantiationParams& params) {
  const Index n = features.cols();
  WkrrrProblem p;
  p.k = params.k;
  p.w_c = Matrix::Identity(n, n);

  const auto identity_wr = [&](Index rows) { p.w_r = Matrix::Identity(rows, rows); };

  switch (method) {
    case Method::pca: {
      p.gamma = centered(features);
      p.upsilon = Matrix::Identity(n, n);
      identity_wr(p.gamma.rows());
      return p;
    }
    case Method::kpca: {
      p.gamma = kernel_lift(features, params.kernel);
      p.upsilon = Matrix::Identity(n, n);
      identity_wr(p.gamma.rows());
      return p;
    }
    case Method::lle: {
      const LleWeights w = lle_weights(features, params.p, params.lle_reg);
      p.gamma = Matrix::Identity(n, n) - Matrix(w.weights);
      p.upsilon = Matrix::Identity(n, n);
      identity_wr(n);
      return p;
    }
    case Method::lpp: {
      const AffinityGraph knn = knn_graph(features, params.p);
      const AffinityGraph heat =
          heat_affinity(features, knn, median_edge_sigma(features, knn));
      p.gamma = kernel_lift(features, params.kernel);
      p.upsilon = centered(features);
      identity_wr(p.gamma.rows());
      p.w_c = heat.degree().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      return p;
    }
    case Method::lda:
    case Method::kda: {
      if (!labels) fail(Err::SingleClass, "supervised instantiation needs labels");
      const Matrix g = indicator_matrix(*labels);
      p.gamma = g.transpose();
      const Vector counts = g.colwise().sum().transpose();
      p.w_r = counts.cwiseInverse().cwiseSqrt().asDiagonal();
      p.upsilon = method == Method::lda ? centered(features)
                                        : kernel_lift(features, params.kernel);
      return p;
    }
    case Method::lsda: {
      if (!labels) fail(Err::SingleClass, "supervised instantiation needs labels");
      const LsdaGraphs graphs = lsda_graphs(features, *labels, params.p);
      const Matrix mix = params.alpha * graphs.between.dense_laplacian() +
                         (1.0 - params.alpha) * graphs.within.dense_weights();
      p.gamma = kernel_lift(features, params.kernel);
      p.upsilon = centered(features);
      identity_wr(p.gamma.rows());
      p.w_c = psd_sqrt(mix);
      return p;
    }
    case Method::none:
      break;
  }
  fail(Err::ConfigError, "method has no reduced-rank instantiation");
}

}  // namespace dimred
