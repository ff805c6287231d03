#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dimred/dataset.hpp"
#include "dimred/dr.hpp"
#include "dimred/linalg.hpp"
#include "dimred/metrics.hpp"
#include "dimred/wkrrr.hpp"
#include "helpers.hpp"

using namespace dimred;
using testutil::max_principal_angle;
using testutil::random_matrix;

namespace {

Matrix centered_copy(const Matrix& d) {
  const Vector mean = d.rowwise().mean();
  return d.colwise() - mean;
}

// Embeddings that agree up to a per-component sign flip.
void check_equal_up_to_row_signs(const Matrix& a, const Matrix& b, double tol) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const double same = (a.row(i) - b.row(i)).cwiseAbs().maxCoeff();
    const double flip = (a.row(i) + b.row(i)).cwiseAbs().maxCoeff();
    CHECK(std::min(same, flip) <= tol);
  }
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, seed));
  return qr.householderQ() * Matrix::Identity(n, n);
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double projection_auc(const Vector& scores, const std::vector<int>& labels01) {
  const RocCurve roc = roc_and_auc(to_std(scores), labels01);
  return std::max(roc.auc, 1.0 - roc.auc);
}

}  // namespace

TEST_CASE("select_k") {
  Vector spectrum(4);
  spectrum << 0.5, 0.3, 0.15, 0.05;
  CHECK(select_k(spectrum, EnergyPolicy::by_fraction(0.98)) == 4);
  CHECK(select_k(spectrum, EnergyPolicy::by_fraction(0.8)) == 2);
  CHECK(select_k(spectrum, EnergyPolicy::by_fraction(1.0)) == 4);
  CHECK(select_k(spectrum, EnergyPolicy::by_k(2)) == 2);
  CHECK(select_k(spectrum, EnergyPolicy::by_k(9)) == 4);  // clamped

  // linear-scan oracle on random spectra
  dimred::Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    Vector s(8);
    for (Index i = 0; i < 8; ++i) s(i) = rng.uniform();
    std::sort(s.data(), s.data() + 8, std::greater<>());
    const double frac = 0.35 + 0.6 * rng.uniform();
    const Index k = select_k(s, EnergyPolicy::by_fraction(frac));
    double acc = 0.0;
    Index expected = 8;
    for (Index i = 0; i < 8; ++i) {
      acc += s(i);
      if (acc / s.sum() >= frac) {
        expected = i + 1;
        break;
      }
    }
    CHECK(k == expected);
  }

  try {
    select_k(Vector::Zero(3), EnergyPolicy::by_fraction(0.9));
    FAIL("expected AllZeroSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == Err::AllZeroSpectrum);
  }
}

TEST_CASE("pca axis-aligned two points") {
  Matrix d(2, 2);
  d.col(0) << 1.0, 0.0;
  d.col(1) << -1.0, 0.0;
  const DrModel m = fit_pca(d, EnergyPolicy::by_k(1));
  CHECK(std::abs(m.projection(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(m.projection(1, 0)) <= 1e-12);
}

TEST_CASE("pca isotropic data has a flat spectrum") {
  const Matrix d = random_matrix(5, 2000, 17);
  const DrModel m = fit_pca(d, EnergyPolicy::by_fraction(0.98));
  CHECK(m.spectrum(0) / m.spectrum(4) < 1.5);
}

TEST_CASE("pca als route equals the spectral subspace") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Matrix d = random_matrix(30, 100, seed);
    const DrModel spectral = fit_pca(d, EnergyPolicy::by_k(5), PcaRoute::spectral);
    const DrModel als = fit_pca(d, EnergyPolicy::by_k(5), PcaRoute::als, seed);
    CHECK(max_principal_angle(spectral.projection, als.projection) < 1e-6);
  }
}

TEST_CASE("pca reconstruction error equals the spectrum tail") {
  const Matrix d = random_matrix(12, 90, 4);
  const DrModel m = fit_pca(d, EnergyPolicy::by_k(4));
  const Matrix dc = centered_copy(d);
  const Matrix rec = m.projection * (m.projection.transpose() * dc);
  const double err = (dc - rec).squaredNorm() / static_cast<double>(d.cols() - 1);
  const double tail = m.spectrum.tail(m.spectrum.size() - 4).sum();
  CHECK(err == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("pca transform basics") {
  const Matrix d = random_matrix(6, 40, 8);
  const DrModel m = fit_pca(d, EnergyPolicy::by_k(3));
  CHECK(transform(m, m.train_mean).cwiseAbs().maxCoeff() <= 1e-12);
  const Matrix back = transform(m, d);
  CHECK((back - m.train_embedding).cwiseAbs().maxCoeff() <= 1e-8);
  try {
    transform(m, random_matrix(5, 2, 1));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DimensionMismatch);
  }
}

TEST_CASE("pca degenerate data rejected") {
  Matrix d(3, 5);
  for (Index j = 0; j < 5; ++j) d.col(j) << 1.0, 2.0, 3.0;
  try {
    fit_pca(d, EnergyPolicy::by_k(1));
    FAIL("expected DegenerateData");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegenerateData);
  }
}

TEST_CASE("kpca with a linear kernel reproduces pca scores") {
  const Matrix d = random_matrix(7, 60, 21);
  const DrModel pca = fit_pca(d, EnergyPolicy::by_k(4));
  KernelSpec linear;
  const DrModel kpca = fit_kpca(d, linear, EnergyPolicy::by_k(4));
  check_equal_up_to_row_signs(pca.train_embedding, kpca.train_embedding, 1e-6);
}

TEST_CASE("kpca of two distinct points has exactly one nonzero eigenvalue") {
  Matrix d(3, 2);
  d.col(0) << 0.0, 1.0, 0.0;
  d.col(1) << 2.0, 0.0, 1.0;
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 1.0;
  const DrModel m = fit_kpca(d, rbf, EnergyPolicy::by_fraction(0.98));
  CHECK(m.k == 1);
  CHECK(m.spectrum(0) > 0.0);
  CHECK(m.spectrum(1) <= 1e-12 * m.spectrum(0));
}

TEST_CASE("kpca top eigenpair matches a power-iteration oracle") {
  const Matrix d = random_matrix(4, 30, 33);
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 2.0;
  const DrModel m = fit_kpca(d, rbf, EnergyPolicy::by_k(2));

  const Matrix kc = center_gram(gram_matrix(d, rbf));
  Vector v = Vector::Ones(30).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Vector next = kc * v;
    lambda = next.norm();
    v = next / lambda;
  }
  CHECK(m.spectrum(0) == doctest::Approx(lambda).epsilon(1e-8));
  const Vector emb_dir = m.train_embedding.row(0).transpose().normalized();
  CHECK(std::abs(emb_dir.dot(v)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("kpca transform agrees with the training embedding") {
  const Matrix d = random_matrix(5, 50, 2);
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 1.5;
  const DrModel m = fit_kpca(d, rbf, EnergyPolicy::by_fraction(0.9));
  const Matrix back = transform(m, d);
  CHECK((back - m.train_embedding).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("lle on a line preserves ordering") {
  const int n = 40;
  Matrix d(1, n);
  for (int j = 0; j < n; ++j) d(0, j) = 0.37 * j;
  const DrModel m = fit_lle(d, 2, 1e-3, Index(1));
  std::vector<double> coord, pos;
  for (int j = 0; j < n; ++j) {
    coord.push_back(m.train_embedding(0, j));
    pos.push_back(d(0, j));
  }
  CHECK(std::abs(testutil::rank_correlation(coord, pos)) == doctest::Approx(1.0));
}

TEST_CASE("lle embedding satisfies its constraints and objective identity") {
  const Matrix d = random_matrix(3, 60, 12);
  const int p = 6;
  const Index k = 2;
  const DrModel m = fit_lle(d, p, 1e-3, k);

  const Matrix y = m.train_embedding;
  CHECK((y * Vector::Ones(60)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((y * y.transpose() - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-8);

  const LleWeights w = lle_weights(d, p, 1e-3);
  const Matrix iw = Matrix::Identity(60, 60) - Matrix(w.weights);
  const double direct = (y * iw).squaredNorm();
  CHECK(direct == doctest::Approx(m.spectrum.sum()).epsilon(1e-8));
  CHECK(m.objective == doctest::Approx(direct).epsilon(1e-8));
  CHECK(m.ascending_spectrum);

  try {
    transform(m, d.col(0));
    FAIL("expected OutOfSampleUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Err::OutOfSampleUnsupported);
  }
}

TEST_CASE("lle records a warning on disconnected graphs") {
  Matrix d(1, 12);
  for (int j = 0; j < 6; ++j) d(0, j) = j;
  for (int j = 6; j < 12; ++j) d(0, j) = 1000 + j;
  const DrModel m = fit_lle(d, 2, 1e-3, Index(1));
  bool found = false;
  for (const auto& w : m.warnings) found |= w.find("DisconnectedGraph") != std::string::npos;
  CHECK(found);
}

TEST_CASE("lle energy policy uses the inverted spectrum") {
  const Matrix d = random_matrix(3, 50, 14);
  const DrModel m = fit_lle(d, 6, 1e-3, EnergyPolicy::by_fraction(0.5));
  CHECK(m.k >= 1);
  CHECK(m.k < 48);
  const DrModel fixed = fit_lle(d, 6, 1e-3, m.k);
  CHECK((fixed.train_embedding - m.train_embedding).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("swiss roll unrolls with lle") {
  const FeatureMatrix roll = gen_swiss_roll(600, 0.05, 31);
  const DrModel m = fit_lle(roll.features, 12, 1e-3, Index(2));
  std::vector<double> t;
  for (Index j = 0; j < roll.count(); ++j) t.push_back(roll.ground_truth(0, j));
  double best = 0.0;
  for (Index r = 0; r < 2; ++r) {
    std::vector<double> coord;
    for (Index j = 0; j < roll.count(); ++j) coord.push_back(m.train_embedding(r, j));
    best = std::max(best, std::abs(testutil::rank_correlation(coord, t)));
  }
  CHECK(best > 0.9);
}

TEST_CASE("lpp separates far-apart clusters along one dimension") {
  dimred::Rng rng(7);
  const int per = 30;
  Matrix d(4, 2 * per);
  for (int j = 0; j < per; ++j)
    for (Index i = 0; i < 4; ++i) d(i, j) = 0.05 * rng.normal();
  for (int j = per; j < 2 * per; ++j)
    for (Index i = 0; i < 4; ++i) d(i, j) = (i == 0 ? 10.0 : 0.0) + 0.05 * rng.normal();

  const AffinityGraph graph = knn_graph(d, 4);  // clusters are internally linked
  const DrModel m = fit_lpp(d, graph, EnergyPolicy::by_k(1));

  double mean0 = 0.0, mean1 = 0.0;
  for (int j = 0; j < per; ++j) mean0 += m.train_embedding(0, j);
  for (int j = per; j < 2 * per; ++j) mean1 += m.train_embedding(0, j);
  mean0 /= per;
  mean1 /= per;
  double spread = 0.0;
  for (int j = 0; j < per; ++j)
    spread += (m.train_embedding(0, j) - mean0) * (m.train_embedding(0, j) - mean0);
  for (int j = per; j < 2 * per; ++j)
    spread += (m.train_embedding(0, j) - mean1) * (m.train_embedding(0, j) - mean1);
  spread = std::sqrt(spread / (2 * per));
  CHECK(std::abs(mean1 - mean0) > 5.0 * spread);
}

TEST_CASE("lpp eigenpairs satisfy the pencil residual bound") {
  const Matrix d = random_matrix(6, 80, 23);
  const AffinityGraph knn = knn_graph(d, 5);
  const AffinityGraph graph = heat_affinity(d, knn, median_edge_sigma(d, knn));
  const DrModel m = fit_lpp(d, graph, EnergyPolicy::by_fraction(0.95));

  const Matrix dc = centered_copy(d);
  const Matrix left = dc * graph.dense_weights() * dc.transpose();
  const Matrix right = dc * graph.degree().asDiagonal() * dc.transpose();
  for (Index i = 0; i < m.k; ++i) {
    const Vector v = m.projection.col(i);
    const double lambda = m.spectrum(i);
    CHECK((left * v - lambda * right * v).norm() <= 1e-8 * left.norm());
  }
}

TEST_CASE("lpp solution is stationary for the weighted regression objective") {
  const Matrix d = random_matrix(5, 40, 29);
  const AffinityGraph graph = knn_graph(d, 4);
  const DrModel m = fit_lpp(d, graph, EnergyPolicy::by_k(2));

  const Matrix dc = centered_copy(d);
  const Matrix left = dc * graph.dense_weights() * dc.transpose();
  const Matrix right = dc * graph.degree().asDiagonal() * dc.transpose();

  // Reduced form of the weighted least-squares objective: minimizing over
  // the target-side factor leaves const - tr((A^T R A)^-1 A^T L A).
  const auto reduced = [&](const Matrix& a) {
    const Matrix r = a.transpose() * right * a;
    const Matrix l = a.transpose() * left * a;
    return (r.inverse() * l).trace();
  };
  const Matrix a0 = m.projection;
  const double f0 = reduced(a0);
  double grad_norm = 0.0;
  const double h = 1e-5;
  for (Index i = 0; i < a0.rows(); ++i)
    for (Index j = 0; j < a0.cols(); ++j) {
      Matrix ap = a0, am = a0;
      ap(i, j) += h;
      am(i, j) -= h;
      const double g = (reduced(ap) - reduced(am)) / (2.0 * h);
      grad_norm += g * g;
    }
  CHECK(std::sqrt(grad_norm) < 1e-6 * std::max(1.0, std::abs(f0)));
}

TEST_CASE("lda recovers the axis direction for isotropic classes") {
  dimred::Rng rng(3);
  const int per = 200;
  Matrix d(2, 2 * per);
  std::vector<int> labels;
  for (int j = 0; j < 2 * per; ++j) {
    const int c = j < per ? 0 : 1;
    d(0, j) = (c == 1 ? 1.0 : 0.0) + 0.05 * rng.normal();
    d(1, j) = 0.05 * rng.normal();
    labels.push_back(c);
  }
  const DrModel m = fit_lda(d, labels);
  CHECK(m.k == 1);
  const Vector dir = m.projection.col(0).normalized();
  CHECK(std::abs(dir(0)) > 1.0 - 1e-3);
}

TEST_CASE("lda routes agree with the closed-form discriminant direction") {
  for (std::uint64_t seed : {10u, 20u, 30u}) {
    const int n = 120, dim = 8;
    dimred::Rng rng(seed);
    Matrix d(dim, n);
    std::vector<int> labels;
    for (int j = 0; j < n; ++j) {
      const int c = j % 2;
      for (Index i = 0; i < dim; ++i)
        d(i, j) = rng.normal() + (c == 1 && i < 3 ? 1.2 : 0.0);
      labels.push_back(c);
    }
    const DrModel gep = fit_lda(d, labels, LdaRoute::gep);
    const DrModel ls = fit_lda(d, labels, LdaRoute::ls);
    CHECK(gep.ridge == 0.0);

    // Pooled-scatter closed form.
    const Matrix dc = centered_copy(d);
    Vector mu0 = Vector::Zero(dim), mu1 = Vector::Zero(dim);
    int n0 = 0, n1 = 0;
    for (int j = 0; j < n; ++j) {
      if (labels[static_cast<std::size_t>(j)] == 0) {
        mu0 += dc.col(j);
        ++n0;
      } else {
        mu1 += dc.col(j);
        ++n1;
      }
    }
    mu0 /= n0;
    mu1 /= n1;
    Matrix sw = Matrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
      const Vector r = dc.col(j) - (labels[static_cast<std::size_t>(j)] == 0 ? mu0 : mu1);
      sw += r * r.transpose();
    }
    const Vector fisher = sw.ldlt().solve(mu1 - mu0).normalized();

    CHECK(std::abs(testutil::cosine(gep.projection.col(0), fisher)) > 1.0 - 1e-8);
    CHECK(std::abs(testutil::cosine(ls.projection.col(0), fisher)) > 1.0 - 1e-8);
  }
}

TEST_CASE("balanced classes make the indicator weighting a scalar") {
  const int n = 80, dim = 5;
  dimred::Rng rng(44);
  Matrix d(dim, n);
  std::vector<int> labels;
  for (int j = 0; j < n; ++j) {
    const int c = j % 2;
    for (Index i = 0; i < dim; ++i) d(i, j) = rng.normal() + (c == 1 && i == 0 ? 2.0 : 0.0);
    labels.push_back(c);
  }
  const DrModel ls = fit_lda(d, labels, LdaRoute::ls);

  // Unweighted indicator regression.
  WkrrrProblem p;
  const Matrix g = indicator_matrix(labels);
  p.gamma = g.transpose();
  p.w_r = Matrix::Identity(2, 2);
  p.upsilon = centered_copy(d);
  p.w_c = Matrix::Identity(n, n);
  p.k = 1;
  const WkrrrResult res = wkrrr_solve(p, 0, 1e-14, 5000);
  CHECK(std::abs(testutil::cosine(ls.projection.col(0), res.a.col(0))) > 1.0 - 1e-8);
}

TEST_CASE("kda with a linear kernel matches lda projections") {
  const int n = 100, dim = 6;
  dimred::Rng rng(15);
  Matrix d(dim, n);
  std::vector<int> labels;
  for (int j = 0; j < n; ++j) {
    const int c = j % 2;
    for (Index i = 0; i < dim; ++i) d(i, j) = rng.normal() + (c == 1 && i < 2 ? 1.5 : 0.0);
    labels.push_back(c);
  }
  const DrModel lda = fit_lda(d, labels);
  const DrModel kda = fit_kda(d, labels, KernelSpec{});
  const Vector a = lda.train_embedding.row(0).transpose();
  const Vector b = kda.train_embedding.row(0).transpose();
  const double corr = std::abs((a.array() - a.mean()).matrix().normalized().dot(
      (b.array() - b.mean()).matrix().normalized()));
  CHECK(corr > 0.999);
}

TEST_CASE("kda separates xor data where linear lda cannot") {
  dimred::Rng rng(8);
  const int per = 30;
  Matrix d(2, 4 * per);
  std::vector<int> labels;
  const double centers[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  for (int c = 0; c < 4; ++c)
    for (int j = 0; j < per; ++j) {
      const int col = c * per + j;
      d(0, col) = centers[c][0] + 0.08 * rng.normal();
      d(1, col) = centers[c][1] + 0.08 * rng.normal();
      labels.push_back(c < 2 ? 0 : 1);
    }

  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 0.5;
  const DrModel kda = fit_kda(d, labels, rbf);
  CHECK(projection_auc(kda.train_embedding.row(0).transpose(), labels) > 0.95);

  const DrModel lda = fit_lda(d, labels);
  CHECK(projection_auc(lda.train_embedding.row(0).transpose(), labels) < 0.7);
}

TEST_CASE("kda is invariant to sample duplication under a matched ridge") {
  const int n = 40, dim = 4;
  dimred::Rng rng(55);
  Matrix d(dim, n);
  std::vector<int> labels;
  for (int j = 0; j < n; ++j) {
    const int c = j % 2;
    for (Index i = 0; i < dim; ++i) d(i, j) = rng.normal() + (c == 1 && i == 0 ? 1.0 : 0.0);
    labels.push_back(c);
  }
  Matrix dup(dim, 2 * n);
  std::vector<int> dup_labels;
  for (int j = 0; j < n; ++j) {
    dup.col(j) = d.col(j);
    dup.col(n + j) = d.col(j);
  }
  dup_labels = labels;
  dup_labels.insert(dup_labels.end(), labels.begin(), labels.end());

  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 1.3;
  const double ridge = 1e-6;
  const DrModel base = fit_kda(d, labels, rbf, ridge);
  const DrModel twice = fit_kda(dup, dup_labels, rbf, 4.0 * ridge);

  const Matrix probe = random_matrix(dim, 7, 99);
  const Matrix pa = transform(base, probe);
  const Matrix pb = transform(twice, probe);
  check_equal_up_to_row_signs(pa, pb, 1e-6);
}

TEST_CASE("lsda with alpha zero on a label-pure graph reduces to lpp") {
  dimred::Rng rng(64);
  const int per = 25;
  Matrix d(3, 2 * per);
  std::vector<int> labels;
  for (int j = 0; j < 2 * per; ++j) {
    const int c = j < per ? 0 : 1;
    for (Index i = 0; i < 3; ++i) d(i, j) = (c == 1 && i == 0 ? 30.0 : 0.0) + rng.normal();
    labels.push_back(c);
  }
  const int p = 3;
  const LsdaGraphs graphs = lsda_graphs(d, labels, p);
  REQUIRE(graphs.between.weights.nonZeros() == 0);  // label-blind neighborhoods

  const DrModel lsda = fit_lsda(d, labels, p, 0.0);
  const DrModel lpp = fit_lpp(d, graphs.within, EnergyPolicy::by_k(1));
  CHECK(max_principal_angle(lsda.projection, lpp.projection) < 1e-6);

  // and the 1-D projection orders the two classes essentially perfectly
  CHECK(projection_auc(lsda.train_embedding.row(0).transpose(), labels) > 0.99);
}

TEST_CASE("lsda eigenpairs satisfy the pencil residual bound") {
  dimred::Rng rng(81);
  const int n = 60;
  Matrix d(5, n);
  std::vector<int> labels;
  for (int j = 0; j < n; ++j) {
    const int c = j % 2;
    for (Index i = 0; i < 5; ++i) d(i, j) = rng.normal() + (c == 1 && i < 2 ? 1.0 : 0.0);
    labels.push_back(c);
  }
  const int p = 5;
  const double alpha = 0.5;
  const DrModel m = fit_lsda(d, labels, p, alpha);

  const LsdaGraphs graphs = lsda_graphs(d, labels, p);
  const Matrix dc = centered_copy(d);
  const Matrix mix = alpha * graphs.between.dense_laplacian() +
                     (1.0 - alpha) * graphs.within.dense_weights();
  const Matrix left = dc * mix * dc.transpose();
  const Matrix right = dc * graphs.within.degree().asDiagonal() * dc.transpose();
  for (Index i = 0; i < m.k; ++i) {
    const Vector v = m.projection.col(i);
    CHECK((left * v - m.spectrum(i) * (right * v + m.ridge * v)).norm() <=
          1e-8 * left.norm());
  }
}

TEST_CASE("transform consistency: training columns map onto the embedding") {
  AuLikeParams params;
  params.n_subjects = 5;
  params.frames_per_subject = 30;
  params.d = 10;
  params.pos_rate = 0.3;
  params.signal_dims = 4;
  params.noise = 1.0;
  const FeatureMatrix fm = gen_au_like(params, 2);
  const std::vector<int>& labels = fm.label("au_1");
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = median_pairwise_sigma(fm.features);
  const AffinityGraph graph = knn_graph(fm.features, 6);

  std::vector<DrModel> models;
  models.push_back(fit_pca(fm.features, EnergyPolicy::by_fraction(0.98)));
  models.push_back(fit_kpca(fm.features, rbf, EnergyPolicy::by_fraction(0.9)));
  models.push_back(fit_lpp(fm.features, graph, EnergyPolicy::by_k(3)));
  models.push_back(fit_lda(fm.features, labels));
  models.push_back(fit_kda(fm.features, labels, rbf));
  models.push_back(fit_lsda(fm.features, labels, 6, 0.5));

  for (const auto& m : models) {
    CAPTURE(to_string(m.method));
    const Matrix back = transform(m, fm.features);
    const double scale = std::max(1.0, m.train_embedding.cwiseAbs().maxCoeff());
    CHECK((back - m.train_embedding).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    // single column consistency
    const Matrix one = transform(m, fm.features.col(3));
    CHECK((one - m.train_embedding.col(3)).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("rotation invariance of embeddings") {
  AuLikeParams params;
  params.n_subjects = 4;
  params.frames_per_subject = 25;
  params.d = 8;
  params.pos_rate = 0.3;
  params.signal_dims = 3;
  params.noise = 1.0;
  const FeatureMatrix fm = gen_au_like(params, 9);
  const std::vector<int>& labels = fm.label("au_1");
  const Matrix q = random_orthogonal(8, 123);
  const Matrix rotated = q * fm.features;

  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 2.5;

  const double tol = 1e-6;
  check_equal_up_to_row_signs(fit_pca(fm.features, EnergyPolicy::by_k(3)).train_embedding,
                              fit_pca(rotated, EnergyPolicy::by_k(3)).train_embedding, tol);
  check_equal_up_to_row_signs(fit_lda(fm.features, labels).train_embedding,
                              fit_lda(rotated, labels).train_embedding, tol);
  {
    const AffinityGraph g1 = knn_graph(fm.features, 5);
    const AffinityGraph g2 = knn_graph(rotated, 5);
    check_equal_up_to_row_signs(
        fit_lpp(fm.features, g1, EnergyPolicy::by_k(2)).train_embedding,
        fit_lpp(rotated, g2, EnergyPolicy::by_k(2)).train_embedding, tol);
  }
  check_equal_up_to_row_signs(fit_lsda(fm.features, labels, 5, 0.5).train_embedding,
                              fit_lsda(rotated, labels, 5, 0.5).train_embedding, tol);
  check_equal_up_to_row_signs(
      fit_kpca(fm.features, rbf, EnergyPolicy::by_k(3)).train_embedding,
      fit_kpca(rotated, rbf, EnergyPolicy::by_k(3)).train_embedding, tol);
  check_equal_up_to_row_signs(fit_kda(fm.features, labels, rbf).train_embedding,
                              fit_kda(rotated, labels, rbf).train_embedding, tol);
}

TEST_CASE("positive scaling leaves the lda ordering unchanged") {
  dimred::Rng rng(5);
  const int n = 80;
  Matrix d(4, n);
  std::vector<int> labels;
  for (int j = 0; j < n; ++j) {
    const int c = j % 2;
    for (Index i = 0; i < 4; ++i) d(i, j) = rng.normal() + (c == 1 && i == 0 ? 1.0 : 0.0);
    labels.push_back(c);
  }
  const DrModel base = fit_lda(d, labels);
  const DrModel scaled = fit_lda((3.7 * d).eval(), labels);
  CHECK(std::abs(testutil::cosine(base.projection.col(0), scaled.projection.col(0))) >
        1.0 - 1e-9);
}

TEST_CASE("supervised rank is pinned to classes minus one") {
  const Matrix d = random_matrix(6, 90, 71);
  std::vector<int> labels;
  for (int j = 0; j < 90; ++j) labels.push_back(j % 3);
  const DrModel m = fit_lda(d, labels);
  CHECK(m.k == 2);
  std::vector<int> binary;
  for (int j = 0; j < 90; ++j) binary.push_back(j % 2);
  CHECK(fit_lda(d, binary).k == 1);
  CHECK(fit_kda(d, binary, KernelSpec{}).k == 1);
  CHECK(fit_lsda(d, binary, 5, 0.5).k == 1);
}

TEST_CASE("model serialization round-trips bit-exactly") {
  AuLikeParams params;
  params.n_subjects = 4;
  params.frames_per_subject = 20;
  params.d = 6;
  params.pos_rate = 0.3;
  params.signal_dims = 2;
  params.noise = 1.0;
  const FeatureMatrix fm = gen_au_like(params, 13);
  KernelSpec rbf;
  rbf.kind = KernelKind::rbf;
  rbf.sigma = 1.9;

  const std::string path =
      (std::filesystem::temp_directory_path() / "dimred_model.json").string();
  for (int which = 0; which < 3; ++which) {
    DrModel m;
    if (which == 0) m = fit_pca(fm.features, EnergyPolicy::by_fraction(0.98));
    else if (which == 1) m = fit_kpca(fm.features, rbf, EnergyPolicy::by_k(2));
    else m = fit_lda(fm.features, fm.label("au_1"));

    save_model(m, path);
    const DrModel back = load_model(path);
    CHECK(back.method == m.method);
    CHECK(back.k == m.k);
    CHECK((back.projection - m.projection).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.train_embedding - m.train_embedding).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.spectrum - m.spectrum).cwiseAbs().maxCoeff() == 0.0);
    if (m.method != Method::lle) {
      const Matrix probe = fm.features.leftCols(4);
      CHECK((transform(back, probe) - transform(m, probe)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  std::remove(path.c_str());
}
