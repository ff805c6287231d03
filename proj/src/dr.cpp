#include "dimred/dr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "dimred/linalg.hpp"
#include "dimred/wkrrr.hpp"

namespace dimred {

using nlohmann::json;

Index select_k(const Vector& spectrum, const EnergyPolicy& policy) {
  if (spectrum.size() == 0) fail(Err::AllZeroSpectrum, "empty spectrum");
  if (spectrum.minCoeff() < 0.0)
    fail(Err::ConfigError, "select_k expects a nonnegative spectrum");
  if (policy.mode == EnergyPolicy::Mode::fixed) {
    if (policy.fixed_k < 1) fail(Err::ConfigError, "fixed_k must be positive");
    return std::min(policy.fixed_k, spectrum.size());
  }
  if (!(policy.fraction > 0.0 && policy.fraction <= 1.0))
    fail(Err::ConfigError, "energy fraction must lie in (0, 1]");
  const double total = spectrum.sum();
  if (total <= 0.0) fail(Err::AllZeroSpectrum, "spectrum sums to zero");
  double acc = 0.0;
  for (Index i = 0; i < spectrum.size(); ++i) {
    acc += spectrum(i);
    if (acc / total >= policy.fraction) return i + 1;
  }
  return spectrum.size();
}

namespace {

Vector column_mean(const Matrix& d) { return d.rowwise().mean(); }

Matrix centered(const Matrix& d, const Vector& mean) { return d.colwise() - mean; }

Matrix orthonormal_basis(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  fix_column_signs(q);
  return q;
}

std::map<int, Index> class_counts(const std::vector<int>& labels) {
  std::map<int, Index> counts;
  for (int l : labels) ++counts[l];
  if (counts.size() < 2) fail(Err::SingleClass, "need at least two classes");
  for (const auto& [cls, cnt] : counts)
    if (cnt < 2)
      fail(Err::TooFewSamples, "class " + std::to_string(cls) + " has fewer than 2 samples");
  return counts;
}

void note_ridge(DrModel& model, double ridge) {
  model.ridge = ridge;
  if (ridge > 0.0)
    model.warnings.push_back("SmallSampleSingular: ridge " + std::to_string(ridge) +
                             " applied to the generalized eigenproblem");
}

// Shared trailing steps for the linear generalized-eigenproblem methods.
void finish_linear_gep(DrModel& model, const Matrix& dc, const GenEigResult& res, Index k) {
  model.k = k;
  model.projection = res.vectors.leftCols(k);
  model.train_embedding = model.projection.transpose() * dc;
  model.spectrum = res.values;
  note_ridge(model, res.ridge);
}

}  // namespace

DrModel fit_pca(const Matrix& d, const EnergyPolicy& policy, PcaRoute route,
                std::uint64_t seed) {
  const Index n = d.cols();
  if (n < 2) fail(Err::TooFewSamples, "fit_pca needs at least two samples");
  require_finite(d, "fit_pca input");

  DrModel model;
  model.method = Method::pca;
  model.train_mean = column_mean(d);
  const Matrix dc = centered(d, model.train_mean);
  if (dc.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, d.cwiseAbs().maxCoeff()))
    fail(Err::DegenerateData, "all columns are identical");

  const Matrix cov = dc * dc.transpose() / static_cast<double>(n - 1);
  const EigResult eig = sym_eig(cov);
  model.spectrum = eig.values.cwiseMax(0.0);
  model.k = select_k(model.spectrum, policy);

  if (route == PcaRoute::spectral) {
    model.b_factor = eig.vectors.leftCols(model.k);
    model.projection = model.b_factor;
    model.a_factor = dc.transpose() * model.b_factor;  // training scores
  } else {
    WkrrrProblem problem;
    problem.gamma = dc;
    problem.upsilon = Matrix::Identity(n, n);
    problem.w_r = Matrix::Identity(d.rows(), d.rows());
    problem.w_c = Matrix::Identity(n, n);
    problem.k = model.k;
    const WkrrrResult res = wkrrr_solve(problem, seed, 1e-11, 500);
    model.a_factor = res.a;
    model.b_factor = res.b;
    model.projection = orthonormal_basis(res.b);
    model.objective = res.objective_trace.back();
  }
  model.train_embedding = model.projection.transpose() * dc;
  return model;
}

DrModel fit_kpca(const Matrix& d, const KernelSpec& spec, const EnergyPolicy& policy) {
  const Index n = d.cols();
  if (n < 2) fail(Err::TooFewSamples, "fit_kpca needs at least two samples");

  DrModel model;
  model.method = Method::kpca;
  model.kernel = spec;
  model.train_mean = column_mean(d);
  model.train_columns = d;

  const Matrix k_raw = gram_matrix(d, spec);
  model.gram_row_mean = k_raw.rowwise().mean();
  model.gram_mean = k_raw.mean();
  const Matrix kc = center_gram(k_raw);

  const EigResult eig = sym_eig(kc);
  model.spectrum = eig.values.cwiseMax(0.0);
  const double top = model.spectrum(0);
  if (top <= 1e-12 * std::max(1.0, k_raw.cwiseAbs().maxCoeff()))
    fail(Err::AllZeroSpectrum, "centered Gram matrix is numerically zero");

  Index usable = 0;
  while (usable < n && model.spectrum(usable) > 1e-12 * top) ++usable;
  Index k = select_k(model.spectrum, policy);
  if (k > usable) {
    model.warnings.push_back("rank capped at " + std::to_string(usable) +
                             " numerically nonzero Gram eigenvalues");
    k = usable;
  }
  model.k = k;

  model.a_factor.resize(n, k);
  model.train_embedding.resize(k, n);
  for (Index i = 0; i < k; ++i) {
    const double root = std::sqrt(model.spectrum(i));
    model.a_factor.col(i) = eig.vectors.col(i) / root;
    model.train_embedding.row(i) = root * eig.vectors.col(i).transpose();
  }
  return model;
}

namespace {

int graph_components(const AffinityGraph& g) {
  const Index n = g.size();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int count = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (SpMatrix::InnerIterator it(g.weights, u); it; ++it) {
        const Index v = it.row();
        if (comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = count;
          stack.push_back(v);
        }
      }
    }
    ++count;
  }
  return count;
}

struct LleSpectrum {
  Vector values_ascending;  // spectrum on the subspace orthogonal to constants
  Matrix vectors;           // columns aligned with values_ascending
  double objective_base = 0.0;
};

LleSpectrum lle_eig(const Matrix& d, int p, double reg, DrModel& model) {
  const Index n = d.cols();
  const AffinityGraph knn = knn_graph(d, p);
  const int components = graph_components(knn);
  if (components > 1)
    model.warnings.push_back("DisconnectedGraph: k-NN graph has " +
                             std::to_string(components) + " components");

  const LleWeights w = lle_weights(d, p, reg);
  const Matrix iw = Matrix::Identity(n, n) - Matrix(w.weights);
  Matrix m = iw * iw.transpose();
  m = 0.5 * (m + m.transpose());

  // Push the exact constant null vector to the top of the spectrum so the
  // remaining eigenvectors stay orthogonal to it even under disconnection.
  const double shift = m.trace() + 1.0;
  m += (shift / static_cast<double>(n)) * Matrix::Ones(n, n);

  const EigResult eig = sym_eig(m);
  LleSpectrum out;
  out.values_ascending.resize(n - 1);
  out.vectors.resize(n, n - 1);
  for (Index i = 0; i < n - 1; ++i) {
    out.values_ascending(i) = std::max(0.0, eig.values(n - 1 - i));
    out.vectors.col(i) = eig.vectors.col(n - 1 - i);
  }
  return out;
}

DrModel lle_from_spectrum(const Matrix& d, const LleSpectrum& spec, Index k, DrModel model) {
  const Index n = d.cols();
  if (k < 1 || k >= n - 1) fail(Err::DimensionMismatch, "fit_lle needs 1 <= k < n - 1");
  model.method = Method::lle;
  model.k = k;
  model.train_mean = d.rowwise().mean();
  model.train_embedding = spec.vectors.leftCols(k).transpose();
  model.spectrum = spec.values_ascending.head(k);
  model.ascending_spectrum = true;
  model.supports_oos = false;
  model.objective = model.spectrum.sum();
  return model;
}

}  // namespace

DrModel fit_lle(const Matrix& d, int p, double reg, Index k) {
  DrModel model;
  const LleSpectrum spec = lle_eig(d, p, reg, model);
  return lle_from_spectrum(d, spec, k, std::move(model));
}

DrModel fit_lle(const Matrix& d, int p, double reg, const EnergyPolicy& policy) {
  DrModel model;
  const LleSpectrum spec = lle_eig(d, p, reg, model);

  // Energy is ill-posed on a smallest-eigenvalue spectrum; rank by the
  // inverted nonzero eigenvalues instead.
  const Index m = spec.values_ascending.size();
  const double top = spec.values_ascending(m - 1);
  std::vector<double> inverted;
  for (Index i = 0; i < m; ++i) {
    const double v = spec.values_ascending(i);
    if (v > 1e-10 * std::max(top, 1e-300)) inverted.push_back(1.0 / v);
  }
  if (inverted.empty()) fail(Err::AllZeroSpectrum, "reconstruction spectrum is all zero");
  std::sort(inverted.begin(), inverted.end(), std::greater<>());
  Vector energy = Eigen::Map<Vector>(inverted.data(), static_cast<Index>(inverted.size()));
  Index k = select_k(energy, policy);
  k = std::min(k, d.cols() - 2);
  return lle_from_spectrum(d, spec, k, std::move(model));
}

DrModel fit_lpp(const Matrix& d, const AffinityGraph& graph, const EnergyPolicy& policy) {
  if (graph.size() != d.cols())
    fail(Err::DimensionMismatch, "fit_lpp graph/data size mismatch");

  DrModel model;
  model.method = Method::lpp;
  model.train_mean = column_mean(d);
  const Matrix dc = centered(d, model.train_mean);

  const Matrix w = graph.dense_weights();
  const Vector s = graph.degree();
  Matrix left = dc * w * dc.transpose();
  left = 0.5 * (left + left.transpose());
  Matrix right = dc * s.asDiagonal() * dc.transpose();
  right = 0.5 * (right + right.transpose());

  const GenEigResult res = gen_eig(left, right);
  const Index k = select_k(res.values.cwiseMax(0.0), policy);
  finish_linear_gep(model, dc, res, k);
  return model;
}

DrModel fit_lda(const Matrix& d, const std::vector<int>& labels, LdaRoute route,
                std::optional<double> ridge, std::uint64_t seed) {
  if (static_cast<Index>(labels.size()) != d.cols())
    fail(Err::DimensionMismatch, "fit_lda label count mismatch");
  const auto counts = class_counts(labels);
  const Index k = static_cast<Index>(counts.size()) - 1;

  DrModel model;
  model.method = Method::lda;
  model.train_mean = column_mean(d);
  const Matrix dc = centered(d, model.train_mean);

  if (route == LdaRoute::gep) {
    // Between-class scatter from centered class means; total scatter Dc Dc^T.
    Matrix sb = Matrix::Zero(d.rows(), d.rows());
    for (const auto& [cls, cnt] : counts) {
      Vector mean = Vector::Zero(d.rows());
      for (std::size_t j = 0; j < labels.size(); ++j)
        if (labels[j] == cls) mean += dc.col(static_cast<Index>(j));
      mean /= static_cast<double>(cnt);
      sb += static_cast<double>(cnt) * mean * mean.transpose();
    }
    sb = 0.5 * (sb + sb.transpose());
    Matrix st = dc * dc.transpose();
    st = 0.5 * (st + st.transpose());

    const GenEigResult res = ridge ? gen_eig(sb, st, *ridge) : gen_eig(sb, st);
    finish_linear_gep(model, dc, res, k);
    return model;
  }

  // Least-squares route: balanced regression of the indicators on the data.
  const Matrix g = indicator_matrix(labels);
  WkrrrProblem problem;
  problem.gamma = g.transpose();
  Vector wr = g.colwise().sum().transpose();
  problem.w_r = wr.cwiseInverse().cwiseSqrt().asDiagonal();
  problem.upsilon = dc;
  problem.w_c = Matrix::Identity(d.cols(), d.cols());
  problem.k = k;
  const WkrrrResult res = wkrrr_solve(problem, seed, 1e-14, 5000);

  model.k = k;
  model.a_factor = res.a;
  model.b_factor = res.b;
  model.projection = orthonormal_basis(res.a);
  model.train_embedding = model.projection.transpose() * dc;
  model.objective = res.objective_trace.back();
  model.spectrum = Vector::Zero(k);
  return model;
}

DrModel fit_kda(const Matrix& d, const std::vector<int>& labels, const KernelSpec& spec,
                std::optional<double> ridge) {
  if (static_cast<Index>(labels.size()) != d.cols())
    fail(Err::DimensionMismatch, "fit_kda label count mismatch");
  const auto counts = class_counts(labels);
  const Index k = static_cast<Index>(counts.size()) - 1;
  const Index n = d.cols();

  DrModel model;
  model.method = Method::kda;
  model.kernel = spec;
  model.train_mean = column_mean(d);
  model.train_columns = d;

  const Matrix k_raw = gram_matrix(d, spec);
  model.gram_row_mean = k_raw.rowwise().mean();
  model.gram_mean = k_raw.mean();
  const Matrix kc = center_gram(k_raw);

  const Matrix g = indicator_matrix(labels);
  Vector wr = g.colwise().sum().transpose();
  const Matrix g_hat = g * wr.cwiseInverse().cwiseSqrt().asDiagonal();

  const Matrix kg = kc * g_hat;  // n x c
  Matrix left = kg * kg.transpose();
  left = 0.5 * (left + left.transpose());
  Matrix right = kc * kc;
  right = 0.5 * (right + right.transpose());

  const GenEigResult res = ridge ? gen_eig(left, right, *ridge) : gen_eig(left, right);
  note_ridge(model, res.ridge);
  model.k = k;

  // Normalize each component to unit second moment over the training
  // projections; this keeps the projection function invariant to sample
  // duplication (given a correspondingly scaled ridge).
  model.a_factor = res.vectors.leftCols(k);
  model.train_embedding = model.a_factor.transpose() * kc;
  for (Index i = 0; i < k; ++i) {
    const double ms = model.train_embedding.row(i).squaredNorm() / static_cast<double>(n);
    if (ms > 1e-300) {
      const double scale = 1.0 / std::sqrt(ms);
      model.a_factor.col(i) *= scale;
      model.train_embedding.row(i) *= scale;
    }
    Index arg = 0;
    model.train_embedding.row(i).cwiseAbs().maxCoeff(&arg);
    if (model.train_embedding(i, arg) < 0.0) {
      model.a_factor.col(i) = -model.a_factor.col(i);
      model.train_embedding.row(i) = -model.train_embedding.row(i);
    }
  }
  model.spectrum = res.values.head(std::min(n, k));
  return model;
}

DrModel fit_lsda(const Matrix& d, const std::vector<int>& labels, int p, double alpha) {
  if (static_cast<Index>(labels.size()) != d.cols())
    fail(Err::DimensionMismatch, "fit_lsda label count mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail(Err::ConfigError, "fit_lsda alpha must lie in [0, 1]");
  const auto counts = class_counts(labels);
  const Index k = static_cast<Index>(counts.size()) - 1;

  DrModel model;
  model.method = Method::lsda;
  model.train_mean = column_mean(d);
  const Matrix dc = centered(d, model.train_mean);

  const LsdaGraphs graphs = lsda_graphs(d, labels, p);
  const Matrix mix = alpha * graphs.between.dense_laplacian() +
                     (1.0 - alpha) * graphs.within.dense_weights();
  Matrix left = dc * mix * dc.transpose();
  left = 0.5 * (left + left.transpose());
  const Vector sw = graphs.within.degree();
  Matrix right = dc * sw.asDiagonal() * dc.transpose();
  right = 0.5 * (right + right.transpose());

  const GenEigResult res = gen_eig(left, right);
  finish_linear_gep(model, dc, res, k);
  return model;
}

Matrix transform(const DrModel& model, const Matrix& x) {
  if (!model.supports_oos)
    fail(Err::OutOfSampleUnsupported,
         std::string(to_string(model.method)) + " models cannot map unseen samples");

  if (is_kernel_method(model.method)) {
    if (x.rows() != model.train_columns.rows())
      fail(Err::DimensionMismatch, "transform feature dimension mismatch");
    const Matrix kx = cross_kernel(model.train_columns, x, *model.kernel);
    Matrix kc = kx;
    kc.colwise() -= model.gram_row_mean;
    kc.rowwise() -= kx.colwise().mean();
    kc.array() += model.gram_mean;
    return model.a_factor.transpose() * kc;
  }

  if (x.rows() != model.train_mean.size())
    fail(Err::DimensionMismatch, "transform feature dimension mismatch");
  return model.projection.transpose() * (x.colwise() - model.train_mean);
}

namespace {

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) data.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<Index>(), j.at("cols").get<Index>());
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != m.size())
    fail(Err::ParseError, "matrix payload size mismatch");
  Index t = 0;
  for (Index jj = 0; jj < m.cols(); ++jj)
    for (Index i = 0; i < m.rows(); ++i) m(i, jj) = data[static_cast<std::size_t>(t++)].get<double>();
  return m;
}

json vector_to_json(const Vector& v) {
  json data = json::array();
  for (Index i = 0; i < v.size(); ++i) data.push_back(v(i));
  return data;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

void save_model(const DrModel& model, const std::string& path) {
  json doc;
  doc["format"] = "dimred-model-v1";
  doc["method"] = to_string(model.method);
  doc["k"] = model.k;
  doc["a_factor"] = matrix_to_json(model.a_factor);
  doc["b_factor"] = matrix_to_json(model.b_factor);
  doc["projection"] = matrix_to_json(model.projection);
  doc["train_mean"] = vector_to_json(model.train_mean);
  if (model.kernel) {
    doc["kernel"] = {{"kind", to_string(model.kernel->kind)},
                     {"sigma", model.kernel->sigma},
                     {"degree", model.kernel->degree},
                     {"offset", model.kernel->offset}};
  }
  doc["train_columns"] = matrix_to_json(model.train_columns);
  doc["gram_row_mean"] = vector_to_json(model.gram_row_mean);
  doc["gram_mean"] = model.gram_mean;
  doc["train_embedding"] = matrix_to_json(model.train_embedding);
  doc["spectrum"] = vector_to_json(model.spectrum);
  doc["ascending_spectrum"] = model.ascending_spectrum;
  doc["supports_oos"] = model.supports_oos;
  doc["ridge"] = model.ridge;
  doc["objective"] = model.objective;
  doc["warnings"] = model.warnings;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::ParseError, "cannot write '" + path + "'");
  out << doc.dump();
}

DrModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::ParseError, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(Err::ParseError, std::string("model parse failure: ") + e.what());
  }
  if (doc.value("format", "") != "dimred-model-v1")
    fail(Err::ParseError, "unrecognized model format");

  DrModel model;
  model.method = method_from_string(doc.at("method").get<std::string>());
  model.k = doc.at("k").get<Index>();
  model.a_factor = matrix_from_json(doc.at("a_factor"));
  model.b_factor = matrix_from_json(doc.at("b_factor"));
  model.projection = matrix_from_json(doc.at("projection"));
  model.train_mean = vector_from_json(doc.at("train_mean"));
  if (doc.contains("kernel")) {
    KernelSpec spec;
    spec.kind = kernel_kind_from_string(doc["kernel"].at("kind").get<std::string>());
    spec.sigma = doc["kernel"].at("sigma").get<double>();
    spec.degree = doc["kernel"].at("degree").get<int>();
    spec.offset = doc["kernel"].at("offset").get<double>();
    model.kernel = spec;
  }
  model.train_columns = matrix_from_json(doc.at("train_columns"));
  model.gram_row_mean = vector_from_json(doc.at("gram_row_mean"));
  model.gram_mean = doc.at("gram_mean").get<double>();
  model.train_embedding = matrix_from_json(doc.at("train_embedding"));
  model.spectrum = vector_from_json(doc.at("spectrum"));
  model.ascending_spectrum = doc.at("ascending_spectrum").get<bool>();
  model.supports_oos = doc.at("supports_oos").get<bool>();
  model.ridge = doc.at("ridge").get<double>();
  model.objective = doc.at("objective").get<double>();
  model.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return model;
}

}  // namespace dimred
