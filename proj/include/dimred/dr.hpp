#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimred/graphs.hpp"
#include "dimred/kernels.hpp"
#include "dimred/method.hpp"
#include "dimred/types.hpp"

namespace dimred {

// Rank selection: either the smallest k whose leading spectrum fraction
// reaches `fraction`, or a fixed k clamped to the spectrum length.
struct EnergyPolicy {
  enum class Mode { fraction, fixed };
  Mode mode = Mode::fraction;
  double fraction = 0.98;
  Index fixed_k = 1;

  static EnergyPolicy by_fraction(double f) { return {Mode::fraction, f, 1}; }
  static EnergyPolicy by_k(Index k) { return {Mode::fixed, 0.98, k}; }
};

Index select_k(const Vector& spectrum_descending, const EnergyPolicy& policy);

// A fitted reduction. Linear methods carry `projection` (d x k, applied to
// mean-centered input); kernel methods carry coefficient vectors in
// `a_factor` together with the retained training columns and Gram centering
// statistics. Embeddings hold one column per sample.
struct DrModel {
  Method method = Method::pca;
  Index k = 0;
  Matrix a_factor;        // regression factor A, or kernel coefficients
  Matrix b_factor;        // regression factor B where one is produced
  Matrix projection;      // d x k linear out-of-sample map
  Vector train_mean;      // d
  std::optional<KernelSpec> kernel;
  Matrix train_columns;   // kernel methods: retained training data (d x n)
  Vector gram_row_mean;   // kernel centering statistics
  double gram_mean = 0.0;
  Matrix train_embedding;  // k x n
  Vector spectrum;         // energy-accounting spectrum
  bool ascending_spectrum = false;  // smallest-eigenvector methods
  bool supports_oos = true;
  double ridge = 0.0;      // regularization applied by the generalized solver
  double objective = 0.0;  // method-specific fit objective where defined
  std::vector<std::string> warnings;
};

enum class PcaRoute { spectral, als };
enum class LdaRoute { gep, ls };

DrModel fit_pca(const Matrix& d, const EnergyPolicy& policy,
                PcaRoute route = PcaRoute::spectral, std::uint64_t seed = 0);

DrModel fit_kpca(const Matrix& d, const KernelSpec& spec, const EnergyPolicy& policy);

DrModel fit_lle(const Matrix& d, int p, double reg, Index k);
// Rank by energy over the inverted nonzero spectrum of (I-W)(I-W)^T.
DrModel fit_lle(const Matrix& d, int p, double reg, const EnergyPolicy& policy);

DrModel fit_lpp(const Matrix& d, const AffinityGraph& graph, const EnergyPolicy& policy);

// k is always #classes - 1. A pinned `ridge` bypasses the solver's ladder.
DrModel fit_lda(const Matrix& d, const std::vector<int>& labels,
                LdaRoute route = LdaRoute::gep, std::optional<double> ridge = {},
                std::uint64_t seed = 0);

DrModel fit_kda(const Matrix& d, const std::vector<int>& labels, const KernelSpec& spec,
                std::optional<double> ridge = {});

DrModel fit_lsda(const Matrix& d, const std::vector<int>& labels, int p, double alpha);

// Maps query columns into the model's embedding space (k x m). LLE models
// reject this with OutOfSampleUnsupported.
Matrix transform(const DrModel& model, const Matrix& x);

void save_model(const DrModel& model, const std::string& path);
DrModel load_model(const std::string& path);

}  // namespace dimred
