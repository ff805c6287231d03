#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dimred/dataset.hpp"
#include "dimred/dr.hpp"
#include "dimred/metrics.hpp"
#include "dimred/svm.hpp"

namespace dimred {

struct DatasetConfig {
  enum class Source { file, clusters, swiss_roll, au_like };
  Source source = Source::au_like;
  std::string path;  // file source
  int d = 16;        // clusters
  int n = 400;
  int classes = 2;
  double separation = 4.0;
  double noise = 0.0;  // swiss_roll
  int roll_n = 600;
  AuLikeParams au;   // au_like
};

struct MethodConfig {
  Method method = Method::none;
  EnergyPolicy policy = EnergyPolicy::by_fraction(0.98);
  KernelSpec kernel;      // sigma <= 0 requests the median heuristic
  int p = 12;
  double lle_reg = 1e-3;
  double alpha = 0.5;
  bool heat_affinity = true;  // lpp edge weighting
  PcaRoute pca_route = PcaRoute::spectral;
  LdaRoute lda_route = LdaRoute::gep;
  // Reduction-parameter grid searched jointly with the cost grid; keys are
  // sigma, degree, offset, p, reg, alpha, energy, k.
  std::map<std::string, std::vector<double>> tune_params;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<std::string> labels;  // empty = every label column in the data
  std::vector<MethodConfig> methods;
  double keep_fraction = 0.2;
  double neg_per_pos = 10.0;
  int cv_folds = 5;
  std::vector<double> cost_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
  double train_fraction = 0.6;
  bool leave_one_subject_out = false;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_schema();

struct CellReport {
  std::string label;
  std::string method_name;
  double auc = 0.0;
  double f1 = 0.0;
  double kappa = 0.0;
  double threshold = 0.0;
  double chosen_cost = 1.0;
  std::vector<std::pair<std::string, double>> chosen_params;
  double wall_seconds = 0.0;  // diagnostic only, never written to reports
  RocCurve roc;
  std::vector<std::string> warnings;
};

struct EvalReport {
  std::vector<CellReport> cells;
  const CellReport& cell(const std::string& label, const std::string& method) const;
};

// Full protocol per label: downsample, subject split, cross-validated tuning,
// refit, held-out scoring. `jobs` parallelizes (label, method) cells without
// changing any output byte.
EvalReport run_experiment(const ExperimentConfig& config, int jobs = 1);

// Writes report.csv, report.txt and roc/<label>_<method>.csv atomically.
void write_report(const EvalReport& report, const std::string& out_dir);

void emit_roc(const EvalReport& report, const std::string& label,
              const std::string& method, const std::string& path);

struct TimingConfig {
  int n = 3300;
  int d = 128;
  std::vector<Method> methods = {Method::pca,  Method::kpca, Method::lle, Method::lpp,
                                 Method::lda,  Method::kda,  Method::lsda};
  Method scaling_method = Method::kpca;
  std::vector<int> scaling_n = {500, 1000, 2000, 4000};
  int scaling_d = 16;
  int reps = 3;
  std::uint64_t seed = 7;
};

struct TimingRow {
  std::string method;
  int n = 0;
  int d = 0;
  double seconds = 0.0;
  std::string complexity;
};

std::vector<TimingRow> run_timing(const TimingConfig& config);
void write_timing(const std::vector<TimingRow>& rows, const std::string& path);

}  // namespace dimred
