#include "dimred/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "dimred/linalg.hpp"
#include "dimred/rng.hpp"

namespace dimred {

namespace fs = std::filesystem;

const CellReport& EvalReport::cell(const std::string& label, const std::string& method) const {
  for (const auto& c : cells)
    if (c.label == label && c.method_name == method) return c;
  fail(Err::MissingCell, "no report cell for (" + label + ", " + method + ")");
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

FeatureMatrix materialize(const DatasetConfig& cfg, std::uint64_t seed) {
  switch (cfg.source) {
    case DatasetConfig::Source::file: return load_csv(cfg.path);
    case DatasetConfig::Source::clusters:
      return gen_clusters(cfg.d, cfg.n, cfg.classes, cfg.separation, seed);
    case DatasetConfig::Source::swiss_roll: return gen_swiss_roll(cfg.roll_n, cfg.noise, seed);
    case DatasetConfig::Source::au_like: return gen_au_like(cfg.au, seed);
  }
  fail(Err::ConfigError, "unhandled dataset source");
}

// A fitted reduction plus its training embedding; method `none` passes the
// raw features through.
struct Embedder {
  std::optional<DrModel> model;
  Matrix train_embedding;

  Matrix map(const Matrix& x) const {
    return model ? transform(*model, x) : x;
  }
};

KernelSpec resolve_kernel(const KernelSpec& spec, const Matrix& x) {
  KernelSpec out = spec;
  if (out.kind == KernelKind::rbf && out.sigma <= 0.0)
    out.sigma = median_pairwise_sigma(x);
  return out;
}

Embedder fit_embedder(const MethodConfig& cfg, const Matrix& x, const std::vector<int>& y01,
                      std::uint64_t seed) {
  Embedder out;
  switch (cfg.method) {
    case Method::none:
      out.train_embedding = x;
      return out;
    case Method::pca:
      out.model = fit_pca(x, cfg.policy, cfg.pca_route, seed);
      break;
    case Method::kpca:
      out.model = fit_kpca(x, resolve_kernel(cfg.kernel, x), cfg.policy);
      break;
    case Method::lpp: {
      const AffinityGraph knn = knn_graph(x, cfg.p);
      const AffinityGraph graph =
          cfg.heat_affinity ? heat_affinity(x, knn, median_edge_sigma(x, knn)) : knn;
      out.model = fit_lpp(x, graph, cfg.policy);
      break;
    }
    case Method::lle:
      out.model = fit_lle(x, cfg.p, cfg.lle_reg, cfg.policy);
      break;
    case Method::lda:
      out.model = fit_lda(x, y01, cfg.lda_route, {}, seed);
      break;
    case Method::kda:
      out.model = fit_kda(x, y01, resolve_kernel(cfg.kernel, x));
      break;
    case Method::lsda:
      out.model = fit_lsda(x, y01, cfg.p, cfg.alpha);
      break;
  }
  out.train_embedding = out.model->train_embedding;
  return out;
}

MethodConfig apply_combo(const MethodConfig& base, const std::map<std::string, double>& combo) {
  MethodConfig cfg = base;
  for (const auto& [key, value] : combo) {
    if (key == "sigma") cfg.kernel.sigma = value;
    else if (key == "degree") cfg.kernel.degree = static_cast<int>(value);
    else if (key == "offset") cfg.kernel.offset = value;
    else if (key == "p") cfg.p = static_cast<int>(value);
    else if (key == "reg") cfg.lle_reg = value;
    else if (key == "alpha") cfg.alpha = value;
    else if (key == "energy") cfg.policy = EnergyPolicy::by_fraction(value);
    else if (key == "k") cfg.policy = EnergyPolicy::by_k(static_cast<Index>(value));
    else fail(Err::ConfigError, "unknown tunable parameter '" + key + "'");
  }
  return cfg;
}

std::vector<std::map<std::string, double>> expand_combos(
    const std::map<std::string, std::vector<double>>& grid) {
  std::vector<std::map<std::string, double>> out{{}};
  for (const auto& [key, values] : grid) {
    std::vector<std::map<std::string, double>> next;
    next.reserve(out.size() * values.size());
    for (const auto& base : out)
      for (double v : values) {
        auto m = base;
        m[key] = v;
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

// Fit failures that depend on the data draw degrade gracefully during
// tuning; anything else (dimension bugs, unsupported transforms) propagates.
bool degradable_fit_error(Err code) {
  switch (code) {
    case Err::SingleClass:
    case Err::TooFewSamples:
    case Err::TooFewSubjects:
    case Err::NotPositiveDefinite:
    case Err::Singular:
    case Err::SingularLocalGram:
    case Err::DegenerateData:
    case Err::AllZeroSpectrum:
      return true;
    default:
      return false;
  }
}

std::vector<int> to_pm(const std::vector<int>& y01) {
  std::vector<int> out;
  out.reserve(y01.size());
  for (int v : y01) out.push_back(v == 1 ? 1 : -1);
  return out;
}

struct BestSetting {
  std::size_t combo = 0;
  double cost = 1.0;
  double mean_f1 = -1.0;
};

// Subject-wise cross-validated grid search; the reduction is refit inside
// every fold so no test information leaks into it.
BestSetting tune_cell(const MethodConfig& mc, const FeatureMatrix& train,
                      const std::vector<int>& y01, const std::vector<double>& cost_grid,
                      int cv_folds, std::uint64_t seed_cell,
                      const std::vector<std::map<std::string, double>>& combos,
                      std::vector<std::string>& warnings) {
  const std::vector<int> fold_of = subject_folds(train.subjects, cv_folds, seed_cell);
  const Index n = train.count();

  std::vector<std::vector<Index>> fold_members(static_cast<std::size_t>(cv_folds));
  for (Index t = 0; t < n; ++t)
    fold_members[static_cast<std::size_t>(fold_of[static_cast<std::size_t>(t)])].push_back(t);

  std::vector<std::vector<double>> f1_sum(combos.size(),
                                          std::vector<double>(cost_grid.size(), 0.0));
  const std::vector<int> ypm = to_pm(y01);

  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    const MethodConfig cfg = apply_combo(mc, combos[ci]);
    for (int f = 0; f < cv_folds; ++f) {
      std::vector<Index> tr;
      const std::vector<Index>& va = fold_members[static_cast<std::size_t>(f)];
      for (Index t = 0; t < n; ++t)
        if (fold_of[static_cast<std::size_t>(t)] != f) tr.push_back(t);
      if (tr.empty() || va.empty()) continue;

      Matrix xtr(train.dim(), static_cast<Index>(tr.size()));
      std::vector<int> ytr01, ytrpm;
      for (std::size_t t = 0; t < tr.size(); ++t) {
        xtr.col(static_cast<Index>(t)) = train.features.col(tr[t]);
        ytr01.push_back(y01[static_cast<std::size_t>(tr[t])]);
        ytrpm.push_back(ypm[static_cast<std::size_t>(tr[t])]);
      }
      Matrix xva(train.dim(), static_cast<Index>(va.size()));
      std::vector<int> yva01;
      for (std::size_t t = 0; t < va.size(); ++t) {
        xva.col(static_cast<Index>(t)) = train.features.col(va[t]);
        yva01.push_back(y01[static_cast<std::size_t>(va[t])]);
      }

      Embedder emb;
      Matrix eva;
      try {
        emb = fit_embedder(cfg, xtr, ytr01, derive_seed(seed_cell, "fold_fit"));
        eva = emb.map(xva);
      } catch (const Error& e) {
        if (!degradable_fit_error(e.code())) throw;
        warnings.push_back("fold " + std::to_string(f) + " combo " + std::to_string(ci) +
                           " skipped: " + e.what());
        continue;
      }

      for (std::size_t gi = 0; gi < cost_grid.size(); ++gi) {
        try {
          const LinearSvmModel svm =
              train_svm(emb.train_embedding, ytrpm, cost_grid[gi],
                        derive_seed(seed_cell, "svm"));
          const Vector scores = decision_scores(svm, eva);
          ConfusionCounts c;
          for (Index t = 0; t < scores.size(); ++t) {
            const bool pred = scores(t) > 0.0;
            const bool truth = yva01[static_cast<std::size_t>(t)] == 1;
            if (pred && truth) ++c.tp;
            else if (pred) ++c.fp;
            else if (truth) ++c.fn;
            else ++c.tn;
          }
          f1_sum[ci][gi] += f1_score(c);
        } catch (const Error& e) {
          if (e.code() != Err::SingleClass) throw;
        }
      }
    }
  }

  BestSetting best;
  for (std::size_t ci = 0; ci < combos.size(); ++ci)
    for (std::size_t gi = 0; gi < cost_grid.size(); ++gi) {
      const double mean = f1_sum[ci][gi] / cv_folds;
      if (mean > best.mean_f1 ||
          (mean == best.mean_f1 && cost_grid[gi] < best.cost)) {
        best.mean_f1 = mean;
        best.combo = ci;
        best.cost = cost_grid[gi];
      }
    }
  return best;
}

CellReport run_cell(const std::string& label, const MethodConfig& mc,
                    const FeatureMatrix& train, const FeatureMatrix& test,
                    const ExperimentConfig& config, std::uint64_t seed_cell) {
  const auto t0 = std::chrono::steady_clock::now();
  CellReport cell;
  cell.label = label;
  cell.method_name = to_string(mc.method);

  const std::vector<int>& y01 = train.label(label);
  const std::vector<int>& y01_test = test.label(label);
  const auto combos = expand_combos(mc.tune_params);

  const BestSetting best = tune_cell(mc, train, y01, config.cost_grid, config.cv_folds,
                                     seed_cell, combos, cell.warnings);
  cell.chosen_cost = best.cost;
  for (const auto& [key, value] : combos[best.combo]) cell.chosen_params.emplace_back(key, value);

  // Refit on the full training partition with the winning setting.
  const MethodConfig cfg = apply_combo(mc, combos[best.combo]);
  const Embedder emb = fit_embedder(cfg, train.features, y01, derive_seed(seed_cell, "refit"));
  if (emb.model) {
    for (const auto& w : emb.model->warnings) cell.warnings.push_back(w);
  }
  const LinearSvmModel svm = train_svm(emb.train_embedding, to_pm(y01), best.cost,
                                       derive_seed(seed_cell, "svm"));

  const Vector train_scores = decision_scores(svm, emb.train_embedding);
  std::vector<double> tr_scores(train_scores.data(), train_scores.data() + train_scores.size());
  cell.threshold = best_f1_threshold(tr_scores, y01);

  const Vector test_scores = decision_scores(svm, emb.map(test.features));
  std::vector<double> te_scores(test_scores.data(), test_scores.data() + test_scores.size());
  cell.roc = roc_and_auc(te_scores, y01_test);
  cell.auc = cell.roc.auc;
  const ConfusionCounts conf = confusion_at(te_scores, y01_test, cell.threshold);
  cell.f1 = f1_score(conf);
  cell.kappa = cohens_kappa(conf);

  cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

// Leave-one-subject-out variant: tune once over all subjects, then score each
// subject with a model fit on the others; scores are pooled for AUC and the
// per-round thresholded confusions are summed for F1/kappa.
CellReport run_cell_loso(const std::string& label, const MethodConfig& mc,
                         const FeatureMatrix& data, const ExperimentConfig& config,
                         std::uint64_t seed_cell) {
  const auto t0 = std::chrono::steady_clock::now();
  CellReport cell;
  cell.label = label;
  cell.method_name = to_string(mc.method);

  const std::vector<int>& y01 = data.label(label);
  const auto combos = expand_combos(mc.tune_params);
  const BestSetting best = tune_cell(mc, data, y01, config.cost_grid, config.cv_folds,
                                     seed_cell, combos, cell.warnings);
  cell.chosen_cost = best.cost;
  for (const auto& [key, value] : combos[best.combo]) cell.chosen_params.emplace_back(key, value);
  const MethodConfig cfg = apply_combo(mc, combos[best.combo]);

  std::set<std::string> subjects(data.subjects.begin(), data.subjects.end());
  std::vector<double> pooled_scores;
  std::vector<int> pooled_labels;
  ConfusionCounts conf;
  double threshold_sum = 0.0;
  int rounds = 0;

  for (const std::string& held : subjects) {
    std::vector<Index> tr, te;
    for (Index t = 0; t < data.count(); ++t)
      (data.subjects[static_cast<std::size_t>(t)] == held ? te : tr).push_back(t);
    const FeatureMatrix train = data.select(tr);
    const FeatureMatrix test = data.select(te);
    const std::vector<int>& ytr = train.label(label);
    try {
      const Embedder emb =
          fit_embedder(cfg, train.features, ytr, derive_seed(seed_cell, "loso:" + held));
      const LinearSvmModel svm = train_svm(emb.train_embedding, to_pm(ytr), best.cost,
                                           derive_seed(seed_cell, "svm"));
      const Vector trs = decision_scores(svm, emb.train_embedding);
      std::vector<double> trv(trs.data(), trs.data() + trs.size());
      const double thr = best_f1_threshold(trv, ytr);
      threshold_sum += thr;
      ++rounds;

      const Vector tes = decision_scores(svm, emb.map(test.features));
      const std::vector<int>& yte = test.label(label);
      for (Index t = 0; t < tes.size(); ++t) {
        pooled_scores.push_back(tes(t));
        pooled_labels.push_back(yte[static_cast<std::size_t>(t)]);
      }
      const std::vector<double> tev(tes.data(), tes.data() + tes.size());
      const ConfusionCounts c = confusion_at(tev, yte, thr);
      conf.tp += c.tp; conf.fp += c.fp; conf.tn += c.tn; conf.fn += c.fn;
    } catch (const Error& e) {
      if (!degradable_fit_error(e.code())) throw;
      cell.warnings.push_back("subject " + held + " round skipped: " + e.what());
    }
  }
  if (rounds == 0) fail(Err::SingleClass, "every leave-one-subject-out round degenerated");

  cell.roc = roc_and_auc(pooled_scores, pooled_labels);
  cell.auc = cell.roc.auc;
  cell.f1 = f1_score(conf);
  cell.kappa = cohens_kappa(conf);
  cell.threshold = threshold_sum / rounds;
  cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

struct LabelData {
  std::string label;
  FeatureMatrix train;
  FeatureMatrix test;
  FeatureMatrix all;  // leave-one-subject-out mode
  std::vector<std::string> warnings;
};

LabelData prepare_label(const ExperimentConfig& config, const FeatureMatrix& fm,
                        const std::string& label) {
  LabelData out;
  out.label = label;
  const std::uint64_t seed_label = derive_seed(config.seed, "label:" + label);

  DownsampleResult ds = downsample(fm.label(label), fm.subjects, config.keep_fraction,
                                   config.neg_per_pos, seed_label);
  out.warnings = std::move(ds.warnings);
  FeatureMatrix sub = fm.select(ds.indices);

  if (config.leave_one_subject_out) {
    out.all = std::move(sub);
    return out;
  }

  std::set<std::string> uniq(sub.subjects.begin(), sub.subjects.end());
  if (uniq.size() < 2) fail(Err::TooFewSubjects, "need at least 2 subjects to split");
  std::vector<std::string> ordered(uniq.begin(), uniq.end());
  Rng rng(derive_seed(seed_label, "split"));
  rng.shuffle(ordered);
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.train_fraction * ordered.size())), 1,
      ordered.size() - 1);
  const std::set<std::string> train_subjects(ordered.begin(), ordered.begin() + n_train);

  std::vector<Index> tr, te;
  for (Index t = 0; t < sub.count(); ++t)
    (train_subjects.count(sub.subjects[static_cast<std::size_t>(t)]) ? tr : te).push_back(t);
  out.train = sub.select(tr);
  out.test = sub.select(te);

  // Identity leakage would invalidate the whole protocol; fail loudly.
  for (const auto& s : out.test.subjects)
    if (train_subjects.count(s))
      throw std::logic_error("subject '" + s + "' appears in both partitions");
  return out;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& config, int jobs) {
  if (config.methods.empty()) fail(Err::ConfigError, "no methods configured");
  const FeatureMatrix fm = materialize(config.dataset, config.seed);
  fm.validate();

  std::vector<std::string> labels = config.labels;
  if (labels.empty()) labels = fm.label_names;
  if (labels.empty()) fail(Err::ConfigError, "dataset exposes no label columns");
  for (const auto& l : labels) fm.label(l);  // SchemaMismatch early

  std::vector<LabelData> prepared;
  prepared.reserve(labels.size());
  for (const auto& label : labels) prepared.push_back(prepare_label(config, fm, label));

  struct Task {
    std::size_t label_idx;
    std::size_t method_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t li = 0; li < prepared.size(); ++li)
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) tasks.push_back({li, mi});

  std::vector<CellReport> cells(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> cursor{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const LabelData& ld = prepared[task.label_idx];
      const MethodConfig& mc = config.methods[task.method_idx];
      const std::uint64_t seed_cell =
          derive_seed(derive_seed(config.seed, "label:" + ld.label),
                      "method:" + std::to_string(task.method_idx) + ":" + to_string(mc.method));
      try {
        CellReport cell = config.leave_one_subject_out
                              ? run_cell_loso(ld.label, mc, ld.all, config, seed_cell)
                              : run_cell(ld.label, mc, ld.train, ld.test, config, seed_cell);
        cell.warnings.insert(cell.warnings.begin(), ld.warnings.begin(), ld.warnings.end());
        cells[i] = std::move(cell);
      } catch (const Error& e) {
        errors[i] = std::make_exception_ptr(Error(
            e.code(), std::string("cell (") + ld.label + ", " + to_string(mc.method) + "): " +
                          e.what()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  EvalReport report;
  report.cells = std::move(cells);
  return report;
}

namespace {

void atomic_write(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::ParseError, "cannot write '" + tmp.string() + "'");
    out << contents;
  }
  fs::rename(tmp, path);
}

std::string roc_csv(const RocCurve& roc) {
  std::string text = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : roc.points)
    text += format_double(fpr) + "," + format_double(tpr) + "\n";
  return text;
}

std::string aligned_block(const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<std::string>& methods,
                          const std::function<double(std::size_t, std::size_t)>& value) {
  std::ostringstream out;
  out << title << "\n";
  const int label_w = 10;
  out << std::left;
  {
    std::ostringstream head;
    head << "  ";
    head.width(label_w);
    head << std::left << "label";
    out << head.str();
  }
  for (const auto& m : methods) {
    std::ostringstream col;
    col.width(8);
    col << std::right << m;
    out << col.str();
  }
  out << "\n";
  for (std::size_t li = 0; li < labels.size(); ++li) {
    std::ostringstream row;
    row << "  ";
    row.width(label_w);
    row << std::left << labels[li];
    out << row.str();
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%8.3f", value(li, mi));
      out << buf;
    }
    out << "\n";
  }
  out << "\n";
  return out.str();
}

}  // namespace

void write_report(const EvalReport& report, const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "roc");

  std::string csv = "label,method,metric,value\n";
  for (const auto& c : report.cells) {
    const auto row = [&](const std::string& metric, double v) {
      csv += c.label + "," + c.method_name + "," + metric + "," + format_double(v) + "\n";
    };
    row("auc", c.auc);
    row("f1", c.f1);
    row("kappa", c.kappa);
    row("threshold", c.threshold);
    row("cost", c.chosen_cost);
    for (const auto& [key, value] : c.chosen_params) row("param_" + key, value);
  }
  atomic_write(fs::path(out_dir) / "report.csv", csv);

  // Tables mirror the AUC | F1 block layout, plus kappa.
  std::vector<std::string> labels, methods;
  for (const auto& c : report.cells) {
    if (std::find(labels.begin(), labels.end(), c.label) == labels.end())
      labels.push_back(c.label);
    if (std::find(methods.begin(), methods.end(), c.method_name) == methods.end())
      methods.push_back(c.method_name);
  }
  const auto metric_at = [&](const std::string& label, const std::string& method,
                             double CellReport::*field) {
    return report.cell(label, method).*field;
  };
  std::string txt;
  txt += aligned_block("Area Under the ROC Curve", labels, methods,
                       [&](std::size_t li, std::size_t mi) {
                         return metric_at(labels[li], methods[mi], &CellReport::auc);
                       });
  txt += aligned_block("F1 Score", labels, methods, [&](std::size_t li, std::size_t mi) {
    return metric_at(labels[li], methods[mi], &CellReport::f1);
  });
  txt += aligned_block("Cohen's Kappa", labels, methods, [&](std::size_t li, std::size_t mi) {
    return metric_at(labels[li], methods[mi], &CellReport::kappa);
  });
  atomic_write(fs::path(out_dir) / "report.txt", txt);

  for (const auto& c : report.cells)
    atomic_write(fs::path(out_dir) / "roc" / (c.label + "_" + c.method_name + ".csv"),
                 roc_csv(c.roc));
}

void emit_roc(const EvalReport& report, const std::string& label, const std::string& method,
              const std::string& path) {
  const CellReport& c = report.cell(label, method);
  atomic_write(path, roc_csv(c.roc));
}

std::vector<TimingRow> run_timing(const TimingConfig& config) {
  static const std::map<Method, std::string> complexity = {
      {Method::pca, "O(d^3)"},   {Method::kpca, "O(n^3)"}, {Method::lle, "O(p n^2)"},
      {Method::lpp, "O(p n^2)"}, {Method::lda, "O(d n t + t^3), t = min(d, n)"},
      {Method::kda, "O(n^3)"},   {Method::lsda, "O(p n^2)"}};

  const auto make_data = [&](int n, int d) {
    AuLikeParams params;
    params.n_subjects = 10;
    params.frames_per_subject = std::max(1, n / 10);
    params.d = d;
    params.pos_rate = 1.0 / 11.0;  // 300 positives per 3300 samples
    params.signal_dims = std::min(8, d);
    params.noise = 1.0;
    return gen_au_like(params, config.seed);
  };

  const auto fit_once = [&](Method m, const FeatureMatrix& fm) {
    MethodConfig cfg;
    cfg.method = m;
    cfg.kernel.kind = KernelKind::rbf;
    cfg.kernel.sigma = 0.0;  // median heuristic
    const auto t0 = std::chrono::steady_clock::now();
    fit_embedder(cfg, fm.features, fm.labels[0], config.seed);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::vector<TimingRow> rows;
  const FeatureMatrix base = make_data(config.n, config.d);
  for (Method m : config.methods) {
    std::vector<double> times;
    for (int r = 0; r < std::max(1, config.reps); ++r) times.push_back(fit_once(m, base));
    std::sort(times.begin(), times.end());
    TimingRow row;
    row.method = to_string(m);
    row.n = config.n;
    row.d = config.d;
    row.seconds = times[times.size() / 2];
    row.complexity = complexity.count(m) ? complexity.at(m) : "";
    rows.push_back(row);
  }

  for (int n : config.scaling_n) {
    const FeatureMatrix fm = make_data(n, config.scaling_d);
    TimingRow row;
    row.method = to_string(config.scaling_method);
    row.n = n;
    row.d = config.scaling_d;
    row.seconds = fit_once(config.scaling_method, fm);
    row.complexity = complexity.count(config.scaling_method)
                         ? complexity.at(config.scaling_method)
                         : "";
    rows.push_back(row);
  }
  return rows;
}

void write_timing(const std::vector<TimingRow>& rows, const std::string& path) {
  std::string csv = "method,n,d,seconds,complexity\n";
  for (const auto& r : rows)
    csv += r.method + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," +
           format_double(r.seconds) + ",\"" + r.complexity + "\"\n";
  atomic_write(path, csv);
}

}  // namespace dimred
