#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dimred/experiment.hpp"

namespace dimred {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& msg) {
  fail(Err::ConfigError, path + ": " + msg);
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) config_fail(path + "." + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_number()) config_fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) config_fail(path + "." + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_string()) config_fail(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

KernelSpec parse_kernel(const json& j, const std::string& path) {
  KernelSpec spec;
  if (!j.is_object()) config_fail(path, "expected an object");
  try {
    spec.kind = kernel_kind_from_string(get_string(j, path, "kind", "linear"));
  } catch (const Error&) {
    config_fail(path + ".kind", "must be linear, rbf, or polynomial");
  }
  spec.sigma = get_number(j, path, "sigma", 0.0);
  spec.degree = static_cast<int>(get_number(j, path, "degree", 2));
  spec.offset = get_number(j, path, "offset", 1.0);
  return spec;
}

MethodConfig parse_method(const json& j, const std::string& path) {
  MethodConfig m;
  if (j.is_string()) {
    m.method = method_from_string(j.get<std::string>());
    return m;
  }
  if (!j.is_object()) config_fail(path, "expected a method name or object");
  try {
    m.method = method_from_string(get_string(j, path, "name", "", true));
  } catch (const Error& e) {
    if (std::string(e.what()).find("missing required") != std::string::npos) throw;
    config_fail(path + ".name", "unknown method");
  }

  if (j.contains("energy") && j.contains("k"))
    config_fail(path, "give either energy or k, not both");
  if (j.contains("energy"))
    m.policy = EnergyPolicy::by_fraction(get_number(j, path, "energy", 0.98));
  if (j.contains("k"))
    m.policy = EnergyPolicy::by_k(static_cast<Index>(get_number(j, path, "k", 1)));

  if (j.contains("kernel")) m.kernel = parse_kernel(j["kernel"], path + ".kernel");
  m.p = static_cast<int>(get_number(j, path, "p", m.p));
  m.lle_reg = get_number(j, path, "reg", m.lle_reg);
  m.alpha = get_number(j, path, "alpha", m.alpha);
  if (j.contains("affinity")) {
    const std::string mode = get_string(j, path, "affinity", "heat");
    if (mode == "heat") m.heat_affinity = true;
    else if (mode == "binary") m.heat_affinity = false;
    else config_fail(path + ".affinity", "must be heat or binary");
  }
  if (j.contains("route")) {
    const std::string route = get_string(j, path, "route", "");
    if (m.method == Method::pca) {
      if (route == "spectral") m.pca_route = PcaRoute::spectral;
      else if (route == "als") m.pca_route = PcaRoute::als;
      else config_fail(path + ".route", "pca route must be spectral or als");
    } else if (m.method == Method::lda) {
      if (route == "gep") m.lda_route = LdaRoute::gep;
      else if (route == "ls") m.lda_route = LdaRoute::ls;
      else config_fail(path + ".route", "lda route must be gep or ls");
    } else {
      config_fail(path + ".route", "route applies only to pca and lda");
    }
  }
  if (j.contains("tune")) {
    const json& tune = j["tune"];
    if (!tune.is_object()) config_fail(path + ".tune", "expected an object of value lists");
    static const std::set<std::string> allowed = {"sigma", "degree", "offset", "p",
                                                  "reg",   "alpha",  "energy", "k"};
    for (auto it = tune.begin(); it != tune.end(); ++it) {
      if (!allowed.count(it.key()))
        config_fail(path + ".tune." + it.key(), "unknown tunable parameter");
      if (!it.value().is_array() || it.value().empty())
        config_fail(path + ".tune." + it.key(), "expected a nonempty array of numbers");
      std::vector<double> values;
      for (const auto& v : it.value()) {
        if (!v.is_number()) config_fail(path + ".tune." + it.key(), "expected numbers");
        values.push_back(v.get<double>());
      }
      m.tune_params[it.key()] = std::move(values);
    }
  }
  return m;
}

DatasetConfig parse_dataset(const json& j, const std::string& path) {
  DatasetConfig d;
  if (!j.is_object()) config_fail(path, "expected an object");
  const std::string source = get_string(j, path, "source", "", true);
  if (source == "file") {
    d.source = DatasetConfig::Source::file;
    d.path = get_string(j, path, "path", "", true);
  } else if (source == "clusters") {
    d.source = DatasetConfig::Source::clusters;
    d.d = static_cast<int>(get_number(j, path, "d", d.d));
    d.n = static_cast<int>(get_number(j, path, "n", d.n));
    d.classes = static_cast<int>(get_number(j, path, "classes", d.classes));
    d.separation = get_number(j, path, "separation", d.separation);
  } else if (source == "swiss_roll") {
    d.source = DatasetConfig::Source::swiss_roll;
    d.roll_n = static_cast<int>(get_number(j, path, "n", d.roll_n));
    d.noise = get_number(j, path, "noise", d.noise);
  } else if (source == "au_like") {
    d.source = DatasetConfig::Source::au_like;
    d.au.n_subjects = static_cast<int>(get_number(j, path, "n_subjects", d.au.n_subjects));
    d.au.frames_per_subject =
        static_cast<int>(get_number(j, path, "frames_per_subject", d.au.frames_per_subject));
    d.au.d = static_cast<int>(get_number(j, path, "d", d.au.d));
    d.au.pos_rate = get_number(j, path, "pos_rate", d.au.pos_rate);
    d.au.signal_dims = static_cast<int>(get_number(j, path, "signal_dims", d.au.signal_dims));
    d.au.noise = get_number(j, path, "noise", d.au.noise);
    d.au.subject_offset = get_number(j, path, "subject_offset", d.au.subject_offset);
    d.au.signal_strength = get_number(j, path, "signal_strength", d.au.signal_strength);
  } else {
    config_fail(path + ".source", "must be file, clusters, swiss_roll, or au_like");
  }
  return d;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Err::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(Err::ConfigError, "config root must be an object");

  ExperimentConfig c;
  if (!doc.contains("dataset")) config_fail("dataset", "missing required field");
  c.dataset = parse_dataset(doc["dataset"], "dataset");

  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) config_fail("labels", "expected an array of strings");
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) config_fail("labels", "expected an array of strings");
      c.labels.push_back(l.get<std::string>());
    }
  }

  if (!doc.contains("methods") || !doc["methods"].is_array() || doc["methods"].empty())
    config_fail("methods", "expected a nonempty array");
  for (std::size_t i = 0; i < doc["methods"].size(); ++i)
    c.methods.push_back(
        parse_method(doc["methods"][i], "methods[" + std::to_string(i) + "]"));

  if (doc.contains("sampling")) {
    const json& s = doc["sampling"];
    if (!s.is_object()) config_fail("sampling", "expected an object");
    c.keep_fraction = get_number(s, "sampling", "keep_fraction", c.keep_fraction);
    c.neg_per_pos = get_number(s, "sampling", "neg_per_pos", c.neg_per_pos);
  }
  c.cv_folds = static_cast<int>(get_number(doc, "", "cv_folds", c.cv_folds));
  if (c.cv_folds < 2) config_fail("cv_folds", "need at least 2 folds");

  if (doc.contains("cost_grid")) {
    if (!doc["cost_grid"].is_array() || doc["cost_grid"].empty())
      config_fail("cost_grid", "expected a nonempty array of positive numbers");
    c.cost_grid.clear();
    for (const auto& v : doc["cost_grid"]) {
      if (!v.is_number() || v.get<double>() <= 0.0)
        config_fail("cost_grid", "expected positive numbers");
      c.cost_grid.push_back(v.get<double>());
    }
  }

  if (!doc.contains("seed")) config_fail("seed", "missing required field");
  if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
    config_fail("seed", "expected an integer");
  c.seed = doc["seed"].get<std::uint64_t>();
  c.seed_set = true;

  c.out_dir = get_string(doc, "", "out_dir", c.out_dir);
  c.train_fraction = get_number(doc, "", "train_fraction", c.train_fraction);
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    config_fail("train_fraction", "must lie strictly between 0 and 1");
  if (doc.contains("leave_one_subject_out")) {
    if (!doc["leave_one_subject_out"].is_boolean())
      config_fail("leave_one_subject_out", "expected a boolean");
    c.leave_one_subject_out = doc["leave_one_subject_out"].get<bool>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::ConfigError, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_schema() {
  return R"SCHEMA({
  "dataset": {
    "source": "file | clusters | swiss_roll | au_like   (required)",
    "path": "string      (file: CSV with columns f0..f{d-1}, au_* in {0,1}, subject)",
    "d": "int            (clusters/au_like: feature dimension)",
    "n": "int            (clusters/swiss_roll: sample count)",
    "classes": "int      (clusters)",
    "separation": "num   (clusters: distance between class means)",
    "noise": "num        (swiss_roll/au_like)",
    "n_subjects": "int   (au_like)",
    "frames_per_subject": "int (au_like)",
    "pos_rate": "num     (au_like: positive rate in (0, 0.5))",
    "signal_dims": "int  (au_like)",
    "subject_offset": "num (au_like: per-subject baseline magnitude)",
    "signal_strength": "num (au_like)"
  },
  "labels": ["au_1", "... (optional; default: every label column)"],
  "methods": [
    {
      "name": "none | pca | kpca | lpp | lle | lda | kda | lsda   (required)",
      "energy": "num in (0,1]  (rank by retained energy; default 0.98)",
      "k": "int               (fixed rank; mutually exclusive with energy)",
      "kernel": {"kind": "linear | rbf | polynomial", "sigma": "num (<=0: median heuristic)", "degree": "int", "offset": "num"},
      "p": "int               (graph neighbors; default 12)",
      "reg": "num             (lle local regularization; default 1e-3)",
      "alpha": "num in [0,1]  (lsda mixing; default 0.5)",
      "affinity": "heat | binary   (lpp edge weights; default heat)",
      "route": "spectral | als (pca) / gep | ls (lda)",
      "tune": {"sigma|degree|offset|p|reg|alpha|energy|k": ["values searched by cross-validated F1"]}
    }
  ],
  "sampling": {"keep_fraction": "num in (0,1] (default 0.2)", "neg_per_pos": "num (default 10)"},
  "cv_folds": "int (default 5)",
  "cost_grid": ["positive numbers (default 0.01 0.1 1 10 100)"],
  "seed": "uint (required; all randomness derives from it)",
  "out_dir": "string (default out)",
  "train_fraction": "num in (0,1) (default 0.6; subject-wise train share)",
  "leave_one_subject_out": "bool (default false)"
}
)SCHEMA";
}

}  // namespace dimred
