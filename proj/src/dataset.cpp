#include "dimred/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dimred/linalg.hpp"
#include "dimred/rng.hpp"

namespace dimred {

const std::vector<int>& FeatureMatrix::label(const std::string& name) const {
  for (std::size_t i = 0; i < label_names.size(); ++i)
    if (label_names[i] == name) return labels[i];
  fail(Err::SchemaMismatch, "no label column named '" + name + "'");
}

FeatureMatrix FeatureMatrix::select(const std::vector<Index>& idx) const {
  FeatureMatrix out;
  out.features.resize(features.rows(), static_cast<Index>(idx.size()));
  out.label_names = label_names;
  out.labels.assign(labels.size(), {});
  out.subjects.reserve(idx.size());
  out.meta = meta;
  if (ground_truth.cols() == features.cols() && ground_truth.size() > 0)
    out.ground_truth.resize(ground_truth.rows(), static_cast<Index>(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const Index j = idx[t];
    if (j < 0 || j >= features.cols())
      fail(Err::DimensionMismatch, "select index out of range");
    out.features.col(static_cast<Index>(t)) = features.col(j);
    for (std::size_t l = 0; l < labels.size(); ++l)
      out.labels[l].push_back(labels[l][static_cast<std::size_t>(j)]);
    out.subjects.push_back(subjects[static_cast<std::size_t>(j)]);
    if (out.ground_truth.size() > 0)
      out.ground_truth.col(static_cast<Index>(t)) = ground_truth.col(j);
  }
  return out;
}

void FeatureMatrix::validate() const {
  const std::size_t n = static_cast<std::size_t>(features.cols());
  if (subjects.size() != n) fail(Err::SchemaMismatch, "subject count differs from sample count");
  if (labels.size() != label_names.size())
    fail(Err::SchemaMismatch, "label vectors do not match label names");
  for (const auto& l : labels)
    if (l.size() != n) fail(Err::SchemaMismatch, "label length differs from sample count");
  require_finite(features, "feature matrix");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    fail(Err::ParseError, "line " + std::to_string(line_no) + ": bad numeric field '" + s + "'");
  if (!std::isfinite(v))
    fail(Err::ParseError, "line " + std::to_string(line_no) + ": non-finite value '" + s + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

FeatureMatrix load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::ParseError, "cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) fail(Err::ParseError, "empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  std::vector<int> feature_cols, label_cols;
  int subject_col = -1;
  FeatureMatrix fm;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == schema.subject_column) {
      subject_col = static_cast<int>(c);
    } else if (h.rfind(schema.label_prefix, 0) == 0) {
      label_cols.push_back(static_cast<int>(c));
      fm.label_names.push_back(h);
    } else if (h.rfind(schema.feature_prefix, 0) == 0) {
      feature_cols.push_back(static_cast<int>(c));
    } else {
      fail(Err::SchemaMismatch, "unrecognized column '" + h + "'");
    }
  }
  if (subject_col < 0)
    fail(Err::SchemaMismatch, "missing subject column '" + schema.subject_column + "'");
  if (feature_cols.empty()) fail(Err::SchemaMismatch, "no feature columns found");

  fm.labels.assign(fm.label_names.size(), {});
  std::vector<Vector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      fail(Err::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
    Vector feat(static_cast<Index>(feature_cols.size()));
    for (std::size_t i = 0; i < feature_cols.size(); ++i)
      feat(static_cast<Index>(i)) =
          parse_double(fields[static_cast<std::size_t>(feature_cols[i])], line_no);
    rows.push_back(std::move(feat));
    for (std::size_t i = 0; i < label_cols.size(); ++i) {
      const std::string& f = fields[static_cast<std::size_t>(label_cols[i])];
      if (f != "0" && f != "1")
        fail(Err::ParseError,
             "line " + std::to_string(line_no) + ": label field must be 0 or 1, got '" + f + "'");
      fm.labels[i].push_back(f == "1" ? 1 : 0);
    }
    fm.subjects.push_back(fields[static_cast<std::size_t>(subject_col)]);
  }
  if (rows.empty()) fail(Err::ParseError, "no data rows in '" + path + "'");

  fm.features.resize(static_cast<Index>(feature_cols.size()), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) fm.features.col(static_cast<Index>(j)) = rows[j];
  fm.validate();
  return fm;
}

void save_csv(const FeatureMatrix& fm, const std::string& path, const CsvSchema& schema) {
  fm.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::ParseError, "cannot write '" + path + "'");

  for (Index i = 0; i < fm.dim(); ++i) out << schema.feature_prefix << i << ",";
  for (const auto& name : fm.label_names) out << name << ",";
  out << schema.subject_column << "\n";

  for (Index j = 0; j < fm.count(); ++j) {
    for (Index i = 0; i < fm.dim(); ++i) out << format_double(fm.features(i, j)) << ",";
    for (const auto& l : fm.labels) out << l[static_cast<std::size_t>(j)] << ",";
    out << fm.subjects[static_cast<std::size_t>(j)] << "\n";
  }
}

namespace {

std::string subject_name(int s) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%02d", s);
  return buf;
}

}  // namespace

FeatureMatrix gen_clusters(int d, int n, int classes, double separation, std::uint64_t seed) {
  if (d < 1 || n < classes || classes < 1) fail(Err::ConfigError, "gen_clusters bad dimensions");
  if (separation < 0.0) fail(Err::ConfigError, "gen_clusters separation must be nonnegative");
  Rng rng(derive_seed(seed, "gen_clusters"));

  // Orthonormal mean directions scaled so pairwise mean distances equal
  // `separation`.
  Matrix dirs(d, classes);
  for (Index j = 0; j < classes; ++j) {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = rng.normal();
    for (Index t = 0; t < j; ++t) v -= dirs.col(t).dot(v) * dirs.col(t);
    const double norm = v.norm();
    dirs.col(j) = norm > 1e-12 ? Vector(v / norm) : Vector::Unit(d, j % d);
  }
  const double scale = separation / std::numbers::sqrt2;

  FeatureMatrix fm;
  fm.features.resize(d, n);
  const int n_subjects = std::min(10, n);
  std::vector<int> class_of(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int c = j % classes;
    class_of[static_cast<std::size_t>(j)] = c;
    for (Index i = 0; i < d; ++i) fm.features(i, j) = rng.normal();
    fm.features.col(j) += scale * dirs.col(c);
    fm.subjects.push_back(subject_name(j * n_subjects / n));
  }
  for (int c = 1; c < classes; ++c) {
    fm.label_names.push_back("au_" + std::to_string(c));
    std::vector<int> marks(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) marks[static_cast<std::size_t>(j)] = class_of[static_cast<std::size_t>(j)] == c ? 1 : 0;
    fm.labels.push_back(std::move(marks));
  }
  fm.meta["generator"] = "clusters";
  return fm;
}

FeatureMatrix gen_swiss_roll(int n, double noise, std::uint64_t seed) {
  if (n < 10) fail(Err::TooFewSamples, "gen_swiss_roll needs n >= 10");
  Rng rng(derive_seed(seed, "gen_swiss_roll"));

  FeatureMatrix fm;
  fm.features.resize(3, n);
  fm.ground_truth.resize(2, n);
  const int n_subjects = std::min(10, n);
  for (int j = 0; j < n; ++j) {
    const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
    const double h = 21.0 * rng.uniform();
    fm.features(0, j) = t * std::cos(t);
    fm.features(1, j) = h;
    fm.features(2, j) = t * std::sin(t);
    if (noise > 0.0)
      for (Index i = 0; i < 3; ++i) fm.features(i, j) += noise * rng.normal();
    fm.ground_truth(0, j) = t;
    fm.ground_truth(1, j) = h;
    fm.subjects.push_back(subject_name(j * n_subjects / n));
  }
  fm.meta["generator"] = "swiss_roll";
  return fm;
}

FeatureMatrix gen_au_like(const AuLikeParams& p, std::uint64_t seed) {
  if (p.n_subjects < 1 || p.frames_per_subject < 1 || p.d < 1)
    fail(Err::ConfigError, "gen_au_like bad dimensions");
  if (!(p.pos_rate > 0.0 && p.pos_rate < 0.5))
    fail(Err::ConfigError, "gen_au_like pos_rate must be in (0, 0.5)");
  if (p.signal_dims < 1 || p.signal_dims > p.d)
    fail(Err::ConfigError, "gen_au_like signal_dims out of range");
  Rng rng(derive_seed(seed, "gen_au_like"));

  // Fixed-direction class signal on a deterministic subset of dimensions.
  const auto sig_dims = rng.sample_indices(static_cast<std::size_t>(p.d),
                                           static_cast<std::size_t>(p.signal_dims));
  Vector signal = Vector::Zero(p.d);
  const double per_dim = p.signal_strength / std::sqrt(static_cast<double>(p.signal_dims));
  for (std::size_t i : sig_dims) signal(static_cast<Index>(i)) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * per_dim;

  const int n = p.n_subjects * p.frames_per_subject;
  FeatureMatrix fm;
  fm.features.resize(p.d, n);
  fm.subjects.reserve(static_cast<std::size_t>(n));
  std::vector<int> marks(static_cast<std::size_t>(n), 0);

  for (int s = 0; s < p.n_subjects; ++s) {
    Vector offset(p.d);
    for (Index i = 0; i < p.d; ++i) offset(i) = p.subject_offset * rng.normal();

    // Place the exact per-subject positive budget as contiguous runs.
    const int frames = p.frames_per_subject;
    const int budget = std::max(1, static_cast<int>(std::lround(p.pos_rate * frames)));
    std::vector<char> pos(static_cast<std::size_t>(frames), 0);
    int remaining = budget;
    while (remaining > 0) {
      int len = std::min<int>(remaining, 4 + static_cast<int>(rng.below(9)));
      bool placed = false;
      for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
        const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(frames - len + 1)));
        bool free = true;
        for (int t = start; t < start + len; ++t)
          if (pos[static_cast<std::size_t>(t)]) { free = false; break; }
        if (!free) continue;
        for (int t = start; t < start + len; ++t) pos[static_cast<std::size_t>(t)] = 1;
        placed = true;
      }
      if (!placed) {
        // Fall back to the first free slot, one frame at a time.
        len = 1;
        for (int t = 0; t < frames; ++t)
          if (!pos[static_cast<std::size_t>(t)]) { pos[static_cast<std::size_t>(t)] = 1; placed = true; break; }
        if (!placed) break;  // frames exhausted (cannot happen with pos_rate < 0.5)
      }
      remaining -= len;
    }

    for (int t = 0; t < frames; ++t) {
      const int j = s * frames + t;
      Vector x = offset;
      if (pos[static_cast<std::size_t>(t)]) {
        x += signal;
        marks[static_cast<std::size_t>(j)] = 1;
      }
      if (p.noise > 0.0)
        for (Index i = 0; i < p.d; ++i) x(i) += p.noise * rng.normal();
      fm.features.col(j) = x;
      fm.subjects.push_back(subject_name(s));
    }
  }

  fm.label_names.push_back("au_1");
  fm.labels.push_back(std::move(marks));
  fm.meta["generator"] = "au_like";
  fm.meta["descriptor_patch"] = "12x12";
  fm.meta["descriptor_bank"] = "8 orientations x 5 scales";
  return fm;
}

}  // namespace dimred
