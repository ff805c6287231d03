#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dimred/error.hpp"
#include "dimred/types.hpp"

namespace dimred {

// Column-sample feature matrix with per-column binary label marks (one row of
// marks per target label), subject ids, and free-form metadata.
struct FeatureMatrix {
  Matrix features;  // d x n
  std::vector<std::string> label_names;
  std::vector<std::vector<int>> labels;  // parallel to label_names, each length n
  std::vector<std::string> subjects;     // length n
  std::map<std::string, std::string> meta;
  Matrix ground_truth;  // optional intrinsic coordinates (generators only)

  Index dim() const { return features.rows(); }
  Index count() const { return features.cols(); }

  const std::vector<int>& label(const std::string& name) const;
  FeatureMatrix select(const std::vector<Index>& idx) const;
  void validate() const;
};

struct CsvSchema {
  std::string feature_prefix = "f";
  std::string label_prefix = "au_";
  std::string subject_column = "subject";
};

FeatureMatrix load_csv(const std::string& path, const CsvSchema& schema = {});
void save_csv(const FeatureMatrix& fm, const std::string& path, const CsvSchema& schema = {});

// Seeded Gaussian blobs with class means `separation` apart.
FeatureMatrix gen_clusters(int d, int n, int classes, double separation, std::uint64_t seed);

// Classic roll (t cos t, height, t sin t); ground_truth rows hold (t, height).
FeatureMatrix gen_swiss_roll(int n, double noise, std::uint64_t seed);

struct AuLikeParams {
  int n_subjects = 10;
  int frames_per_subject = 400;
  int d = 128;
  double pos_rate = 0.05;     // in (0, 0.5)
  int signal_dims = 8;
  double noise = 1.0;
  double subject_offset = 1.0;  // per-subject baseline magnitude (0 disables)
  double signal_strength = 3.0;
};

// Subject-structured binary data: per-subject baseline offsets, an additive
// class signal on `signal_dims` dimensions, positives in contiguous runs.
FeatureMatrix gen_au_like(const AuLikeParams& params, std::uint64_t seed);

}  // namespace dimred
