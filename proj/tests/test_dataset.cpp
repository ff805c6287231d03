#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dimred/dataset.hpp"
#include "dimred/metrics.hpp"
#include "dimred/svm.hpp"

using namespace dimred;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("csv load parses a small file") {
  const std::string path = temp_path("dimred_small.csv");
  {
    std::ofstream out(path);
    out << "f0,f1,f2,au_1,subject\n";
    out << "1.5,2.5,3.5,1,alice\n";
    out << "-1,0,2e-3,0,bob\n";
  }
  const FeatureMatrix fm = load_csv(path);
  CHECK(fm.dim() == 3);
  CHECK(fm.count() == 2);
  CHECK(fm.features(0, 0) == 1.5);
  CHECK(fm.features(2, 1) == 2e-3);
  CHECK(fm.label("au_1") == std::vector<int>{1, 0});
  CHECK(fm.subjects == std::vector<std::string>{"alice", "bob"});
  std::remove(path.c_str());
}

TEST_CASE("csv schema and parse errors") {
  const std::string path = temp_path("dimred_bad.csv");
  {
    std::ofstream out(path);
    out << "f0,au_1\n";  // missing subject column
    out << "1.0,0\n";
  }
  try {
    load_csv(path);
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Err::SchemaMismatch);
  }

  {
    std::ofstream out(path);
    out << "f0,au_1,subject\n";
    out << "oops,0,s\n";
  }
  try {
    load_csv(path);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Err::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  {
    std::ofstream out(path);
    out << "f0,au_1,subject\n";
    out << "inf,0,s\n";
  }
  CHECK_THROWS_AS(load_csv(path), Error);
  std::remove(path.c_str());
}

TEST_CASE("save/load round trip is bit identical") {
  const FeatureMatrix fm = gen_au_like({4, 30, 7, 0.2, 3, 0.8, 1.0, 3.0}, 99);
  const std::string path = temp_path("dimred_roundtrip.csv");
  save_csv(fm, path);
  const FeatureMatrix back = load_csv(path);
  REQUIRE(back.dim() == fm.dim());
  REQUIRE(back.count() == fm.count());
  CHECK((back.features - fm.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.labels == fm.labels);
  CHECK(back.subjects == fm.subjects);
  std::remove(path.c_str());
}

TEST_CASE("gen_clusters determinism and geometry") {
  const FeatureMatrix a = gen_clusters(6, 120, 2, 10.0, 42);
  const FeatureMatrix b = gen_clusters(6, 120, 2, 10.0, 42);
  CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.labels == b.labels);

  // separation 0: class-conditional means nearly coincide
  const FeatureMatrix null_case = gen_clusters(4, 400, 2, 0.0, 7);
  Vector m0 = Vector::Zero(4), m1 = Vector::Zero(4);
  int n0 = 0, n1 = 0;
  const auto& y = null_case.label("au_1");
  for (Index j = 0; j < null_case.count(); ++j) {
    if (y[static_cast<std::size_t>(j)] == 1) {
      m1 += null_case.features.col(j);
      ++n1;
    } else {
      m0 += null_case.features.col(j);
      ++n0;
    }
  }
  m0 /= n0;
  m1 /= n1;
  CHECK((m0 - m1).norm() <= 3.0 * 4.0 / std::sqrt(200.0));

  // strong separation: a linear classifier fits the training set essentially
  // perfectly
  const FeatureMatrix sep = gen_clusters(4, 200, 2, 10.0, 11);
  std::vector<int> ypm;
  for (int v : sep.label("au_1")) ypm.push_back(v == 1 ? 1 : -1);
  const LinearSvmModel svm = train_svm(sep.features, ypm, 10.0, 0);
  const Vector scores = decision_scores(svm, sep.features);
  int correct = 0;
  for (Index j = 0; j < scores.size(); ++j)
    correct += (scores(j) > 0.0) == (ypm[static_cast<std::size_t>(j)] == 1);
  CHECK(static_cast<double>(correct) / static_cast<double>(scores.size()) > 0.999);
}

TEST_CASE("gen_swiss_roll lies on the parametric surface at zero noise") {
  const FeatureMatrix roll = gen_swiss_roll(200, 0.0, 3);
  REQUIRE(roll.ground_truth.cols() == 200);
  for (Index j = 0; j < 200; ++j) {
    const double t = roll.ground_truth(0, j);
    const double h = roll.ground_truth(1, j);
    CHECK(roll.features(0, j) == doctest::Approx(t * std::cos(t)).epsilon(1e-12));
    CHECK(roll.features(1, j) == doctest::Approx(h).epsilon(1e-12));
    CHECK(roll.features(2, j) == doctest::Approx(t * std::sin(t)).epsilon(1e-12));
  }
  const FeatureMatrix again = gen_swiss_roll(200, 0.0, 3);
  CHECK((again.features - roll.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gen_au_like structure") {
  AuLikeParams params;
  params.n_subjects = 10;
  params.frames_per_subject = 400;
  params.d = 32;
  params.pos_rate = 0.05;
  params.signal_dims = 6;
  params.noise = 1.0;
  const FeatureMatrix fm = gen_au_like(params, 1234);
  CHECK(fm.count() == 4000);
  CHECK(fm.dim() == 32);

  // positive count lands within the binomial 3-sigma band around 200
  long pos = 0;
  for (int v : fm.label("au_1")) pos += v;
  const double expectation = 4000 * 0.05;
  const double sigma3 = 3.0 * std::sqrt(4000 * 0.05 * 0.95);
  CHECK(std::abs(static_cast<double>(pos) - expectation) <= sigma3);

  // ten subjects, contiguous per subject
  std::set<std::string> subjects(fm.subjects.begin(), fm.subjects.end());
  CHECK(subjects.size() == 10);

  // positives occur in contiguous runs (mean run length well above 1)
  int runs = 0;
  long total_pos = 0;
  const auto& marks = fm.label("au_1");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    total_pos += marks[i];
    if (marks[i] == 1 && (i == 0 || marks[i - 1] == 0)) ++runs;
  }
  CHECK(static_cast<double>(total_pos) / runs >= 3.0);

  // determinism
  const FeatureMatrix again = gen_au_like(params, 1234);
  CHECK((again.features - fm.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(again.labels == fm.labels);
}

TEST_CASE("noise-free strong signal is linearly separable on the training set") {
  AuLikeParams params;
  params.n_subjects = 6;
  params.frames_per_subject = 80;
  params.d = 24;
  params.pos_rate = 0.1;
  params.signal_dims = 6;
  params.noise = 0.0;
  const FeatureMatrix fm = gen_au_like(params, 5);
  std::vector<int> ypm;
  for (int v : fm.label("au_1")) ypm.push_back(v == 1 ? 1 : -1);
  const LinearSvmModel svm = train_svm(fm.features, ypm, 1000.0, 0);
  const Vector scores = decision_scores(svm, fm.features);
  std::vector<double> sv(scores.data(), scores.data() + scores.size());
  CHECK(roc_and_auc(sv, fm.label("au_1")).auc > 0.99);
}

TEST_CASE("select keeps labels, subjects, and ground truth aligned") {
  const FeatureMatrix roll = gen_swiss_roll(50, 0.1, 9);
  const FeatureMatrix sub = roll.select({5, 10, 15});
  CHECK(sub.count() == 3);
  CHECK(sub.features.col(1) == roll.features.col(10));
  CHECK(sub.ground_truth.col(2) == roll.ground_truth.col(15));
  CHECK(sub.subjects[0] == roll.subjects[5]);
}
