#include "mvclust/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "mvclust/aimc.hpp"
#include "test_util.hpp"

using mvc::Index;
using mvc::Matrix;
namespace fs = std::filesystem;
namespace io = mvc::io;

using testutil::TempDir;
using testutil::write_text;

TEST(MatrixCsv, SamplesAsRowsAreTransposedToColumnSamples) {
  TempDir tmp;
  write_text(tmp.path("m.csv"), "1,2\n3,4\n");
  const Matrix m = io::load_matrix(tmp.path("m.csv"), "csv");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(0, 0), 1.0);  // first sample is column (1, 2)
  EXPECT_EQ(m(1, 0), 2.0);
  EXPECT_EQ(m(0, 1), 3.0);
  EXPECT_EQ(m(1, 1), 4.0);
}

TEST(MatrixCsv, Errors) {
  TempDir tmp;
  write_text(tmp.path("empty.csv"), "");
  EXPECT_THROW(io::load_matrix(tmp.path("empty.csv"), "csv"), mvc::IoError);

  write_text(tmp.path("bad.csv"), "1,2\n3,x\n");
  try {
    io::load_matrix(tmp.path("bad.csv"), "csv");
    FAIL() << "expected parse error";
  } catch (const mvc::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("col 2"), std::string::npos);
  }

  write_text(tmp.path("ragged.csv"), "1,2\n3\n");
  EXPECT_THROW(io::load_matrix(tmp.path("ragged.csv"), "csv"), mvc::IoError);
  EXPECT_THROW(io::load_matrix(tmp.path("missing.csv"), "csv"), mvc::IoError);
}

TEST(MatrixFiles, CsvAndBinaryEncodingsRoundTripIdentically) {
  std::mt19937 gen(251);
  const Matrix m = testutil::random_dense(10, 7, gen);
  TempDir tmp;
  io::save_matrix(tmp.path("m.csv"), "csv", m);
  io::save_matrix(tmp.path("m.mvm1"), "mvm1", m);
  const Matrix from_csv = io::load_matrix(tmp.path("m.csv"), "csv");
  const Matrix from_bin = io::load_matrix(tmp.path("m.mvm1"), "mvm1");
  EXPECT_TRUE(from_csv == m);
  EXPECT_TRUE(from_bin == m);
  EXPECT_TRUE(from_csv == from_bin);
}

TEST(MatrixBinary, HeaderAndTruncationErrors) {
  TempDir tmp;
  write_text(tmp.path("bad.mvm1"), "NOPE");
  EXPECT_THROW(io::load_matrix(tmp.path("bad.mvm1"), "mvm1"), mvc::IoError);

  // valid header but missing payload
  std::ofstream out(tmp.path("trunc.mvm1"), std::ios::binary);
  out.write("MVM1", 4);
  std::uint32_t n = 5, d = 3;
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  double one = 1.0;
  out.write(reinterpret_cast<const char*>(&one), 8);
  out.close();
  EXPECT_THROW(io::load_matrix(tmp.path("trunc.mvm1"), "mvm1"), mvc::IoError);
}

TEST(Labels, RoundTripAndErrors) {
  TempDir tmp;
  const std::vector<int> labels = {3, -1, 0, 42, 3};
  io::save_labels(tmp.path("labels.txt"), labels);
  EXPECT_EQ(io::load_labels(tmp.path("labels.txt")), labels);

  write_text(tmp.path("bad.txt"), "1\ntwo\n");
  EXPECT_THROW(io::load_labels(tmp.path("bad.txt")), mvc::IoError);
  write_text(tmp.path("empty.txt"), "");
  EXPECT_THROW(io::load_labels(tmp.path("empty.txt")), mvc::IoError);
}

TEST(Manifest, LoadDatasetWithViewsAndLabels) {
  std::mt19937 gen(257);
  TempDir tmp;
  const Matrix a = testutil::random_dense(4, 12, gen);
  const Matrix b = testutil::random_dense(3, 12, gen);
  io::save_matrix(tmp.path("a.mvm1"), "mvm1", a);
  io::save_matrix(tmp.path("b.csv"), "csv", b);
  io::save_labels(tmp.path("y.txt"), testutil::random_labels(12, 3, gen));
  write_text(tmp.path("manifest.json"), R"({
    "name": "demo", "n": 12, "k": 3,
    "views": [
      {"name": "first", "path": "a.mvm1", "dim": 4, "format": "mvm1"},
      {"name": "second", "path": "b.csv", "dim": 3, "format": "csv"}
    ],
    "labels_path": "y.txt"
  })");

  const mvc::MultiviewDataset ds = io::load_dataset(tmp.path("manifest.json"));
  EXPECT_EQ(ds.name, "demo");
  EXPECT_EQ(ds.view_count(), 2);
  EXPECT_EQ(ds.sample_count(), 12);
  EXPECT_EQ(ds.total_dim(), 7);
  EXPECT_EQ(ds.declared_k, 3);
  ASSERT_TRUE(ds.labels.has_value());
  EXPECT_TRUE(ds.views[0] == a);
  EXPECT_TRUE(ds.views[1] == b);
}

TEST(Manifest, HandwrittenShapedDatasetLoadsWithExpectedTotals) {
  // the six-view handwritten-digits layout: m = 6, summed dim h = 649
  io::SyntheticSpec spec;
  spec.n = 50;
  spec.k = 10;
  spec.d = 10;
  spec.view_dims = {216, 76, 64, 6, 240, 47};
  spec.noise_sigma = 0.05;
  spec.seed = 5;
  TempDir tmp;
  const std::string manifest =
      io::write_synthetic(tmp.dir(), io::gen_synthetic(spec), "mvm1");
  mvc::ValidationReport rep;
  const mvc::MultiviewDataset ds = io::load_dataset(manifest, &rep);
  EXPECT_EQ(ds.view_count(), 6);
  EXPECT_EQ(ds.total_dim(), 649);
  bool low_dim_warned = false;
  for (const auto& w : rep.warnings)
    if (w.find("below k=10") != std::string::npos) low_dim_warned = true;
  EXPECT_TRUE(low_dim_warned);  // the 6-dim view cannot carry 10 clusters
}

TEST(Manifest, WrongDimNamesTheViewAndProblemsAggregate) {
  std::mt19937 gen(263);
  TempDir tmp;
  io::save_matrix(tmp.path("a.mvm1"), "mvm1", testutil::random_dense(4, 12, gen));
  write_text(tmp.path("manifest.json"), R"({
    "name": "demo", "n": 12,
    "views": [
      {"name": "first", "path": "a.mvm1", "dim": 5, "format": "mvm1"},
      {"name": "second", "path": "nope.csv", "dim": 3, "format": "csv"}
    ]
  })");
  try {
    io::load_dataset(tmp.path("manifest.json"));
    FAIL() << "expected aggregate load error";
  } catch (const mvc::IoError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("first"), std::string::npos);
    EXPECT_NE(msg.find("declared dim 5"), std::string::npos);
    EXPECT_NE(msg.find("nope.csv"), std::string::npos);
  }
}

TEST(Manifest, MissingFieldReported) {
  TempDir tmp;
  write_text(tmp.path("manifest.json"), R"({"name": "x"})");
  EXPECT_THROW(io::load_manifest(tmp.path("manifest.json")), mvc::IoError);
}

TEST(GenSynthetic, DeterministicAndZeroNoiseIsExact) {
  io::SyntheticSpec spec;
  spec.n = 60;
  spec.k = 4;
  spec.d = 5;
  spec.view_dims = {9, 6};
  spec.noise_sigma = 0.0;
  spec.seed = 99;
  const io::Synthetic a = io::gen_synthetic(spec);
  const io::Synthetic b = io::gen_synthetic(spec);
  for (Index v = 0; v < a.dataset.view_count(); ++v)
    EXPECT_TRUE(a.dataset.views[static_cast<std::size_t>(v)] ==
                b.dataset.views[static_cast<std::size_t>(v)]);
  EXPECT_EQ(*a.dataset.labels, *b.dataset.labels);

  mvc::SolverConfig cfg;
  cfg.d = 5;
  cfg.k = 4;
  mvc::aimc::Solver solver(a.dataset, cfg);
  const mvc::Objective obj = solver.objective(a.planted);
  EXPECT_EQ(obj.unsquared, 0.0);
}

TEST(GenSynthetic, LowNoiseClustersAreWellSeparated) {
  io::SyntheticSpec spec;
  spec.n = 500;
  spec.k = 5;
  spec.d = 8;
  spec.view_dims = {20, 15, 12};
  spec.noise_sigma = 0.01;
  spec.seed = 7;
  const io::Synthetic syn = io::gen_synthetic(spec);

  // concatenated space: mean within-cluster distance to the cluster mean
  // versus the smallest between-centroid distance
  const Index h = syn.dataset.total_dim();
  const Index n = syn.dataset.sample_count();
  Eigen::MatrixXd all(h, n);
  Index off = 0;
  for (const Matrix& x : syn.dataset.views) {
    all.block(off, 0, x.rows(), n) = x.map();
    off += x.rows();
  }
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(h, spec.k);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(spec.k);
  for (Index j = 0; j < n; ++j) {
    centers.col((*syn.dataset.labels)[static_cast<std::size_t>(j)]) += all.col(j);
    counts((*syn.dataset.labels)[static_cast<std::size_t>(j)]) += 1.0;
  }
  for (int c = 0; c < spec.k; ++c) centers.col(c) /= counts(c);
  double within = 0.0;
  for (Index j = 0; j < n; ++j)
    within += (all.col(j) - centers.col((*syn.dataset.labels)[static_cast<std::size_t>(j)])).norm();
  within /= static_cast<double>(n);
  double between = std::numeric_limits<double>::infinity();
  for (int a = 0; a < spec.k; ++a)
    for (int b = a + 1; b < spec.k; ++b)
      between = std::min(between, (centers.col(a) - centers.col(b)).norm());
  EXPECT_LT(within / between, 0.2);
}

TEST(GenSynthetic, PerViewNoiseOverridesAndClusterWeights) {
  io::SyntheticSpec spec;
  spec.n = 400;
  spec.k = 2;
  spec.d = 3;
  spec.view_dims = {6, 6};
  spec.noise_sigma = 0.0;
  spec.bad_view_sigma = std::vector<double>{0.0, 1.0};
  spec.cluster_weights = std::vector<double>{0.9, 0.1};
  spec.seed = 3;
  const io::Synthetic syn = io::gen_synthetic(spec);

  mvc::SolverConfig cfg;
  cfg.d = 3;
  cfg.k = 2;
  mvc::aimc::Solver solver(syn.dataset, cfg);
  const mvc::Objective obj = solver.objective(syn.planted);
  EXPECT_EQ(obj.per_view[0], 0.0);  // clean view stays exact
  EXPECT_GT(obj.per_view[1], 1.0);  // noisy view does not

  int ones = 0;
  for (int l : *syn.dataset.labels) ones += l;
  EXPECT_LT(ones, 120);  // weight 0.1 keeps cluster 1 small
  EXPECT_GT(ones, 10);
}

TEST(GenSynthetic, RejectsBadSpecs) {
  io::SyntheticSpec spec;
  spec.n = 10;
  spec.k = 3;
  spec.d = 2;  // d < k
  spec.view_dims = {4};
  EXPECT_THROW(io::gen_synthetic(spec), mvc::ConfigError);
  spec.d = 3;
  spec.cluster_weights = std::vector<double>{0.5, 0.2, 0.2};  // sums to 0.9
  EXPECT_THROW(io::gen_synthetic(spec), mvc::ConfigError);
}

TEST(WriteSynthetic, RoundTripsThroughManifest) {
  io::SyntheticSpec spec;
  spec.n = 25;
  spec.k = 3;
  spec.d = 4;
  spec.view_dims = {5, 4};
  spec.noise_sigma = 0.02;
  spec.seed = 11;
  const io::Synthetic syn = io::gen_synthetic(spec);
  TempDir tmp;
  const std::string manifest = io::write_synthetic(tmp.dir(), syn, "mvm1");
  const mvc::MultiviewDataset ds = io::load_dataset(manifest);
  ASSERT_EQ(ds.view_count(), 2);
  for (Index v = 0; v < 2; ++v)
    EXPECT_TRUE(ds.views[static_cast<std::size_t>(v)] ==
                syn.dataset.views[static_cast<std::size_t>(v)]);
  EXPECT_EQ(*ds.labels, *syn.dataset.labels);
}

TEST(WriteResult, JsonRoundTripsAndTraceCsvHasOneRowPerIteration) {
  io::RunOutput out;
  out.method = "aimc";
  out.config.d = 5;
  out.config.k = 3;
  out.config.seed = 12;
  out.dataset_name = "demo";
  out.n = 40;
  out.view_dims = {9, 6};
  out.converged = true;
  out.iters_run = 3;
  out.trace = {{1, 10.5, 5.25}, {2, 8.25, 4.125}, {3, 8.2499, 4.12}};
  out.weights = {0.25, 0.75};
  out.residuals = {2.0, 0.66};
  out.assignment = {0, 1, 2, 0};
  mvc::metrics::MetricReport rep;
  rep.acc = 0.9;
  rep.nmi = 0.8;
  rep.purity = 0.91;
  rep.fscore = 0.77;
  out.report = rep;
  out.notes = {"note-a"};
  out.seconds.total = 1.5;

  TempDir tmp;
  io::write_result(out, tmp.path("res.json"), tmp.path("trace.csv"));

  std::ifstream in(tmp.path("res.json"));
  const io::json parsed = io::json::parse(in);
  EXPECT_EQ(parsed["method"], "aimc");
  EXPECT_EQ(parsed["config"]["d"], 5);
  EXPECT_EQ(parsed["converged"], true);
  EXPECT_EQ(parsed["iters_run"], 3);
  EXPECT_DOUBLE_EQ(parsed["objective"]["unsquared"].get<double>(), 8.2499);
  EXPECT_DOUBLE_EQ(parsed["per_view"]["weights"][1].get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(parsed["metrics"]["acc"].get<double>(), 0.9);
  EXPECT_EQ(parsed["assignment"].size(), 4u);
  EXPECT_EQ(parsed["trace"].size(), 3u);
  // exact value recovery through the JSON round trip
  EXPECT_DOUBLE_EQ(parsed["trace"][0]["unsquared"].get<double>(), 10.5);
  EXPECT_TRUE(parsed.contains("timing"));

  std::ifstream csv(tmp.path("trace.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++lines;
  EXPECT_EQ(lines, 1 + out.iters_run);  // header + one row per iteration
}

TEST(WriteResult, TimingSectionIsSeparable) {
  io::RunOutput out;
  out.method = "aimc";
  out.config.d = 3;
  out.config.k = 3;
  out.trace = {{1, 1.0, 0.5}};
  out.seconds.total = 123.0;
  io::json with = io::result_to_json(out, true);
  io::json without = io::result_to_json(out, false);
  with.erase("timing");
  EXPECT_EQ(with.dump(), without.dump());
}
