#include "mvclust/model.hpp"

#include <gtest/gtest.h>

#include <random>

#include "mvclust/dataset.hpp"
#include "test_util.hpp"

using mvc::Index;
using mvc::Matrix;
using mvc::MultiviewDataset;

namespace {

MultiviewDataset dataset_with_dims(const std::vector<Index>& dims, Index n,
                                   std::mt19937& gen) {
  MultiviewDataset ds;
  for (std::size_t v = 0; v < dims.size(); ++v) {
    ds.views.push_back(testutil::random_dense(dims[v], n, gen));
    ds.view_names.push_back("view_" + std::to_string(v));
  }
  return ds;
}

}  // namespace

TEST(ValidateDataset, HandwrittenShapedManifestIsValidWithLowDimWarning) {
  std::mt19937 gen(53);
  // the six-view layout of the handwritten digits benchmark: the 6-dim
  // morphological view cannot carry k=10 clusters on its own
  MultiviewDataset ds =
      dataset_with_dims({216, 76, 64, 6, 240, 47}, 2000, gen);
  ds.declared_k = 10;
  const mvc::ValidationReport rep = mvc::validate_dataset(ds);
  EXPECT_TRUE(rep.valid());
  bool warned = false;
  for (const auto& w : rep.warnings)
    if (w.find("view_3") != std::string::npos &&
        w.find("below k=10") != std::string::npos)
      warned = true;
  EXPECT_TRUE(warned);
}

TEST(ValidateDataset, SampleCountMismatch) {
  std::mt19937 gen(59);
  MultiviewDataset ds;
  ds.views.push_back(testutil::random_dense(4, 100, gen));
  ds.views.push_back(testutil::random_dense(4, 99, gen));
  const mvc::ValidationReport rep = mvc::validate_dataset(ds);
  EXPECT_FALSE(rep.valid());
  ASSERT_FALSE(rep.errors.empty());
  EXPECT_NE(rep.errors.front().find("mismatch"), std::string::npos);
}

TEST(ValidateDataset, NonFiniteEntryIsLocated) {
  std::mt19937 gen(61);
  MultiviewDataset ds = dataset_with_dims({3, 5}, 10, gen);
  ds.views[1](2, 7) = std::nan("");
  const mvc::ValidationReport rep = mvc::validate_dataset(ds);
  EXPECT_FALSE(rep.valid());
  bool located = false;
  for (const auto& e : rep.errors)
    if (e.find("view 1") != std::string::npos &&
        e.find("row 2") != std::string::npos &&
        e.find("col 7") != std::string::npos)
      located = true;
  EXPECT_TRUE(located);
}

TEST(ValidateDataset, ConstantFeatureWarns) {
  std::mt19937 gen(67);
  MultiviewDataset ds = dataset_with_dims({4}, 20, gen);
  for (Index j = 0; j < 20; ++j) ds.views[0](1, j) = 3.25;
  const mvc::ValidationReport rep = mvc::validate_dataset(ds);
  EXPECT_TRUE(rep.valid());
  bool warned = false;
  for (const auto& w : rep.warnings)
    if (w.find("constant") != std::string::npos) warned = true;
  EXPECT_TRUE(warned);
}

TEST(ValidateDataset, LabelLengthChecked) {
  std::mt19937 gen(71);
  MultiviewDataset ds = dataset_with_dims({4}, 10, gen);
  ds.labels = std::vector<int>{1, 2, 3};
  EXPECT_FALSE(mvc::validate_dataset(ds).valid());
}

TEST(SolverConfig, ValidationRules) {
  mvc::SolverConfig cfg;
  cfg.k = 5;
  cfg.d = 4;  // d < k
  EXPECT_THROW(cfg.validate(100), mvc::ConfigError);
  cfg.d = 5;
  EXPECT_NO_THROW(cfg.validate(100));
  EXPECT_THROW(cfg.validate(4), mvc::ConfigError);  // k > n
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(100), mvc::ConfigError);
  cfg.tol = 1e-6;
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(100), mvc::ConfigError);
}

TEST(Normalization, UnitL2MakesSampleColumnsUnitNorm) {
  std::mt19937 gen(73);
  MultiviewDataset ds = dataset_with_dims({6, 3}, 15, gen);
  const auto views =
      mvc::normalized_views(ds, mvc::Normalization::kUnitL2Sample);
  for (const Matrix& x : views)
    for (Index j = 0; j < x.cols(); ++j) {
      double sq = 0.0;
      for (Index r = 0; r < x.rows(); ++r) sq += x(r, j) * x(r, j);
      EXPECT_NEAR(sq, 1.0, 1e-12);
    }
}

TEST(Normalization, ZscoreCentersAndScalesFeatures) {
  std::mt19937 gen(79);
  MultiviewDataset ds = dataset_with_dims({5}, 40, gen);
  const auto views =
      mvc::normalized_views(ds, mvc::Normalization::kZscoreFeature);
  const Matrix& x = views[0];
  for (Index r = 0; r < x.rows(); ++r) {
    double mean = 0.0, sq = 0.0;
    for (Index j = 0; j < x.cols(); ++j) mean += x(r, j);
    mean /= static_cast<double>(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
      const double e = x(r, j) - mean;
      sq += e * e;
    }
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(sq / static_cast<double>(x.cols()), 1.0, 1e-12);
  }
}

TEST(Enums, ParseAndFormatRoundTrip) {
  EXPECT_EQ(mvc::to_string(mvc::parse_init_mode("random")), "random");
  EXPECT_EQ(mvc::to_string(mvc::parse_normalization("unit-l2-sample")),
            "unit-l2-sample");
  EXPECT_THROW(mvc::parse_init_mode("bogus"), mvc::ConfigError);
  EXPECT_THROW(mvc::parse_normalization("bogus"), mvc::ConfigError);
}
