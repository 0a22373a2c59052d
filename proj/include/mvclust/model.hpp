// Solver-facing types: factor state, configuration, objective and results.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvclust/dataset.hpp"
#include "mvclust/matrix.hpp"

namespace mvc {

enum class InitMode { kKmeansConcat, kRandom };
enum class Normalization { kNone, kUnitL2Sample, kZscoreFeature };

inline std::string to_string(InitMode m) {
  return m == InitMode::kKmeansConcat ? "kmeans-concat" : "random";
}
inline std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::kUnitL2Sample: return "unit-l2-sample";
    case Normalization::kZscoreFeature: return "zscore-feature";
    default: return "none";
  }
}
inline InitMode parse_init_mode(const std::string& s) {
  if (s == "kmeans-concat") return InitMode::kKmeansConcat;
  if (s == "random") return InitMode::kRandom;
  throw ConfigError("unknown init mode '" + s + "'");
}
inline Normalization parse_normalization(const std::string& s) {
  if (s == "none") return Normalization::kNone;
  if (s == "unit-l2-sample") return Normalization::kUnitL2Sample;
  if (s == "zscore-feature") return Normalization::kZscoreFeature;
  throw ConfigError("unknown normalization '" + s + "'");
}

struct SolverConfig {
  int d = 0;
  int k = 0;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  InitMode init_mode = InitMode::kKmeansConcat;
  double epsilon = 1e-12;
  Normalization normalization = Normalization::kNone;
  bool repair_empty_clusters = true;

  void validate(Index n) const {
    if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
    if (d < k)
      throw ConfigError("latent dimension d=" + std::to_string(d) +
                        " must satisfy d >= k=" + std::to_string(k));
    if (k > n)
      throw ConfigError("k=" + std::to_string(k) +
                        " clusters infeasible for n=" + std::to_string(n) +
                        " samples");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  }
};

// Factor state: per-view generators G^(v) (d_v x d), shared centroid basis
// F (d x k), hard assignment stored as a label vector, per-view weights.
struct ModelState {
  std::vector<Matrix> generators;
  Matrix centroids;
  std::vector<int> assignment;
  std::vector<double> weights;
  int d = 0;
  int k = 0;
};

struct Objective {
  double unsquared = 0.0;        // sum over views of Frobenius residuals
  double weighted_squared = 0.0; // sum of alpha_v * residual_v^2
  std::vector<double> per_view;
};

struct TraceEntry {
  int iter = 0;
  double unsquared = 0.0;
  double weighted_squared = 0.0;
};

struct PhaseSeconds {
  double init = 0.0;
  double generators = 0.0;
  double centroids = 0.0;
  double assignments = 0.0;
  double weights = 0.0;
  double total = 0.0;
};

template <typename State>
struct SolveResultT {
  State state;
  std::vector<TraceEntry> objective_trace;
  std::vector<double> per_view_residuals;
  bool converged = false;
  int iters_run = 0;
  PhaseSeconds seconds;
  std::vector<double> per_iteration_seconds;
  std::vector<std::string> notes;
};

using SolveResult = SolveResultT<ModelState>;

// Copy of the views with the configured per-view normalization applied.
inline std::vector<Matrix> normalized_views(const MultiviewDataset& ds,
                                            Normalization mode) {
  std::vector<Matrix> out = ds.views;
  if (mode == Normalization::kNone) return out;
  for (Matrix& x : out) {
    if (mode == Normalization::kUnitL2Sample) {
      for (Index j = 0; j < x.cols(); ++j) {
        double sq = 0.0;
        for (Index r = 0; r < x.rows(); ++r) sq += x(r, j) * x(r, j);
        const double norm = std::sqrt(sq);
        if (norm > 0.0)
          for (Index r = 0; r < x.rows(); ++r) x(r, j) /= norm;
      }
    } else {  // zscore-feature
      const double n = static_cast<double>(x.cols());
      for (Index r = 0; r < x.rows(); ++r) {
        double mean = 0.0;
        for (Index j = 0; j < x.cols(); ++j) mean += x(r, j);
        mean /= n;
        double var = 0.0;
        for (Index j = 0; j < x.cols(); ++j) {
          const double e = x(r, j) - mean;
          var += e * e;
        }
        const double sd = std::sqrt(var / n);
        for (Index j = 0; j < x.cols(); ++j)
          x(r, j) = sd > 0.0 ? (x(r, j) - mean) / sd : 0.0;
      }
    }
  }
  return out;
}

}  // namespace mvc
