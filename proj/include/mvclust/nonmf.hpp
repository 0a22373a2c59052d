// NONMF ablation baseline: per-view orthogonal centroid matrices F^(v) with a
// shared hard indicator Y, no latent space and no view weights. Minimizes
// sum_v ||X^(v) - F^(v) Y||_F^2 by alternating the per-view Procrustes update
// F^(v) <- argmax Tr(F^T X^(v) Y^T) with the per-sample nearest-centroid
// assignment. Conventions (seeding, tie-breaking, empty-cluster repair,
// convergence test) match the AIMC solver; the monotone quantity here is the
// squared objective, reported in the weighted_squared trace column.
#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mvclust/dataset.hpp"
#include "mvclust/kmeans.hpp"
#include "mvclust/linalg.hpp"
#include "mvclust/matrix.hpp"
#include "mvclust/model.hpp"
#include "mvclust/parallel.hpp"
#include "mvclust/rng.hpp"

namespace mvc::nonmf {

struct NonmfState {
  std::vector<Matrix> centroids;  // F^(v): d_v x k
  std::vector<int> assignment;
  int k = 0;
};

using NonmfResult = SolveResultT<NonmfState>;

class Solver {
 public:
  // d is ignored by the model (there is no latent space); the config is the
  // shared one so seeding and tolerances match the AIMC runs.
  Solver(const MultiviewDataset& ds, SolverConfig cfg)
      : cfg_(cfg), n_(ds.sample_count()), m_(ds.view_count()) {
    if (cfg_.d < cfg_.k) cfg_.d = cfg_.k;  // not used; keep validate happy
    cfg_.validate(n_);
    ValidationReport rep = validate_dataset(ds, cfg_.k);
    if (!rep.valid()) {
      std::string msg = "invalid dataset:";
      for (const auto& e : rep.errors) msg += " " + e + ";";
      throw Error(msg);
    }
    structural_warnings_ = rep.warnings;
    views_ = normalized_views(ds, cfg_.normalization);
    col_sq_.resize(static_cast<std::size_t>(m_));
    for (Index v = 0; v < m_; ++v) {
      const Matrix& x = views_[static_cast<std::size_t>(v)];
      auto& sq = col_sq_[static_cast<std::size_t>(v)];
      sq.assign(static_cast<std::size_t>(n_), 0.0);
      for (Index f = 0; f < x.rows(); ++f)
        for (Index j = 0; j < n_; ++j) sq[static_cast<std::size_t>(j)] += x(f, j) * x(f, j);
    }
  }

  NonmfState init_state() const {
    NonmfState s;
    s.k = cfg_.k;
    Rng rng(cfg_.seed);
    s.assignment = initial_labels(views_, cfg_.k, cfg_.init_mode, rng);
    s.centroids.resize(static_cast<std::size_t>(m_));
    update_centroids(s);
    return s;
  }

  // F^(v) <- argmax Tr(F^T X^(v) Y^T), independently per view.
  void update_centroids(NonmfState& s) const {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m_));
    for_each_block(m_, 1, [&](std::int64_t b, std::int64_t lo, std::int64_t) {
      try {
        const Index v = static_cast<Index>(lo);
        s.centroids[static_cast<std::size_t>(v)] =
            procrustes_max_trace(cluster_sums(v, s.assignment));
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    });
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // assignment[j] = argmin_i sum_v ||X^(v)_:,j - F^(v)_:,i||^2. Returns the
  // number of empty-cluster repair moves.
  int update_assignments(NonmfState& s) const {
    const int k = cfg_.k;
    std::vector<double> t(static_cast<std::size_t>(k), 0.0);
    for (Index v = 0; v < m_; ++v) {
      const Matrix& f = s.centroids[static_cast<std::size_t>(v)];
      for (Index i = 0; i < k; ++i) {
        double sq = 0.0;
        for (Index r = 0; r < f.rows(); ++r) sq += f(r, i) * f(r, i);
        t[static_cast<std::size_t>(i)] += sq;
      }
    }
    EigenRowMajor scores = EigenRowMajor::Zero(n_, k);
    for (Index v = 0; v < m_; ++v)
      scores.noalias() += views_[static_cast<std::size_t>(v)].map().transpose() *
                          s.centroids[static_cast<std::size_t>(v)].map();

    for_each_block(n_, detail::kSampleBlock,
                   [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
                     for (Index j = lo; j < hi; ++j) {
                       int best = 0;
                       double best_score = t[0] - 2.0 * scores(j, 0);
                       for (int i = 1; i < k; ++i) {
                         const double sc =
                             t[static_cast<std::size_t>(i)] - 2.0 * scores(j, i);
                         if (sc < best_score) {
                           best_score = sc;
                           best = i;
                         }
                       }
                       s.assignment[static_cast<std::size_t>(j)] = best;
                     }
                   });

    return cfg_.repair_empty_clusters ? repair_empty(s, t, scores) : 0;
  }

  // Per-view residuals ||X^(v) - F^(v) Y||_F.
  std::vector<double> residuals(const NonmfState& s) const {
    std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
    for (Index v = 0; v < m_; ++v) {
      const Matrix& x = views_[static_cast<std::size_t>(v)];
      const Matrix& f = s.centroids[static_cast<std::size_t>(v)];
      const int* labels = s.assignment.data();
      const double sq = blockwise_sum(
          n_, detail::kSampleBlock, [&](std::int64_t lo, std::int64_t hi) {
            double acc = 0.0;
            for (Index r = 0; r < x.rows(); ++r) {
              const double* xrow = x.data() + r * n_;
              const double* frow = f.data() + r * cfg_.k;
              for (Index j = lo; j < hi; ++j) {
                const double e = xrow[j] - frow[labels[j]];
                acc += e * e;
              }
            }
            return acc;
          });
      out[static_cast<std::size_t>(v)] = std::sqrt(sq);
    }
    return out;
  }

  // Total squared objective sum_v ||X^(v) - F^(v) Y||_F^2.
  double objective(const NonmfState& s) const {
    double total = 0.0;
    for (double r : residuals(s)) total += r * r;
    return total;
  }

  NonmfResult solve() const {
    NonmfResult res;
    res.notes = structural_warnings_;

    const auto t_start = std::chrono::steady_clock::now();
    NonmfState s = init_state();
    res.seconds.init = detail::elapsed_s(t_start);

    std::vector<double> r = residuals(s);
    double prev = squared_total(r);
    int iters = 0;

    for (int it = 1; it <= cfg_.max_iters; ++it) {
      const auto t_iter = std::chrono::steady_clock::now();

      auto t0 = std::chrono::steady_clock::now();
      update_centroids(s);
      res.seconds.centroids += detail::elapsed_s(t0);

      t0 = std::chrono::steady_clock::now();
      const int repair_moves = update_assignments(s);
      res.seconds.assignments += detail::elapsed_s(t0);
      if (repair_moves > 0)
        res.notes.push_back("iteration " + std::to_string(it) +
                            ": empty-cluster repair moved " +
                            std::to_string(repair_moves) + " sample(s)");

      r = residuals(s);
      const double squared = squared_total(r);
      double unsquared = 0.0;
      for (double rv : r) unsquared += rv;

      if (!std::isfinite(squared))
        throw NumericError("objective became non-finite at iteration " +
                           std::to_string(it));

      res.objective_trace.push_back({it, unsquared, squared});
      res.per_iteration_seconds.push_back(detail::elapsed_s(t_iter));
      iters = it;

      if (std::abs(prev - squared) / std::max(prev, cfg_.epsilon) < cfg_.tol) {
        res.converged = true;
        break;
      }
      prev = squared;
    }

    res.state = std::move(s);
    res.per_view_residuals = std::move(r);
    res.iters_run = iters;
    res.seconds.total = detail::elapsed_s(t_start);
    return res;
  }

 private:
  static double squared_total(const std::vector<double>& r) {
    double total = 0.0;
    for (double rv : r) total += rv * rv;
    return total;
  }

  Matrix cluster_sums(Index v, const std::vector<int>& labels) const {
    const Matrix& x = views_[static_cast<std::size_t>(v)];
    Matrix b(x.rows(), cfg_.k);
    for (Index f = 0; f < x.rows(); ++f) {
      const double* xrow = x.data() + f * n_;
      double* brow = b.data() + f * cfg_.k;
      for (Index j = 0; j < n_; ++j) brow[labels[static_cast<std::size_t>(j)]] += xrow[j];
    }
    return b;
  }

  int repair_empty(NonmfState& s, const std::vector<double>& t,
                   const EigenRowMajor& scores) const {
    const int k = cfg_.k;
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int a : s.assignment) ++counts[static_cast<std::size_t>(a)];

    std::vector<double> base;
    std::vector<char> moved;
    int moves = 0;
    for (int i = 0; i < k; ++i) {
      if (counts[static_cast<std::size_t>(i)] != 0) continue;
      if (base.empty()) {
        base.assign(static_cast<std::size_t>(n_), 0.0);
        for (Index v = 0; v < m_; ++v)
          for (Index j = 0; j < n_; ++j)
            base[static_cast<std::size_t>(j)] += col_sq_[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
        moved.assign(static_cast<std::size_t>(n_), 0);
      }
      Index pick = -1;
      double worst = -std::numeric_limits<double>::infinity();
      for (Index j = 0; j < n_; ++j) {
        const int a = s.assignment[static_cast<std::size_t>(j)];
        if (a == i || moved[static_cast<std::size_t>(j)]) continue;
        const double dist = base[static_cast<std::size_t>(j)] +
                            t[static_cast<std::size_t>(a)] - 2.0 * scores(j, a);
        if (dist > worst) {
          worst = dist;
          pick = j;
        }
      }
      if (pick < 0) continue;
      --counts[static_cast<std::size_t>(s.assignment[static_cast<std::size_t>(pick)])];
      s.assignment[static_cast<std::size_t>(pick)] = i;
      counts[static_cast<std::size_t>(i)] = 1;
      moved[static_cast<std::size_t>(pick)] = 1;
      ++moves;
    }
    return moves;
  }

  SolverConfig cfg_;
  Index n_ = 0;
  Index m_ = 0;
  std::vector<Matrix> views_;
  std::vector<std::vector<double>> col_sq_;
  std::vector<std::string> structural_warnings_;
};

inline NonmfResult solve(const MultiviewDataset& ds, const SolverConfig& cfg) {
  return Solver(ds, cfg).solve();
}

}  // namespace mvc::nonmf
