// Adaptively-weighted integral-space multiview clustering (AIMC).
//
// Minimizes  sum_v ||X^(v) - G^(v) F Y||_F  over column-orthonormal view
// generators G^(v), a column-orthonormal centroid basis F, a hard indicator Y
// and closed-form per-view weights alpha_v = 1 / (2 ||X^(v) - G^(v) F Y||_F),
// by four-phase alternating minimization. Each phase has a closed-form
// optimum, so the weighted squared objective never increases within an
// iteration and the unsquared objective is non-increasing across iterations.
// The one exception is empty-cluster repair: a repaired sample lands in a
// cluster the argmin rejected, which can raise the objective; solve() notes
// every repair event in the result so such traces are explainable.
#pragma once

#include <chrono>
#include <cmath>
#include <exception>
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

namespace mvc::aimc {

class Solver {
 public:
  Solver(const MultiviewDataset& ds, SolverConfig cfg)
      : cfg_(cfg), n_(ds.sample_count()), m_(ds.view_count()) {
    cfg_.validate(n_);
    ValidationReport rep = validate_dataset(ds, cfg_.k, cfg_.d);
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

  const std::vector<Matrix>& views() const { return views_; }
  Index sample_count() const { return n_; }
  Index view_count() const { return m_; }
  const SolverConfig& config() const { return cfg_; }

  // Weights 1/m, generators from each view's top-d left singular subspace,
  // assignment from seeded k-means++ on the concatenated z-scored views (or a
  // balanced random draw), and F from one closed-form centroid update.
  ModelState init_state() const {
    ModelState s;
    s.d = cfg_.d;
    s.k = cfg_.k;
    s.weights.assign(static_cast<std::size_t>(m_),
                     1.0 / static_cast<double>(m_));

    Rng rng(cfg_.seed);
    s.assignment = initial_labels(views_, cfg_.k, cfg_.init_mode, rng);

    s.generators.reserve(static_cast<std::size_t>(m_));
    for (Index v = 0; v < m_; ++v) {
      const Matrix& x = views_[static_cast<std::size_t>(v)];
      const ThinSvd svd = thin_svd(x);
      const Index r = std::min<Index>(cfg_.d, static_cast<Index>(svd.s.size()));
      Matrix g(x.rows(), cfg_.d);  // zero columns beyond the feasible rank
      for (Index row = 0; row < x.rows(); ++row)
        for (Index c = 0; c < r; ++c) g(row, c) = svd.u(row, c);
      s.generators.push_back(std::move(g));
    }

    update_centroids(s);
    return s;
  }

  // G^(v) <- argmax Tr(G^T H^(v)) with H^(v) = X^(v) Y^T F^T, each view
  // independent of the others.
  void update_generators(ModelState& s) const {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m_));
    for_each_block(m_, 1, [&](std::int64_t b, std::int64_t lo, std::int64_t) {
      try {
        const Index v = static_cast<Index>(lo);
        const Matrix b_v = cluster_sums(v, s.assignment);  // X^(v) Y^T
        Matrix h(b_v.rows(), cfg_.d);
        h.map().noalias() = b_v.map() * s.centroids.map().transpose();
        s.generators[static_cast<std::size_t>(v)] = procrustes_max_trace(h);
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    });
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // F <- argmax Tr(F^T J) with J = sum_v alpha_v G^(v)T X^(v) Y^T, views
  // accumulated in fixed index order.
  void update_centroids(ModelState& s) const {
    std::vector<Matrix> terms(static_cast<std::size_t>(m_));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m_));
    for_each_block(m_, 1, [&](std::int64_t b, std::int64_t lo, std::int64_t) {
      try {
        const Index v = static_cast<Index>(lo);
        const Matrix b_v = cluster_sums(v, s.assignment);
        Matrix t(cfg_.d, cfg_.k);
        t.map().noalias() =
            s.generators[static_cast<std::size_t>(v)].map().transpose() * b_v.map();
        terms[static_cast<std::size_t>(v)] = std::move(t);
      } catch (...) {
        errors[static_cast<std::size_t>(b)] = std::current_exception();
      }
    });
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    Matrix j(cfg_.d, cfg_.k);
    for (Index v = 0; v < m_; ++v)
      j.map() += s.weights[static_cast<std::size_t>(v)] *
                 terms[static_cast<std::size_t>(v)].map();
    s.centroids = procrustes_max_trace(j);
  }

  // Per-sample nearest weighted centroid: assignment[j] =
  // argmin_i sum_v alpha_v ||X^(v)_:,j - (G^(v) F)_:,i||^2, evaluated as
  // argmin_i (t_i - 2 S_ji). Ties break toward the smaller cluster index.
  // Returns the number of samples moved by empty-cluster repair (0 when the
  // repair flag is off or no cluster was empty). A repair move lands in an
  // argmin-rejected cluster, so it can raise the objective; callers that
  // track monotonicity should watch the return value.
  int update_assignments(ModelState& s) const {
    const int k = cfg_.k;
    std::vector<Matrix> m_v = view_centroids(s);

    std::vector<double> t(static_cast<std::size_t>(k), 0.0);
    for (Index v = 0; v < m_; ++v) {
      const Matrix& m = m_v[static_cast<std::size_t>(v)];
      const double w = s.weights[static_cast<std::size_t>(v)];
      for (Index i = 0; i < k; ++i) {
        double sq = 0.0;
        for (Index f = 0; f < m.rows(); ++f) sq += m(f, i) * m(f, i);
        t[static_cast<std::size_t>(i)] += w * sq;
      }
    }

    // S = sum_v alpha_v X^(v)T M^(v), accumulated in view order; row-major so
    // the per-sample argmin scan below is contiguous
    EigenRowMajor scores = EigenRowMajor::Zero(n_, k);
    for (Index v = 0; v < m_; ++v)
      scores.noalias() += s.weights[static_cast<std::size_t>(v)] *
                          (views_[static_cast<std::size_t>(v)].map().transpose() *
                           m_v[static_cast<std::size_t>(v)].map());

    for_each_block(n_, detail::kSampleBlock,
                   [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
                     for (Index j = lo; j < hi; ++j) {
                       int best = 0;
                       double best_score =
                           t[0] - 2.0 * scores(j, 0);
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

  // alpha_v = 1 / (2 max(r_v, epsilon)); small residual -> large weight.
  void update_weights(ModelState& s) const {
    const std::vector<double> r = residuals(s);
    for (Index v = 0; v < m_; ++v)
      s.weights[static_cast<std::size_t>(v)] =
          1.0 / (2.0 * std::max(r[static_cast<std::size_t>(v)], cfg_.epsilon));
  }

  // Per-view Frobenius residuals r_v = ||X^(v) - G^(v) F Y||_F, streamed over
  // sample blocks against the d_v x k product G^(v) F.
  std::vector<double> residuals(const ModelState& s) const {
    check_shapes(s);
    std::vector<Matrix> m_v = view_centroids(s);
    std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
    for (Index v = 0; v < m_; ++v) {
      const Matrix& x = views_[static_cast<std::size_t>(v)];
      const Matrix& m = m_v[static_cast<std::size_t>(v)];
      const int* labels = s.assignment.data();
      const double sq = blockwise_sum(
          n_, detail::kSampleBlock, [&](std::int64_t lo, std::int64_t hi) {
            double acc = 0.0;
            for (Index f = 0; f < x.rows(); ++f) {
              const double* xrow = x.data() + f * n_;
              const double* mrow = m.data() + f * cfg_.k;
              for (Index j = lo; j < hi; ++j) {
                const double e = xrow[j] - mrow[labels[j]];
                acc += e * e;
              }
            }
            return acc;
          });
      out[static_cast<std::size_t>(v)] = std::sqrt(sq);
    }
    return out;
  }

  Objective objective(const ModelState& s) const {
    Objective obj;
    obj.per_view = residuals(s);
    for (Index v = 0; v < m_; ++v) {
      const double r = obj.per_view[static_cast<std::size_t>(v)];
      obj.unsquared += r;
      obj.weighted_squared += s.weights[static_cast<std::size_t>(v)] * r * r;
    }
    return obj;
  }

  // Full alternation: G, F, Y, alpha per iteration; stops when the relative
  // change of the unsquared objective drops below tol.
  SolveResult solve() const {
    SolveResult res;
    res.notes = structural_warnings_;

    auto t_start = std::chrono::steady_clock::now();
    ModelState s = init_state();
    res.seconds.init = detail::elapsed_s(t_start);

    double prev = objective(s).unsquared;
    std::vector<double> r;
    bool clamp_noted = false;
    int iters = 0;

    for (int it = 1; it <= cfg_.max_iters; ++it) {
      const auto t_iter = std::chrono::steady_clock::now();

      auto t0 = std::chrono::steady_clock::now();
      update_generators(s);
      res.seconds.generators += detail::elapsed_s(t0);

      t0 = std::chrono::steady_clock::now();
      update_centroids(s);
      res.seconds.centroids += detail::elapsed_s(t0);

      t0 = std::chrono::steady_clock::now();
      const int repair_moves = update_assignments(s);
      res.seconds.assignments += detail::elapsed_s(t0);
      if (repair_moves > 0)
        res.notes.push_back("iteration " + std::to_string(it) +
                            ": empty-cluster repair moved " +
                            std::to_string(repair_moves) + " sample(s)");

      t0 = std::chrono::steady_clock::now();
      r = residuals(s);
      double unsquared = 0.0;
      for (Index v = 0; v < m_; ++v) {
        const double rv = r[static_cast<std::size_t>(v)];
        s.weights[static_cast<std::size_t>(v)] =
            1.0 / (2.0 * std::max(rv, cfg_.epsilon));
        unsquared += rv;
        if (rv <= cfg_.epsilon && !clamp_noted) {
          res.notes.push_back("view " + std::to_string(v) +
                              " residual at/below epsilon; weight clamped");
          clamp_noted = true;
        }
      }
      double weighted = 0.0;
      for (Index v = 0; v < m_; ++v) {
        const double rv = r[static_cast<std::size_t>(v)];
        weighted += s.weights[static_cast<std::size_t>(v)] * rv * rv;
      }
      res.seconds.weights += detail::elapsed_s(t0);

      if (!std::isfinite(unsquared))
        throw NumericError("objective became non-finite at iteration " +
                           std::to_string(it));

      res.objective_trace.push_back({it, unsquared, weighted});
      res.per_iteration_seconds.push_back(detail::elapsed_s(t_iter));
      iters = it;

      if (std::abs(prev - unsquared) / std::max(prev, cfg_.epsilon) < cfg_.tol) {
        res.converged = true;
        break;
      }
      prev = unsquared;
    }

    res.state = std::move(s);
    res.per_view_residuals = std::move(r);
    res.iters_run = iters;
    res.seconds.total = detail::elapsed_s(t_start);
    return res;
  }

 private:
  // X^(v) Y^T as label-indexed column sums, shape d_v x k.
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

  // M^(v) = G^(v) F, the per-view images of the latent centroids.
  std::vector<Matrix> view_centroids(const ModelState& s) const {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (Index v = 0; v < m_; ++v) {
      const Matrix& g = s.generators[static_cast<std::size_t>(v)];
      Matrix m(g.rows(), cfg_.k);
      m.map().noalias() = g.map() * s.centroids.map();
      out.push_back(std::move(m));
    }
    return out;
  }

  void check_shapes(const ModelState& s) const {
    if (static_cast<Index>(s.generators.size()) != m_ ||
        static_cast<Index>(s.assignment.size()) != n_ ||
        static_cast<Index>(s.weights.size()) != m_ ||
        s.centroids.rows() != cfg_.d || s.centroids.cols() != cfg_.k)
      throw DimensionError("model state does not match dataset/config shapes");
  }

  // Move the worst-fit sample into each empty cluster, clusters in ascending
  // index order. Samples already moved here are not moved twice. Returns the
  // number of moves.
  int repair_empty(ModelState& s, const std::vector<double>& t,
                   const EigenRowMajor& scores) const {
    const int k = cfg_.k;
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int a : s.assignment) ++counts[static_cast<std::size_t>(a)];

    std::vector<double> base;  // sum_v alpha_v ||X^(v)_:,j||^2, built lazily
    std::vector<char> moved;
    int moves = 0;
    for (int i = 0; i < k; ++i) {
      if (counts[static_cast<std::size_t>(i)] != 0) continue;
      if (base.empty()) {
        base.assign(static_cast<std::size_t>(n_), 0.0);
        for (Index v = 0; v < m_; ++v) {
          const double w = s.weights[static_cast<std::size_t>(v)];
          const auto& sq = col_sq_[static_cast<std::size_t>(v)];
          for (Index j = 0; j < n_; ++j) base[static_cast<std::size_t>(j)] += w * sq[static_cast<std::size_t>(j)];
        }
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

inline SolveResult solve(const MultiviewDataset& ds, const SolverConfig& cfg) {
  return Solver(ds, cfg).solve();
}

}  // namespace mvc::aimc
