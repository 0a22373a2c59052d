// Seeded k-means++ with Lloyd refinement, plus the shared label
// initialization used by both solvers (k-means on the concatenated z-scored
// views, or a balanced random draw).
#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "mvclust/matrix.hpp"
#include "mvclust/model.hpp"
#include "mvclust/rng.hpp"

namespace mvc {

struct KmeansResult {
  std::vector<int> labels;
  Matrix centers;  // k x dim, sample-major
  int iters = 0;
};

namespace detail {

inline double sq_dist(const double* a, const double* b, Index dim) {
  double s = 0.0;
  for (Index i = 0; i < dim; ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}

}  // namespace detail

// samples: n x dim, one sample per row. Ties in the nearest-center search
// break toward the smaller center index; empty clusters are reseeded with
// the sample farthest from its own center.
inline KmeansResult kmeans(const Matrix& samples, int k, Rng& rng,
                           int max_iters = 100) {
  const Index n = samples.rows();
  const Index dim = samples.cols();
  if (k < 1 || k > n)
    throw ConfigError("kmeans: k=" + std::to_string(k) +
                      " infeasible for n=" + std::to_string(n));

  Matrix centers(k, dim);
  std::vector<double> min_sq(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());

  // k-means++ seeding
  Index first = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  centers.row(0) = samples.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double d2 = detail::sq_dist(samples.data() + j * dim,
                                        centers.data() + (c - 1) * dim, dim);
      if (d2 < min_sq[static_cast<std::size_t>(j)])
        min_sq[static_cast<std::size_t>(j)] = d2;
      total += min_sq[static_cast<std::size_t>(j)];
    }
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index j = 0; j < n; ++j) {
        acc += min_sq[static_cast<std::size_t>(j)];
        if (acc >= target) {
          pick = j;
          break;
        }
      }
    } else {
      // all remaining mass zero (duplicated points): uniform draw
      pick = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = samples.row(pick);
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  std::vector<double> dist_own(static_cast<std::size_t>(n), 0.0);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    bool changed = false;
    for (Index j = 0; j < n; ++j) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d2 = detail::sq_dist(samples.data() + j * dim,
                                          centers.data() + c * dim, dim);
        if (d2 < best_d) {
          best_d = d2;
          best = c;
        }
      }
      dist_own[static_cast<std::size_t>(j)] = best_d;
      if (labels[static_cast<std::size_t>(j)] != best) {
        labels[static_cast<std::size_t>(j)] = best;
        changed = true;
      }
    }

    std::fill(counts.begin(), counts.end(), 0);
    for (Index j = 0; j < n; ++j) ++counts[static_cast<std::size_t>(labels[j])];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // reseed with the worst-fit sample
        Index worst = 0;
        double worst_d = -1.0;
        for (Index j = 0; j < n; ++j)
          if (counts[static_cast<std::size_t>(labels[j])] > 1 &&
              dist_own[static_cast<std::size_t>(j)] > worst_d) {
            worst_d = dist_own[static_cast<std::size_t>(j)];
            worst = j;
          }
        --counts[static_cast<std::size_t>(labels[worst])];
        labels[static_cast<std::size_t>(worst)] = c;
        counts[static_cast<std::size_t>(c)] = 1;
        changed = true;
      }
    }

    centers.map().setZero();
    for (Index j = 0; j < n; ++j)
      centers.row(labels[static_cast<std::size_t>(j)]) += samples.row(j);
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    if (!changed) break;
  }

  KmeansResult out;
  out.labels = std::move(labels);
  out.centers = std::move(centers);
  out.iters = iter;
  return out;
}

// Initial hard assignment shared by the solvers. kmeans-concat z-scores every
// feature row across samples, stacks the views into one n x h sample-major
// matrix and runs seeded k-means++; random produces a balanced shuffled
// labeling (cluster sizes differ by at most one).
inline std::vector<int> initial_labels(const std::vector<Matrix>& views, int k,
                                       InitMode mode, Rng& rng) {
  const Index n = views.front().cols();
  if (mode == InitMode::kRandom) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j)
      labels[static_cast<std::size_t>(j)] = static_cast<int>(j % k);
    for (Index j = n - 1; j > 0; --j) {
      const Index o =
          static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(j + 1)));
      std::swap(labels[static_cast<std::size_t>(j)], labels[static_cast<std::size_t>(o)]);
    }
    return labels;
  }

  Index h = 0;
  for (const Matrix& x : views) h += x.rows();
  Matrix concat(n, h);
  Index offset = 0;
  for (const Matrix& x : views) {
    for (Index f = 0; f < x.rows(); ++f) {
      double mean = 0.0;
      for (Index j = 0; j < n; ++j) mean += x(f, j);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (Index j = 0; j < n; ++j) {
        const double e = x(f, j) - mean;
        var += e * e;
      }
      const double sd = std::sqrt(var / static_cast<double>(n));
      for (Index j = 0; j < n; ++j)
        concat(j, offset + f) = sd > 0.0 ? (x(f, j) - mean) / sd : 0.0;
    }
    offset += x.rows();
  }
  return kmeans(concat, k, rng).labels;
}

}  // namespace mvc
