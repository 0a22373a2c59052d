// External clustering-quality metrics: accuracy under optimal cluster-to-class
// matching, normalized mutual information, purity and pairwise F-score.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mvclust/matrix.hpp"

namespace mvc::metrics {

// Contingency counts between two labelings; ids may be arbitrary integers.
struct Contingency {
  std::vector<std::vector<std::int64_t>> table;  // k_pred x k_true
  std::int64_t n = 0;

  Index pred_clusters() const { return static_cast<Index>(table.size()); }
  Index true_clusters() const {
    return table.empty() ? 0 : static_cast<Index>(table.front().size());
  }
};

inline Contingency contingency(const std::vector<int>& pred,
                               const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw DimensionError("label vectors differ in length: " +
                         std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()));
  std::map<int, int> pid, tid;
  for (int p : pred) pid.emplace(p, 0);
  for (int t : truth) tid.emplace(t, 0);
  int next = 0;
  for (auto& [key, val] : pid) val = next++;
  next = 0;
  for (auto& [key, val] : tid) val = next++;

  Contingency c;
  c.n = static_cast<std::int64_t>(pred.size());
  c.table.assign(pid.size(), std::vector<std::int64_t>(tid.size(), 0));
  for (std::size_t j = 0; j < pred.size(); ++j)
    ++c.table[static_cast<std::size_t>(pid[pred[j]])]
             [static_cast<std::size_t>(tid[truth[j]])];
  return c;
}

// Maximum-weight one-to-one matching on a (possibly rectangular) non-negative
// weight table; O(max(k,k')^3) Hungarian algorithm with potentials. Returns
// per-row matched column (-1 when a row is matched to zero padding).
inline std::vector<int> hungarian_max(
    const std::vector<std::vector<std::int64_t>>& weights) {
  const int rows = static_cast<int>(weights.size());
  const int cols = rows > 0 ? static_cast<int>(weights.front().size()) : 0;
  if (rows == 0 || cols == 0) return std::vector<int>(static_cast<std::size_t>(rows), -1);
  const int s = std::max(rows, cols);

  // minimize (max_w - w) over a zero-padded square table
  std::int64_t max_w = 0;
  for (const auto& row : weights)
    for (std::int64_t w : row) {
      if (w < 0) throw NumericError("hungarian_max: negative weight");
      max_w = std::max(max_w, w);
    }
  auto cost = [&](int i, int j) -> double {
    const std::int64_t w =
        (i < rows && j < cols) ? weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] : 0;
    return static_cast<double>(max_w - w);
  };

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(s) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(s) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(s) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(s) + 1, 0);
  for (int i = 1; i <= s; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(s) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(s) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= s; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= s; ++j) {
    const int i = p[static_cast<std::size_t>(j)] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) match[static_cast<std::size_t>(i)] = j - 1;
  }
  return match;
}

inline std::int64_t matched_weight(
    const std::vector<std::vector<std::int64_t>>& weights,
    const std::vector<int>& match) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < match.size(); ++i)
    if (match[i] >= 0) total += weights[i][static_cast<std::size_t>(match[i])];
  return total;
}

// Fraction of samples on the optimal cluster-to-class matching.
inline double accuracy(const std::vector<int>& pred,
                       const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  const std::vector<int> match = hungarian_max(c.table);
  return static_cast<double>(matched_weight(c.table, match)) /
         static_cast<double>(c.n);
}

// I(pred; truth) / sqrt(H(pred) H(truth)) with natural logs. Both entropies
// zero -> 1; exactly one zero -> 0.
inline double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  const double n = static_cast<double>(c.n);

  std::vector<std::int64_t> row_sum(static_cast<std::size_t>(c.pred_clusters()), 0);
  std::vector<std::int64_t> col_sum(static_cast<std::size_t>(c.true_clusters()), 0);
  for (std::size_t i = 0; i < c.table.size(); ++i)
    for (std::size_t j = 0; j < c.table[i].size(); ++j) {
      row_sum[i] += c.table[i][j];
      col_sum[j] += c.table[i][j];
    }

  auto entropy = [&](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (std::int64_t s : sums)
      if (s > 0) {
        const double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
      }
    return h;
  };
  const double hp = entropy(row_sum);
  const double ht = entropy(col_sum);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  if (hp == 0.0 || ht == 0.0) return 0.0;

  double mi = 0.0;
  for (std::size_t i = 0; i < c.table.size(); ++i)
    for (std::size_t j = 0; j < c.table[i].size(); ++j)
      if (c.table[i][j] > 0) {
        const double pij = static_cast<double>(c.table[i][j]) / n;
        const double pi = static_cast<double>(row_sum[i]) / n;
        const double qj = static_cast<double>(col_sum[j]) / n;
        mi += pij * std::log(pij / (pi * qj));
      }
  return mi / std::sqrt(hp * ht);
}

// Mean over clusters of the dominant-class fraction.
inline double purity(const std::vector<int>& pred,
                     const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  std::int64_t dominant = 0;
  for (const auto& row : c.table) {
    std::int64_t best = 0;
    for (std::int64_t w : row) best = std::max(best, w);
    dominant += best;
  }
  return static_cast<double>(dominant) / static_cast<double>(c.n);
}

// Pairwise F-score over all n(n-1)/2 sample pairs, computed from contingency
// sums rather than pair enumeration. F = 0 when there are no true positives.
inline double fscore_pairwise(const std::vector<int>& pred,
                              const std::vector<int>& truth) {
  const Contingency c = contingency(pred, truth);
  auto comb2 = [](std::int64_t x) { return x * (x - 1) / 2; };

  std::int64_t tp = 0, pred_pairs = 0, true_pairs = 0;
  std::vector<std::int64_t> col_sum(static_cast<std::size_t>(c.true_clusters()), 0);
  for (const auto& row : c.table) {
    std::int64_t rs = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      tp += comb2(row[j]);
      rs += row[j];
      col_sum[j] += row[j];
    }
    pred_pairs += comb2(rs);
  }
  for (std::int64_t cs : col_sum) true_pairs += comb2(cs);

  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(pred_pairs);
  const double recall = static_cast<double>(tp) / static_cast<double>(true_pairs);
  return 2.0 * precision * recall / (precision + recall);
}

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double fscore = 0.0;
};

inline MetricReport evaluate(const std::vector<int>& pred,
                             const std::vector<int>& truth) {
  MetricReport r;
  r.acc = accuracy(pred, truth);
  r.nmi = nmi(pred, truth);
  r.purity = purity(pred, truth);
  r.fscore = fscore_pairwise(pred, truth);
  return r;
}

}  // namespace mvc::metrics
