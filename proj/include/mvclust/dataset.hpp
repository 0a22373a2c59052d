// Multiview dataset container and structural validation.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvclust/matrix.hpp"

namespace mvc {

// m view matrices of shape d_v x n sharing one sample axis (samples are
// columns), plus optional ground-truth labels.
struct MultiviewDataset {
  std::string name;
  std::vector<Matrix> views;
  std::vector<std::string> view_names;
  std::optional<std::vector<int>> labels;  // length n, arbitrary integer codes
  std::optional<int> declared_k;

  Index view_count() const { return static_cast<Index>(views.size()); }
  Index sample_count() const { return views.empty() ? 0 : views.front().cols(); }
  Index view_dim(Index v) const { return views[static_cast<std::size_t>(v)].rows(); }
  Index total_dim() const {
    Index h = 0;
    for (const auto& x : views) h += x.rows();
    return h;
  }
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool valid() const { return errors.empty(); }
};

// Structural checks: shared sample count, finiteness, constant features,
// and view dimensions that cannot carry k clusters or a d-dimensional
// latent space. Report-only; never throws.
inline ValidationReport validate_dataset(const MultiviewDataset& ds,
                                         std::optional<int> k = std::nullopt,
                                         std::optional<int> d = std::nullopt) {
  ValidationReport rep;
  const Index m = ds.view_count();
  if (m < 1) {
    rep.errors.push_back("dataset has no views");
    return rep;
  }
  const Index n = ds.sample_count();
  if (n < 2)
    rep.errors.push_back("dataset needs at least 2 samples, has " +
                         std::to_string(n));

  for (Index v = 0; v < m; ++v) {
    const Matrix& x = ds.views[static_cast<std::size_t>(v)];
    const std::string vname =
        v < static_cast<Index>(ds.view_names.size())
            ? ds.view_names[static_cast<std::size_t>(v)]
            : "view_" + std::to_string(v);
    if (x.cols() != n)
      rep.errors.push_back("sample-count mismatch: " + vname + " has " +
                           std::to_string(x.cols()) + " samples, expected " +
                           std::to_string(n));
    if (x.rows() < 1) rep.errors.push_back(vname + " has no features");

    const auto [br, bc] = x.first_non_finite();
    if (br >= 0)
      rep.errors.push_back("non-finite entry in " + vname + " at (view " +
                           std::to_string(v) + ", row " + std::to_string(br) +
                           ", col " + std::to_string(bc) + ")");

    // constant (zero-variance) feature rows
    Index constant_rows = 0;
    for (Index r = 0; r < x.rows(); ++r) {
      bool constant = true;
      const double first = x(r, 0);
      for (Index c = 1; c < x.cols(); ++c)
        if (x(r, c) != first) {
          constant = false;
          break;
        }
      if (constant) ++constant_rows;
    }
    if (constant_rows > 0)
      rep.warnings.push_back(vname + " has " + std::to_string(constant_rows) +
                             " constant (zero-variance) feature rows");

    const std::optional<int> kk = k ? k : ds.declared_k;
    if (kk && x.rows() < *kk)
      rep.warnings.push_back(vname + " dimension " + std::to_string(x.rows()) +
                             " is below k=" + std::to_string(*kk));
    if (d && x.rows() < *d)
      rep.warnings.push_back(vname + " dimension " + std::to_string(x.rows()) +
                             " is below d=" + std::to_string(*d) +
                             "; its generator will be rank-limited");
  }

  if (ds.labels && static_cast<Index>(ds.labels->size()) != n)
    rep.errors.push_back("labels length " + std::to_string(ds.labels->size()) +
                         " does not match sample count " + std::to_string(n));
  return rep;
}

}  // namespace mvc
