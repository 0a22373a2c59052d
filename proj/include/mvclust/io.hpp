// Dataset manifests, matrix file formats (CSV and MVM1 binary), label files,
// the planted-model synthetic generator, and result serialization.
//
// On disk a matrix stores samples as rows; in memory views follow the
// d_v x n column-sample convention, so loaders transpose. MVM1 layout:
// 4-byte magic "MVM1", u32 little-endian row count (samples), u32
// little-endian column count (features), then row-major IEEE-754 doubles.
#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvclust/dataset.hpp"
#include "mvclust/linalg.hpp"
#include "mvclust/matrix.hpp"
#include "mvclust/metrics.hpp"
#include "mvclust/model.hpp"
#include "mvclust/rng.hpp"

namespace mvc::io {

static_assert(std::endian::native == std::endian::little,
              "MVM1 readers/writers assume a little-endian host");

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// matrix files

inline Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    std::size_t col = 0;
    while (p <= end) {
      ++col;
      const char* q = p;
      while (q < end && *q != ',') ++q;
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(p, q, value);
      if (ec != std::errc() || ptr != q)
        throw IoError(path + ": unparseable cell at row " +
                      std::to_string(lineno) + ", col " + std::to_string(col));
      row.push_back(value);
      if (q == end) break;
      p = q + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ": row " + std::to_string(lineno) + " has " +
                    std::to_string(row.size()) + " cells, expected " +
                    std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty matrix file");

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(rows.front().size());
  Matrix m(d, n);  // transpose: samples become columns
  for (Index j = 0; j < n; ++j)
    for (Index f = 0; f < d; ++f)
      m(f, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(f)];
  return m;
}

inline void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  for (Index j = 0; j < m.cols(); ++j) {  // one sample per row
    for (Index f = 0; f < m.rows(); ++f) {
      std::snprintf(buf, sizeof buf, "%.17g", m(f, j));
      out << (f ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

inline Matrix load_matrix_mvm1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "MVM1")
    throw IoError(path + ": bad magic, not an MVM1 file");
  std::uint32_t n = 0, d = 0;
  if (!in.read(reinterpret_cast<char*>(&n), 4) ||
      !in.read(reinterpret_cast<char*>(&d), 4))
    throw IoError(path + ": truncated header");
  if (n == 0 || d == 0) throw IoError(path + ": zero-sized matrix");

  std::vector<double> raw(static_cast<std::size_t>(n) * d);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size() * sizeof(double))))
    throw IoError(path + ": truncated payload, expected " +
                  std::to_string(raw.size()) + " values");

  Matrix m(static_cast<Index>(d), static_cast<Index>(n));
  for (std::uint32_t j = 0; j < n; ++j)
    for (std::uint32_t f = 0; f < d; ++f)
      m(static_cast<Index>(f), static_cast<Index>(j)) =
          raw[static_cast<std::size_t>(j) * d + f];
  return m;
}

inline void save_matrix_mvm1(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write("MVM1", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(m.cols());
  const std::uint32_t d = static_cast<std::uint32_t>(m.rows());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  std::vector<double> raw(static_cast<std::size_t>(n) * d);
  for (std::uint32_t j = 0; j < n; ++j)
    for (std::uint32_t f = 0; f < d; ++f)
      raw[static_cast<std::size_t>(j) * d + f] =
          m(static_cast<Index>(f), static_cast<Index>(j));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(double)));
  if (!out) throw IoError("write failed for " + path);
}

inline Matrix load_matrix(const std::string& path, const std::string& format) {
  if (format == "csv") return load_matrix_csv(path);
  if (format == "mvm1") return load_matrix_mvm1(path);
  throw IoError("unknown matrix format '" + format + "' for " + path);
}

inline void save_matrix(const std::string& path, const std::string& format,
                        const Matrix& m) {
  if (format == "csv")
    save_matrix_csv(path, m);
  else if (format == "mvm1")
    save_matrix_mvm1(path, m);
  else
    throw IoError("unknown matrix format '" + format + "'");
}

// ---------------------------------------------------------------------------
// label files: one integer per line

inline std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int value = 0;
    const char* begin = line.data();
    const char* end = line.data() + line.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw IoError(path + ": bad label on line " + std::to_string(lineno));
    labels.push_back(value);
  }
  if (labels.empty()) throw IoError(path + ": empty label file");
  return labels;
}

inline void save_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (int l : labels) out << l << '\n';
  if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// dataset manifests

struct ManifestView {
  std::string name;
  std::string path;
  Index dim = 0;
  std::string format;  // "csv" | "mvm1"
};

struct Manifest {
  std::string name;
  Index n = 0;
  std::optional<int> k;
  std::vector<ManifestView> views;
  std::optional<std::string> labels_path;
};

inline Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("manifest " + path + ": " + e.what());
  }
  Manifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.n = j.at("n").get<Index>();
    if (j.contains("k") && !j["k"].is_null()) m.k = j["k"].get<int>();
    for (const auto& jv : j.at("views")) {
      ManifestView v;
      v.name = jv.at("name").get<std::string>();
      v.path = jv.at("path").get<std::string>();
      v.dim = jv.at("dim").get<Index>();
      v.format = jv.at("format").get<std::string>();
      m.views.push_back(std::move(v));
    }
    if (j.contains("labels_path") && !j["labels_path"].is_null())
      m.labels_path = j["labels_path"].get<std::string>();
  } catch (const json::exception& e) {
    throw IoError("manifest " + path + ": missing or mistyped field: " + e.what());
  }
  return m;
}

inline void save_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["name"] = m.name;
  j["n"] = m.n;
  if (m.k) j["k"] = *m.k;
  j["views"] = json::array();
  for (const auto& v : m.views)
    j["views"].push_back({{"name", v.name},
                          {"path", v.path},
                          {"dim", v.dim},
                          {"format", v.format}});
  if (m.labels_path) j["labels_path"] = *m.labels_path;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Loads every view named by the manifest, checks declared shapes and runs
// structural validation. Problems are aggregated so one failed load reports
// everything wrong at once. Warnings land in *report when provided.
inline MultiviewDataset load_dataset(const std::string& manifest_path,
                                     ValidationReport* report = nullptr) {
  const Manifest man = load_manifest(manifest_path);
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();

  MultiviewDataset ds;
  ds.name = man.name;
  ds.declared_k = man.k;
  std::vector<std::string> problems;

  for (const auto& mv : man.views) {
    const std::string full = (base / mv.path).string();
    try {
      Matrix x = load_matrix(full, mv.format);
      if (x.rows() != mv.dim)
        problems.push_back("view '" + mv.name + "': declared dim " +
                           std::to_string(mv.dim) + " but file has " +
                           std::to_string(x.rows()));
      if (x.cols() != man.n)
        problems.push_back("view '" + mv.name + "': declared n " +
                           std::to_string(man.n) + " but file has " +
                           std::to_string(x.cols()));
      ds.views.push_back(std::move(x));
      ds.view_names.push_back(mv.name);
    } catch (const Error& e) {
      problems.push_back(std::string(e.what()));
    }
  }

  if (man.labels_path) {
    const std::string full = (base / *man.labels_path).string();
    try {
      auto labels = load_labels(full);
      if (static_cast<Index>(labels.size()) != man.n)
        problems.push_back("labels: " + std::to_string(labels.size()) +
                           " entries, expected " + std::to_string(man.n));
      ds.labels = std::move(labels);
    } catch (const Error& e) {
      problems.push_back(std::string(e.what()));
    }
  }

  if (problems.empty()) {
    ValidationReport rep = validate_dataset(ds);
    for (const auto& e : rep.errors) problems.push_back(e);
    if (report) *report = rep;
  }

  if (!problems.empty()) {
    std::string msg = "failed to load dataset from " + manifest_path + ":";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw IoError(msg);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// planted-model synthetic generator

struct SyntheticSpec {
  Index n = 0;
  int k = 0;
  int d = 0;
  std::vector<Index> view_dims;
  double noise_sigma = 0.0;
  std::optional<std::vector<double>> cluster_weights;  // simplex over k
  std::optional<std::vector<double>> bad_view_sigma;   // per-view overrides
  std::uint64_t seed = 0;

  Index view_count() const { return static_cast<Index>(view_dims.size()); }
};

struct Synthetic {
  MultiviewDataset dataset;
  ModelState planted;
};

// Draws orthonormal F* (d x k) and per-view orthonormal G* (zero-padded past
// rank min(d, d_v)), samples labels from cluster_weights (uniform by default),
// and sets X^(v) = G*^(v) F* Y* + N(0, sigma_v^2). Deterministic given seed.
inline Synthetic gen_synthetic(const SyntheticSpec& spec) {
  if (spec.d < spec.k)
    throw ConfigError("gen_synthetic: need d >= k, got d=" +
                      std::to_string(spec.d) + ", k=" + std::to_string(spec.k));
  if (spec.n < 1 || spec.k < 1 || spec.view_dims.empty())
    throw ConfigError("gen_synthetic: need n >= 1, k >= 1 and at least one view");
  for (Index dv : spec.view_dims)
    if (dv < 1) throw ConfigError("gen_synthetic: view dims must be >= 1");
  if (spec.noise_sigma < 0.0)
    throw ConfigError("gen_synthetic: noise_sigma must be non-negative");
  if (spec.cluster_weights) {
    if (static_cast<int>(spec.cluster_weights->size()) != spec.k)
      throw ConfigError("gen_synthetic: cluster_weights must have k entries");
    double sum = 0.0;
    for (double w : *spec.cluster_weights) {
      if (w < 0.0) throw ConfigError("gen_synthetic: cluster weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("gen_synthetic: cluster_weights must sum to 1");
  }
  if (spec.bad_view_sigma &&
      spec.bad_view_sigma->size() != spec.view_dims.size())
    throw ConfigError("gen_synthetic: bad_view_sigma must have one entry per view");

  const Index m = spec.view_count();
  Rng rng(spec.seed);

  Matrix f_star = random_orthonormal(spec.d, spec.k, rng);

  std::vector<Matrix> generators;
  generators.reserve(static_cast<std::size_t>(m));
  for (Index v = 0; v < m; ++v) {
    const Index dv = spec.view_dims[static_cast<std::size_t>(v)];
    const Index r = std::min<Index>(spec.d, dv);
    const Matrix q = random_orthonormal(dv, r, rng);
    Matrix g(dv, spec.d);  // zero columns past the feasible rank
    for (Index row = 0; row < dv; ++row)
      for (Index c = 0; c < r; ++c) g(row, c) = q(row, c);
    generators.push_back(std::move(g));
  }

  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  if (spec.cluster_weights) {
    std::vector<double> cum(static_cast<std::size_t>(spec.k), 0.0);
    double acc = 0.0;
    for (int i = 0; i < spec.k; ++i) {
      acc += (*spec.cluster_weights)[static_cast<std::size_t>(i)];
      cum[static_cast<std::size_t>(i)] = acc;
    }
    for (Index j = 0; j < spec.n; ++j) {
      const double u = rng.uniform();
      int label = spec.k - 1;
      for (int i = 0; i < spec.k; ++i)
        if (u < cum[static_cast<std::size_t>(i)]) {
          label = i;
          break;
        }
      labels[static_cast<std::size_t>(j)] = label;
    }
  } else {
    for (Index j = 0; j < spec.n; ++j)
      labels[static_cast<std::size_t>(j)] =
          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.k)));
  }

  Synthetic out;
  out.dataset.name = "synthetic";
  out.dataset.declared_k = spec.k;
  out.dataset.labels = labels;
  for (Index v = 0; v < m; ++v) {
    const Index dv = spec.view_dims[static_cast<std::size_t>(v)];
    const double sigma = spec.bad_view_sigma
                             ? (*spec.bad_view_sigma)[static_cast<std::size_t>(v)]
                             : spec.noise_sigma;
    // same gathered product the solvers use, so a zero-noise view is exact
    Matrix centers = matmul(generators[static_cast<std::size_t>(v)], f_star);
    Matrix x(dv, spec.n);
    for (Index j = 0; j < spec.n; ++j)
      for (Index f = 0; f < dv; ++f)
        x(f, j) = centers(f, labels[static_cast<std::size_t>(j)]);
    if (sigma > 0.0)
      for (Index f = 0; f < dv; ++f)
        for (Index j = 0; j < spec.n; ++j) x(f, j) += sigma * rng.normal();
    out.dataset.views.push_back(std::move(x));
    out.dataset.view_names.push_back("view_" + std::to_string(v));
  }

  out.planted.generators = std::move(generators);
  out.planted.centroids = std::move(f_star);
  out.planted.assignment = std::move(labels);
  out.planted.weights.assign(static_cast<std::size_t>(m),
                             1.0 / static_cast<double>(m));
  out.planted.d = spec.d;
  out.planted.k = spec.k;
  return out;
}

// Writes manifest + per-view matrix files + labels into a directory.
inline std::string write_synthetic(const std::string& dir, const Synthetic& syn,
                                   const std::string& format = "mvm1") {
  std::filesystem::create_directories(dir);
  Manifest man;
  man.name = syn.dataset.name;
  man.n = syn.dataset.sample_count();
  man.k = syn.dataset.declared_k;
  for (Index v = 0; v < syn.dataset.view_count(); ++v) {
    const std::string fname =
        "view_" + std::to_string(v) + (format == "csv" ? ".csv" : ".mvm1");
    save_matrix((std::filesystem::path(dir) / fname).string(), format,
                syn.dataset.views[static_cast<std::size_t>(v)]);
    man.views.push_back({syn.dataset.view_names[static_cast<std::size_t>(v)],
                         fname, syn.dataset.view_dim(v), format});
  }
  if (syn.dataset.labels) {
    save_labels((std::filesystem::path(dir) / "labels.txt").string(),
                *syn.dataset.labels);
    man.labels_path = "labels.txt";
  }
  const std::string manifest_path =
      (std::filesystem::path(dir) / "manifest.json").string();
  save_manifest(manifest_path, man);
  return manifest_path;
}

// ---------------------------------------------------------------------------
// result serialization

struct SweepEntry {
  int d = 0;
  double objective = 0.0;
  std::optional<double> acc;
  bool best = false;
};

struct RunOutput {
  std::string method;  // "aimc" | "nonmf"
  SolverConfig config;
  std::string dataset_name;
  Index n = 0;
  std::vector<Index> view_dims;
  bool converged = false;
  int iters_run = 0;
  std::vector<TraceEntry> trace;
  std::vector<double> weights;  // empty for nonmf
  std::vector<double> residuals;
  std::vector<int> assignment;
  std::optional<metrics::MetricReport> report;
  std::optional<std::vector<SweepEntry>> sweep;
  std::optional<std::string> sweep_metric;
  std::vector<std::string> notes;
  PhaseSeconds seconds;
  std::vector<double> per_iteration_seconds;
};

inline json config_to_json(const SolverConfig& c) {
  return json{{"d", c.d},
              {"k", c.k},
              {"max_iters", c.max_iters},
              {"tol", c.tol},
              {"seed", c.seed},
              {"init", to_string(c.init_mode)},
              {"normalize", to_string(c.normalization)},
              {"epsilon", c.epsilon},
              {"repair_empty_clusters", c.repair_empty_clusters}};
}

// Timing lives in one top-level object so determinism checks can erase it and
// hash the rest.
inline json result_to_json(const RunOutput& out, bool include_timing = true) {
  json j;
  j["method"] = out.method;
  j["dataset"] = {{"name", out.dataset_name},
                  {"n", out.n},
                  {"m", out.view_dims.size()},
                  {"view_dims", out.view_dims}};
  j["config"] = config_to_json(out.config);
  j["converged"] = out.converged;
  j["iters_run"] = out.iters_run;
  if (!out.trace.empty()) {
    j["objective"] = {{"unsquared", out.trace.back().unsquared},
                      {"weighted_squared", out.trace.back().weighted_squared}};
  }
  j["per_view"] = {{"weights", out.weights}, {"residuals", out.residuals}};
  if (out.report) {
    j["metrics"] = {{"acc", out.report->acc},
                    {"nmi", out.report->nmi},
                    {"purity", out.report->purity},
                    {"fscore", out.report->fscore}};
  } else {
    j["metrics"] = nullptr;
  }
  j["trace"] = json::array();
  for (const auto& t : out.trace)
    j["trace"].push_back({{"iter", t.iter},
                          {"unsquared", t.unsquared},
                          {"weighted_squared", t.weighted_squared}});
  if (out.sweep) {
    j["sweep"] = {{"metric", out.sweep_metric ? *out.sweep_metric : "objective"},
                  {"entries", json::array()}};
    for (const auto& e : *out.sweep) {
      json je = {{"d", e.d}, {"objective", e.objective}};
      if (e.acc) je["acc"] = *e.acc;
      je["best"] = e.best;
      j["sweep"]["entries"].push_back(std::move(je));
    }
  }
  j["assignment"] = out.assignment;
  j["notes"] = out.notes;
  if (include_timing) {
    j["timing"] = {{"init_s", out.seconds.init},
                   {"generators_s", out.seconds.generators},
                   {"centroids_s", out.seconds.centroids},
                   {"assignments_s", out.seconds.assignments},
                   {"weights_s", out.seconds.weights},
                   {"total_s", out.seconds.total},
                   {"per_iteration_s", out.per_iteration_seconds}};
  }
  return j;
}

inline void write_trace_csv(const std::string& path,
                            const std::vector<TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "iter,unsquared,weighted_squared\n";
  char buf[128];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g", t.iter, t.unsquared,
                  t.weighted_squared);
    out << buf << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

// JSON result + companion CSV of the objective trace.
inline void write_result(const RunOutput& out, const std::string& json_path,
                         const std::string& trace_csv_path) {
  std::ofstream f(json_path);
  if (!f) throw IoError("cannot write " + json_path);
  f << result_to_json(out).dump(2) << '\n';
  if (!f) throw IoError("write failed for " + json_path);
  write_trace_csv(trace_csv_path, out.trace);
}

}  // namespace mvc::io
