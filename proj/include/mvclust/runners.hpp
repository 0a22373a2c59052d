// Subcommand implementations behind the CLI: run, gen, bench, eval.
#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mvclust/aimc.hpp"
#include "mvclust/io.hpp"
#include "mvclust/metrics.hpp"
#include "mvclust/nonmf.hpp"
#include "mvclust/parallel.hpp"

namespace mvc::cli {

struct RunSpec {
  std::string data;
  std::string method = "aimc";
  SolverConfig config;
  bool d_sweep = false;
  int repeats = 1;
  int threads = 1;
  std::string out = "result";
};

// One solve at a fixed d; fills everything except sweep bookkeeping.
inline io::RunOutput run_once(const MultiviewDataset& ds,
                              const std::string& method,
                              const SolverConfig& cfg) {
  io::RunOutput out;
  out.method = method;
  out.config = cfg;
  out.dataset_name = ds.name;
  out.n = ds.sample_count();
  for (Index v = 0; v < ds.view_count(); ++v)
    out.view_dims.push_back(ds.view_dim(v));

  if (method == "nonmf") {
    nonmf::NonmfResult res = nonmf::solve(ds, cfg);
    out.converged = res.converged;
    out.iters_run = res.iters_run;
    out.trace = std::move(res.objective_trace);
    out.residuals = std::move(res.per_view_residuals);
    out.assignment = std::move(res.state.assignment);
    out.notes = std::move(res.notes);
    out.seconds = res.seconds;
    out.per_iteration_seconds = std::move(res.per_iteration_seconds);
  } else if (method == "aimc") {
    SolveResult res = aimc::solve(ds, cfg);
    out.converged = res.converged;
    out.iters_run = res.iters_run;
    out.trace = std::move(res.objective_trace);
    out.weights = std::move(res.state.weights);
    out.residuals = std::move(res.per_view_residuals);
    out.assignment = std::move(res.state.assignment);
    out.notes = std::move(res.notes);
    out.seconds = res.seconds;
    out.per_iteration_seconds = std::move(res.per_iteration_seconds);
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }

  if (ds.labels) out.report = metrics::evaluate(out.assignment, *ds.labels);
  return out;
}

// d values k, k+5, ..., capped at 300 (or at k when k > 300).
inline std::vector<int> default_d_sweep(int k) {
  std::vector<int> ds;
  for (int d = k; d <= std::max(300, k); d += 5) {
    ds.push_back(d);
    if (d >= 300) break;
  }
  return ds;
}

// Runs every sweep entry with a derived seed (base seed + entry index),
// entries in parallel worker threads, then picks the best by ACC when labels
// exist and by final unsquared objective otherwise (ties -> smaller d).
inline io::RunOutput run_sweep(const MultiviewDataset& ds,
                               const std::string& method,
                               const SolverConfig& base_cfg,
                               const std::vector<int>& d_values) {
  const int count = static_cast<int>(d_values.size());
  std::vector<io::RunOutput> outputs(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  for_each_block(count, 1, [&](std::int64_t b, std::int64_t lo, std::int64_t) {
    try {
      SolverConfig cfg = base_cfg;
      cfg.d = d_values[static_cast<std::size_t>(lo)];
      cfg.seed = base_cfg.seed + static_cast<std::uint64_t>(lo);
      outputs[static_cast<std::size_t>(lo)] = run_once(ds, method, cfg);
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const bool by_acc = ds.labels.has_value();
  int best = 0;
  for (int i = 1; i < count; ++i) {
    const auto& cand = outputs[static_cast<std::size_t>(i)];
    const auto& cur = outputs[static_cast<std::size_t>(best)];
    if (by_acc ? (cand.report->acc > cur.report->acc)
               : (cand.trace.back().unsquared < cur.trace.back().unsquared))
      best = i;
  }

  io::RunOutput chosen = outputs[static_cast<std::size_t>(best)];
  chosen.sweep_metric = by_acc ? "acc" : "objective";
  std::vector<io::SweepEntry> entries;
  for (int i = 0; i < count; ++i) {
    const auto& o = outputs[static_cast<std::size_t>(i)];
    io::SweepEntry e;
    e.d = o.config.d;
    e.objective = o.trace.back().unsquared;
    if (o.report) e.acc = o.report->acc;
    e.best = i == best;
    entries.push_back(e);
  }
  chosen.sweep = std::move(entries);
  return chosen;
}

inline std::string summary_line(const io::RunOutput& out) {
  // aimc minimizes the unsquared objective, nonmf the squared one
  const double objective = out.method == "nonmf"
                               ? out.trace.back().weighted_squared
                               : out.trace.back().unsquared;
  char buf[512];
  if (out.report) {
    std::snprintf(buf, sizeof buf,
                  "method=%s d=%d k=%d iters=%d converged=%d "
                  "objective=%.6g acc=%.4f nmi=%.4f purity=%.4f fscore=%.4f "
                  "seconds=%.3f",
                  out.method.c_str(), out.config.d, out.config.k, out.iters_run,
                  out.converged ? 1 : 0, objective, out.report->acc,
                  out.report->nmi, out.report->purity, out.report->fscore,
                  out.seconds.total);
  } else {
    std::snprintf(buf, sizeof buf,
                  "method=%s d=%d k=%d iters=%d converged=%d "
                  "objective=%.6g seconds=%.3f",
                  out.method.c_str(), out.config.d, out.config.k, out.iters_run,
                  out.converged ? 1 : 0, objective, out.seconds.total);
  }
  return buf;
}

// Full `run` subcommand: load, solve (optionally sweeping d and repeating with
// derived seeds), write <out>.json, <out>_trace.csv and <out>_labels.txt.
inline int cmd_run(const RunSpec& spec, std::ostream& log = std::cout) {
  set_max_threads(spec.threads);

  ValidationReport report;
  MultiviewDataset ds = io::load_dataset(spec.data, &report);
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";

  SolverConfig cfg = spec.config;
  if (cfg.k == 0) {
    if (!ds.declared_k)
      throw ConfigError("no --k given and the manifest declares none");
    cfg.k = *ds.declared_k;
  }
  if (cfg.d == 0) cfg.d = cfg.k;

  auto run_full = [&](std::uint64_t seed) {
    SolverConfig c = cfg;
    c.seed = seed;
    return spec.d_sweep ? run_sweep(ds, spec.method, c, default_d_sweep(c.k))
                        : run_once(ds, spec.method, c);
  };

  io::RunOutput out = run_full(cfg.seed);

  if (spec.repeats > 1 && out.report) {
    // protocol reproduction: independent repeats with derived seeds,
    // mean/std reported alongside the first repeat's result
    std::vector<metrics::MetricReport> reps{*out.report};
    for (int r = 1; r < spec.repeats; ++r) {
      io::RunOutput o = run_full(cfg.seed + static_cast<std::uint64_t>(r));
      reps.push_back(*o.report);
    }
    auto stat = [&](auto getter) {
      double mean = 0.0;
      for (const auto& m : reps) mean += getter(m);
      mean /= static_cast<double>(reps.size());
      double var = 0.0;
      for (const auto& m : reps) {
        const double e = getter(m) - mean;
        var += e * e;
      }
      return std::pair<double, double>(
          mean, std::sqrt(var / static_cast<double>(reps.size())));
    };
    const auto [acc_m, acc_s] = stat([](const auto& m) { return m.acc; });
    const auto [nmi_m, nmi_s] = stat([](const auto& m) { return m.nmi; });
    const auto [pur_m, pur_s] = stat([](const auto& m) { return m.purity; });
    const auto [fs_m, fs_s] = stat([](const auto& m) { return m.fscore; });
    char note[256];
    std::snprintf(note, sizeof note,
                  "repeats=%d acc=%.4f+/-%.4f nmi=%.4f+/-%.4f "
                  "purity=%.4f+/-%.4f fscore=%.4f+/-%.4f",
                  spec.repeats, acc_m, acc_s, nmi_m, nmi_s, pur_m, pur_s, fs_m,
                  fs_s);
    out.notes.push_back(note);
    log << note << "\n";
  }

  io::write_result(out, spec.out + ".json", spec.out + "_trace.csv");
  io::save_labels(spec.out + "_labels.txt", out.assignment);
  log << summary_line(out) << "\n";
  return 0;
}

struct GenSpec {
  io::SyntheticSpec synthetic;
  std::string format = "mvm1";
  std::string out = "synthetic";
};

inline int cmd_gen(const GenSpec& spec, std::ostream& log = std::cout) {
  const io::Synthetic syn = io::gen_synthetic(spec.synthetic);
  const std::string manifest = io::write_synthetic(spec.out, syn, spec.format);
  log << "wrote " << manifest << " (n=" << syn.dataset.sample_count()
      << ", m=" << syn.dataset.view_count() << ", k=" << spec.synthetic.k
      << ")\n";
  return 0;
}

struct BenchSpec {
  std::vector<Index> sizes = {1000, 2000, 4000, 8000, 16000};
  int iters = 10;
  int k = 10;
  int d = 15;
  std::vector<Index> view_dims = {100, 80, 60};
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
  std::string method = "aimc";
  std::string out = "bench";
};

struct BenchResult {
  std::vector<Index> sizes;
  std::vector<std::vector<double>> per_iteration_seconds;  // per size
  std::vector<double> best_seconds;  // fastest iteration per size
  double slope = 0.0;
};

// Planted datasets at each size, a fixed iteration count with no convergence
// stop (the update loop is driven directly), and a least-squares slope of
// log(fastest per-iteration time) against log(n). Runs single-threaded so the
// scaling is not skewed by block counts.
inline BenchResult run_bench(const BenchSpec& spec) {
  const int saved_threads = max_threads();
  set_max_threads(1);

  BenchResult result;
  result.sizes = spec.sizes;
  for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
    io::SyntheticSpec syn;
    syn.n = spec.sizes[i];
    syn.k = spec.k;
    syn.d = spec.d;
    syn.view_dims = spec.view_dims;
    syn.noise_sigma = spec.noise_sigma;
    syn.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
    const io::Synthetic data = io::gen_synthetic(syn);

    SolverConfig cfg;
    cfg.k = spec.k;
    cfg.d = spec.d;
    cfg.max_iters = spec.iters;
    cfg.seed = syn.seed;

    std::vector<double> per_iter;
    per_iter.reserve(static_cast<std::size_t>(spec.iters));
    if (spec.method == "nonmf") {
      nonmf::Solver solver(data.dataset, cfg);
      nonmf::NonmfState state = solver.init_state();
      for (int it = 0; it < spec.iters; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        solver.update_centroids(state);
        solver.update_assignments(state);
        solver.residuals(state);
        per_iter.push_back(detail::elapsed_s(t0));
      }
    } else {
      aimc::Solver solver(data.dataset, cfg);
      ModelState state = solver.init_state();
      for (int it = 0; it < spec.iters; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        solver.update_generators(state);
        solver.update_centroids(state);
        solver.update_assignments(state);
        solver.update_weights(state);
        per_iter.push_back(detail::elapsed_s(t0));
      }
    }
    // the fastest iteration is the least noisy estimate of the true cost
    result.best_seconds.push_back(
        *std::min_element(per_iter.begin(), per_iter.end()));
    result.per_iteration_seconds.push_back(std::move(per_iter));
  }

  // least-squares slope of log t vs log n
  const std::size_t count = result.sizes.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = std::log(static_cast<double>(result.sizes[i]));
    const double y = std::log(result.best_seconds[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(count);
  result.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);

  set_max_threads(saved_threads);
  return result;
}

// CSV with one row per (n, iter) plus a JSON summary with the slope.
inline int cmd_bench(const BenchSpec& spec, std::ostream& log = std::cout) {
  const BenchResult result = run_bench(spec);

  std::ofstream csv(spec.out + ".csv");
  if (!csv) throw IoError("cannot write " + spec.out + ".csv");
  csv << "n,iter,seconds\n";
  char buf[96];
  for (std::size_t i = 0; i < result.sizes.size(); ++i)
    for (std::size_t t = 0; t < result.per_iteration_seconds[i].size(); ++t) {
      std::snprintf(buf, sizeof buf, "%lld,%zu,%.9f",
                    static_cast<long long>(result.sizes[i]), t + 1,
                    result.per_iteration_seconds[i][t]);
      csv << buf << '\n';
    }

  io::json j;
  j["sizes"] = result.sizes;
  j["best_iteration_seconds"] = result.best_seconds;
  j["loglog_slope"] = result.slope;
  std::ofstream js(spec.out + ".json");
  if (!js) throw IoError("cannot write " + spec.out + ".json");
  js << j.dump(2) << '\n';

  log << "loglog_slope=" << result.slope << "\n";
  return 0;
}

// Prints all four metrics between two label files as one JSON line.
inline int cmd_eval(const std::string& pred_path, const std::string& truth_path,
                    std::ostream& log = std::cout) {
  const std::vector<int> pred = io::load_labels(pred_path);
  const std::vector<int> truth = io::load_labels(truth_path);
  if (pred.size() != truth.size())
    throw IoError("label files differ in length: " +
                  std::to_string(pred.size()) + " vs " +
                  std::to_string(truth.size()));
  const metrics::MetricReport r = metrics::evaluate(pred, truth);
  io::json j = {{"acc", r.acc},
                {"nmi", r.nmi},
                {"purity", r.purity},
                {"fscore", r.fscore}};
  log << j.dump() << "\n";
  return 0;
}

}  // namespace mvc::cli
