// mvclust: multiview clustering CLI.
//
//   mvclust run   --data manifest.json --method aimc --k 10 --d 15 --out res
//   mvclust gen   --n 2000 --k 10 --d 15 --dims 100,80,60 --noise 0.01 --out dir
//   mvclust bench --out bench
//   mvclust eval  --pred labels_a.txt --truth labels_b.txt

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvclust/runners.hpp"

namespace {

std::vector<mvc::Index> parse_dims(const std::string& csv) {
  std::vector<mvc::Index> dims;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) throw mvc::ConfigError("bad dims list '" + csv + "'");
    dims.push_back(static_cast<mvc::Index>(std::stoll(tok)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return dims;
}

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> xs;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string tok =
        csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) throw mvc::ConfigError("bad list '" + csv + "'");
    xs.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return xs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiview clustering solvers, synthetic data and benchmarks"};
  app.require_subcommand(1);

  // run
  mvc::cli::RunSpec run;
  std::string run_init = "kmeans-concat";
  std::string run_normalize = "none";
  auto* cmd_run = app.add_subcommand("run", "solve a dataset and write results");
  cmd_run->add_option("--data", run.data, "dataset manifest path")->required();
  cmd_run->add_option("--method", run.method, "aimc|nonmf")
      ->check(CLI::IsMember({"aimc", "nonmf"}));
  cmd_run->add_option("--k", run.config.k, "cluster count (default: manifest k)");
  cmd_run->add_option("--d", run.config.d, "latent dimension (default: k)");
  cmd_run->add_flag("--d-sweep", run.d_sweep, "sweep d over k,k+5,...,300");
  cmd_run->add_option("--max-iters", run.config.max_iters, "iteration cap");
  cmd_run->add_option("--tol", run.config.tol, "relative objective tolerance");
  cmd_run->add_option("--seed", run.config.seed, "random seed");
  cmd_run->add_option("--init", run_init, "kmeans-concat|random")
      ->check(CLI::IsMember({"kmeans-concat", "random"}));
  cmd_run->add_option("--normalize", run_normalize,
                      "none|unit-l2-sample|zscore-feature")
      ->check(CLI::IsMember({"none", "unit-l2-sample", "zscore-feature"}));
  cmd_run->add_option("--repeats", run.repeats, "independent repeats");
  cmd_run->add_option("--threads", run.threads, "worker threads");
  cmd_run->add_option("--out", run.out, "output path prefix");

  // gen
  mvc::cli::GenSpec gen;
  std::string gen_dims;
  std::string gen_weights;
  std::string gen_view_noise;
  int gen_m = 0;
  auto* cmd_gen = app.add_subcommand("gen", "generate a planted synthetic dataset");
  cmd_gen->add_option("--n", gen.synthetic.n, "sample count")->required();
  cmd_gen->add_option("--k", gen.synthetic.k, "cluster count")->required();
  cmd_gen->add_option("--d", gen.synthetic.d, "latent dimension")->required();
  cmd_gen->add_option("--dims", gen_dims, "per-view dims, e.g. 100,80,60")
      ->required();
  cmd_gen->add_option("--m", gen_m, "view count (checked against --dims)");
  cmd_gen->add_option("--noise", gen.synthetic.noise_sigma, "noise sigma");
  cmd_gen->add_option("--view-noise", gen_view_noise,
                      "per-view sigma overrides, comma list");
  cmd_gen->add_option("--weights", gen_weights,
                      "cluster weights (simplex), comma list");
  cmd_gen->add_option("--seed", gen.synthetic.seed, "random seed");
  cmd_gen->add_option("--format", gen.format, "csv|mvm1")
      ->check(CLI::IsMember({"csv", "mvm1"}));
  cmd_gen->add_option("--out", gen.out, "output directory");

  // bench
  mvc::cli::BenchSpec bench;
  std::string bench_sizes;
  std::string bench_dims;
  auto* cmd_bench = app.add_subcommand("bench", "per-iteration runtime scaling");
  cmd_bench->add_option("--sizes", bench_sizes, "sample counts, comma list");
  cmd_bench->add_option("--iters", bench.iters, "iterations per size");
  cmd_bench->add_option("--k", bench.k, "cluster count");
  cmd_bench->add_option("--d", bench.d, "latent dimension");
  cmd_bench->add_option("--dims", bench_dims, "per-view dims, comma list");
  cmd_bench->add_option("--noise", bench.noise_sigma, "noise sigma");
  cmd_bench->add_option("--seed", bench.seed, "random seed");
  cmd_bench->add_option("--method", bench.method, "aimc|nonmf")
      ->check(CLI::IsMember({"aimc", "nonmf"}));
  cmd_bench->add_option("--out", bench.out, "output path prefix");

  // eval
  std::string eval_pred, eval_truth;
  auto* cmd_eval = app.add_subcommand("eval", "metrics between two label files");
  cmd_eval->add_option("--pred", eval_pred, "predicted labels")->required();
  cmd_eval->add_option("--truth", eval_truth, "ground-truth labels")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      run.config.init_mode = mvc::parse_init_mode(run_init);
      run.config.normalization = mvc::parse_normalization(run_normalize);
      return mvc::cli::cmd_run(run);
    }
    if (cmd_gen->parsed()) {
      gen.synthetic.view_dims = parse_dims(gen_dims);
      if (gen_m != 0 &&
          gen_m != static_cast<int>(gen.synthetic.view_dims.size()))
        throw mvc::ConfigError("--m disagrees with the --dims list length");
      if (!gen_weights.empty())
        gen.synthetic.cluster_weights = parse_reals(gen_weights);
      if (!gen_view_noise.empty())
        gen.synthetic.bad_view_sigma = parse_reals(gen_view_noise);
      return mvc::cli::cmd_gen(gen);
    }
    if (cmd_bench->parsed()) {
      if (!bench_sizes.empty()) bench.sizes = parse_dims(bench_sizes);
      if (!bench_dims.empty()) bench.view_dims = parse_dims(bench_dims);
      return mvc::cli::cmd_bench(bench);
    }
    if (cmd_eval->parsed()) return mvc::cli::cmd_eval(eval_pred, eval_truth);
  } catch (const std::exception& e) {
    nlohmann::ordered_json err = {{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 1;
}
