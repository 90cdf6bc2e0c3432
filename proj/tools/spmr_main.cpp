// spmr: meta-path reduction command-line front end.
//
//   spmr synth     --out data --seed 7
//   spmr enumerate --schema data/schema.json --max-length 4 --out run
//   spmr count     --schema data/schema.json --out run
//   spmr reduce    --schema data/schema.json --d 3 --out run
//   spmr eval      --schema data/schema.json --out run
//   spmr pipeline  --config run.toml
//
// Exit codes: 0 success, 2 input/config error, 3 numerical failure.

#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "spmr/errors.hpp"
#include "spmr/pipeline.hpp"

int main(int argc, char** argv) {
  spmr::RunConfig config;
  std::string schema, edges, labels, metapaths, selection, out = "out";
  std::size_t d = 0;
  double lambda = 0.0;
  int threads = 0;

  CLI::App app{"Unsupervised meta-path reduction for heterogeneous information networks"};
  app.set_config("--config", "", "TOML-style config file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--schema", schema, "Schema JSON file");
  app.add_option("--edges", edges, "Directory of <relation>.tsv edge files (default: <schema dir>/edges)");
  app.add_option("--labels", labels, "Ground-truth labels TSV (default: <schema dir>/labels.tsv)");
  app.add_option("--metapaths", metapaths, "Meta-path file to use instead of enumeration");
  app.add_option("--selection", selection, "Selection report for eval (default: <out>/selection.json)");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--seed", config.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("--no-cache", config.no_cache, "Recount instead of using <out>/cache");
  app.add_option("--max-length", config.max_length, "Longest enumerated meta-path")->capture_default_str();
  app.add_flag("--prune-backtracking", config.prune_backtracking, "Skip R followed by R^-1 away from the target type");
  auto* d_opt = app.add_option("--d", d, "Number of meta-paths to keep");
  auto* lambda_opt = app.add_option("--lambda", lambda, "L1 strength (instead of --d)");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--k", config.k, "Clusters for eval (default: number of classes)");
  app.add_option("--eval-seeds", config.eval_seeds, "Clustering seeds per subset")->capture_default_str();
  app.add_option("--max-iters", config.optimizer.max_iters, "Optimizer iteration cap")->capture_default_str();
  app.add_option("--grad-tol", config.optimizer.grad_tol, "Projected-gradient tolerance")->capture_default_str();
  app.add_option("--threshold", config.optimizer.selection_threshold, "Weight above which a path counts as selected")
      ->capture_default_str();
  app.add_option("--max-nnz", config.max_nnz, "Nonzero budget for intermediate count products")->capture_default_str();
  app.add_option("--synth-nodes", config.synth_nodes, "synth: target nodes")->capture_default_str();
  app.add_option("--synth-clusters", config.synth_clusters, "synth: planted clusters")->capture_default_str();
  app.add_option("--synth-informative", config.synth_informative, "synth: informative relations")->capture_default_str();
  app.add_option("--synth-redundant", config.synth_redundant, "synth: redundant relations")->capture_default_str();
  app.add_option("--synth-noise", config.synth_noise, "synth: noise relations")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write a planted-partition synthetic network");
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate meta-paths from and to the target type");
  auto* count = app.add_subcommand("count", "Count path instances and build the affinity stack");
  auto* reduce = app.add_subcommand("reduce", "Select meta-paths by KL-preserving reduction");
  auto* eval = app.add_subcommand("eval", "Score a selection by clustering against ground truth");
  auto* pipeline = app.add_subcommand("pipeline", "enumerate, count, reduce and eval in sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  config.schema = schema;
  if (!edges.empty()) config.edges_dir = edges;
  if (!labels.empty()) config.labels = labels;
  if (!metapaths.empty()) config.metapaths = metapaths;
  if (!selection.empty()) config.selection = selection;
  config.out = out;
  if (d_opt->count() > 0) config.d = d;
  if (lambda_opt->count() > 0) config.lambda = lambda;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (synth->parsed()) spmr::cmd_synth(config, std::cerr);
    if (enumerate->parsed()) spmr::cmd_enumerate(config, std::cerr);
    if (count->parsed()) spmr::cmd_count(config, std::cerr);
    if (reduce->parsed()) spmr::cmd_reduce(config, std::cerr);
    if (eval->parsed()) spmr::cmd_eval(config, std::cout);
    if (pipeline->parsed()) spmr::cmd_pipeline(config, std::cerr);
  } catch (const spmr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
