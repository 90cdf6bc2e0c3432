#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "spmr/evaluation.hpp"
#include "spmr/hin.hpp"
#include "spmr/optimizer.hpp"
#include "spmr/pathcount.hpp"
#include "spmr/synth.hpp"

namespace spmr {

/// Everything a CLI run needs. Relative defaults: edges in
/// `<schema dir>/edges`, labels in `<schema dir>/labels.tsv`.
struct RunConfig {
  std::filesystem::path schema;
  std::optional<std::filesystem::path> edges_dir;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> metapaths;  // explicit list instead of enumeration
  std::optional<std::filesystem::path> selection;  // defaults to <out>/selection.json
  std::size_t max_length = 4;
  bool prune_backtracking = false;

  std::optional<std::size_t> d;
  std::optional<double> lambda;
  OptimizerConfig optimizer;

  std::optional<std::size_t> k;  // defaults to the number of ground-truth classes
  std::size_t eval_seeds = 5;

  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  bool no_cache = false;
  std::size_t max_nnz = std::size_t{1} << 28;

  // synth subcommand
  std::size_t synth_nodes = 120;
  std::size_t synth_clusters = 3;
  std::size_t synth_informative = 3;
  std::size_t synth_redundant = 3;
  std::size_t synth_noise = 3;
};

std::filesystem::path edges_dir_of(const RunConfig& config);
std::filesystem::path labels_of(const RunConfig& config);

HinGraph load_run_graph(const RunConfig& config);

/// Meta-paths from `config.metapaths` when set, otherwise enumerated.
std::vector<MetaPath> run_metapaths(const RunConfig& config, const HinGraph& graph);

/// Counts (through `<out>/cache` unless no_cache) and builds the stack.
AffinityStack run_stack(const RunConfig& config, const HinGraph& graph, const std::vector<MetaPath>& paths,
                        std::ostream& log);

/// Writes a planted synthetic dataset to `<out>`.
SynthGround cmd_synth(const RunConfig& config, std::ostream& log);

/// Writes `<out>/metapaths.txt`; logs the count per length.
std::vector<MetaPath> cmd_enumerate(const RunConfig& config, std::ostream& log);

/// Writes `<out>/counts.json` with per-path nonzero statistics.
AffinityStack cmd_count(const RunConfig& config, std::ostream& log);

/// Runs select_for_size (d set) or minimize (lambda set); writes
/// `<out>/selection.json` and `<out>/ranked.txt`.
SelectionResult cmd_reduce(const RunConfig& config, std::ostream& log);

/// Compares the stored selection against all paths and random subsets of the
/// same size; writes `<out>/eval.json` and `<out>/eval.txt`.
ComparisonTable cmd_eval(const RunConfig& config, std::ostream& log);

/// enumerate -> count -> reduce -> eval.
void cmd_pipeline(const RunConfig& config, std::ostream& log);

}  // namespace spmr
