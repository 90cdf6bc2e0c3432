#include "spmr/pipeline.hpp"

#include <map>

#include "spmr/errors.hpp"
#include "spmr/report.hpp"

namespace spmr {

namespace fs = std::filesystem;
using json = nlohmann::json;

fs::path edges_dir_of(const RunConfig& config) {
  return config.edges_dir ? *config.edges_dir : config.schema.parent_path() / "edges";
}

fs::path labels_of(const RunConfig& config) {
  return config.labels ? *config.labels : config.schema.parent_path() / "labels.tsv";
}

HinGraph load_run_graph(const RunConfig& config) {
  if (config.schema.empty()) throw ConfigError("no schema file given (--schema)");
  const auto schema = load_schema(config.schema);
  return load_graph(config.schema, edge_files_in(schema.schema, edges_dir_of(config)));
}

std::vector<MetaPath> run_metapaths(const RunConfig& config, const HinGraph& graph) {
  if (config.metapaths) {
    auto paths = load_metapaths(graph.schema(), *config.metapaths);
    if (paths.empty()) throw ConfigError("meta-path file '" + config.metapaths->string() + "' lists no paths");
    return paths;
  }
  return enumerate_metapaths(graph, config.max_length, {config.prune_backtracking});
}

AffinityStack run_stack(const RunConfig& config, const HinGraph& graph, const std::vector<MetaPath>& paths,
                        std::ostream& log) {
  CountOptions options;
  options.max_nnz = config.max_nnz;
  std::optional<CountCache> cache;
  if (!config.no_cache) cache.emplace(config.out / "cache");
  StackBuildStats stats;
  auto stack = build_affinity_stack(graph, paths, options, cache ? &*cache : nullptr, &stats);
  if (cache) {
    log << "count cache " << cache->dir().string() << ": " << stats.cache_hits << " reused, " << stats.computed
        << " computed\n";
  } else {
    log << "count cache disabled: " << stats.computed << " computed\n";
  }
  return stack;
}

namespace {

std::vector<std::string> specs_of(const HinSchema& schema, const std::vector<MetaPath>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(spec_string(schema, p));
  return out;
}

}  // namespace

SynthGround cmd_synth(const RunConfig& config, std::ostream& log) {
  auto ground = generate(planted_benchmark(config.synth_nodes, config.synth_clusters, config.synth_informative,
                                           config.synth_redundant, config.synth_noise, config.seed));
  write_dataset(ground, config.out);
  log << "wrote synthetic network (" << config.synth_nodes << " target nodes, " << config.synth_clusters
      << " clusters, " << ground.graph.schema().relations().size() << " relations) to " << config.out.string() << '\n';
  return ground;
}

std::vector<MetaPath> cmd_enumerate(const RunConfig& config, std::ostream& log) {
  const auto graph = load_run_graph(config);
  const auto paths = enumerate_metapaths(graph, config.max_length, {config.prune_backtracking});
  fs::create_directories(config.out);
  write_metapaths(graph.schema(), paths, config.out / "metapaths.txt");
  std::map<std::size_t, std::size_t> per_length;
  for (const auto& p : paths) ++per_length[p.length()];
  for (const auto& [len, n] : per_length) log << "length " << len << ": " << n << " meta-paths\n";
  log << "total: " << paths.size() << " meta-paths -> " << (config.out / "metapaths.txt").string() << '\n';
  return paths;
}

AffinityStack cmd_count(const RunConfig& config, std::ostream& log) {
  const auto graph = load_run_graph(config);
  const auto paths = run_metapaths(config, graph);
  fs::create_directories(config.out);
  auto stack = run_stack(config, graph, paths, log);
  json rows = json::array();
  for (std::size_t m = 0; m < stack.size(); ++m) {
    rows.push_back({{"metapath", stack.names[m]},
                    {"spec", spec_string(graph.schema(), paths[m])},
                    {"nnz", stack.s[m].nnz()}});
  }
  write_json({{"target_nodes", stack.nodes()}, {"paths", rows}, {"aggregate_nnz", stack.aggregate.nnz()}},
             config.out / "counts.json");
  return stack;
}

SelectionResult cmd_reduce(const RunConfig& config, std::ostream& log) {
  if (config.d.has_value() == config.lambda.has_value()) {
    throw ConfigError("reduce needs exactly one of --d and --lambda");
  }
  const auto graph = load_run_graph(config);
  const auto paths = run_metapaths(config, graph);
  fs::create_directories(config.out);
  const auto stack = run_stack(config, graph, paths, log);
  const auto model = build_transition_model(stack);

  SelectionResult result;
  if (config.d) {
    result = select_for_size(stack, model, *config.d, config.optimizer);
  } else {
    OptimizerConfig opt = config.optimizer;
    opt.lambda = *config.lambda;
    result = minimize(stack, model, opt);
  }
  const auto specs = specs_of(graph.schema(), paths);
  write_json(selection_to_json(result, stack.names, specs), config.out / "selection.json");
  const std::string listing = ranked_listing(result, stack.names, specs);
  write_text(listing, config.out / "ranked.txt");
  log << "selected " << result.selected.size() << " of " << stack.size() << " meta-paths at lambda "
      << report_number(result.lambda) << (result.fallback_used ? " (top-D fallback)" : "") << ", KL "
      << report_number(result.kl) << '\n'
      << listing;
  return result;
}

ComparisonTable cmd_eval(const RunConfig& config, std::ostream& log) {
  const auto graph = load_run_graph(config);
  const fs::path selection_file = config.selection ? *config.selection : config.out / "selection.json";
  const auto selection = selection_from_json(read_json(selection_file));
  const fs::path labels_file = labels_of(config);
  if (!fs::exists(labels_file)) throw ConfigError("labels file not found: '" + labels_file.string() + "'");
  const auto truth = load_labels(labels_file, graph.target_count());

  std::vector<MetaPath> paths;
  for (const auto& s : selection.specs) paths.push_back(parse_metapath(graph.schema(), s));
  const auto stack = run_stack(config, graph, paths, log);
  if (selection.selected.empty()) throw ConfigError("selection report selects no meta-paths");

  const std::size_t d = selection.selected.size();
  std::vector<std::size_t> all(stack.size());
  for (std::size_t m = 0; m < all.size(); ++m) all[m] = m;
  const std::vector<SubsetSpec> subsets{
      {"SPMR", selection.selected, std::nullopt},
      {"All paths", all, std::nullopt},
      {"RS", {}, d},
  };
  const std::size_t k = config.k ? *config.k : truth.k;
  const auto table = compare_selections(stack, subsets, truth, k, config.eval_seeds, config.seed);
  fs::create_directories(config.out);
  write_json(comparison_to_json(table), config.out / "eval.json");
  const std::string text = format_comparison(table);
  write_text(text, config.out / "eval.txt");
  log << text;
  return table;
}

void cmd_pipeline(const RunConfig& config, std::ostream& log) {
  if (config.d.has_value() == config.lambda.has_value()) {
    throw ConfigError("pipeline needs exactly one of --d and --lambda");
  }
  cmd_enumerate(config, log);
  RunConfig next = config;
  if (!next.metapaths) next.metapaths = config.out / "metapaths.txt";
  cmd_count(next, log);
  cmd_reduce(next, log);
  cmd_eval(next, log);
}

}  // namespace spmr
