#include "spmr/synth.hpp"

#include <random>

#include "spmr/errors.hpp"
#include "spmr/evaluation.hpp"

namespace spmr {

namespace fs = std::filesystem;

const char* to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::kInformative:
      return "informative";
    case RelationKind::kRedundant:
      return "redundant";
    case RelationKind::kNoise:
      return "noise";
  }
  return "unknown";
}

namespace {

void validate(const SynthConfig& config) {
  if (config.n_target == 0) throw ArgumentError("synthetic network needs target nodes");
  if (config.k_clusters < 1 || config.k_clusters > config.n_target) {
    throw ArgumentError("k_clusters must be in [1, n_target]");
  }
  for (const auto& r : config.relations) {
    const bool in_ok = r.density_in >= 0.0 && r.density_in <= 1.0;
    const bool out_ok = r.density_out >= 0.0 && r.density_out <= 1.0;
    if (!in_ok || !out_ok) throw ArgumentError("relation '" + r.name + "': densities must lie in [0,1]");
    if (r.kind == RelationKind::kInformative && r.density_in < r.density_out) {
      throw ArgumentError("informative relation '" + r.name + "' needs density_in >= density_out");
    }
    if (r.kind == RelationKind::kRedundant && !(r.rewire >= 0.0 && r.rewire <= 1.0)) {
      throw ArgumentError("relation '" + r.name + "': rewire fraction must lie in [0,1]");
    }
  }
}

}  // namespace

SynthGround generate(const SynthConfig& config) {
  validate(config);
  const std::size_t k = config.k_clusters;

  std::vector<NodeType> types{{0, config.target_name}};
  std::vector<std::size_t> counts{config.n_target};
  for (const auto& aux : config.aux_types) {
    types.push_back({static_cast<TypeId>(types.size()), aux.name});
    counts.push_back(aux.count);
  }
  auto type_of = [&](const std::string& name) -> TypeId {
    for (const auto& t : types) {
      if (t.name == name) return t.id;
    }
    throw ArgumentError("unknown node type '" + name + "' in synthetic config");
  };

  std::vector<Relation> relations;
  std::map<std::string, std::size_t> index;
  for (const auto& r : config.relations) {
    index[r.name] = relations.size();
    relations.push_back({static_cast<RelationId>(relations.size()), r.name, type_of(r.source), type_of(r.target), false});
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CountCsr> adjacency(relations.size());
  std::map<std::string, RelationKind> kinds;

  for (std::size_t ri = 0; ri < relations.size(); ++ri) {
    const auto& spec = config.relations[ri];
    const auto& rel = relations[ri];
    const std::size_t rows = counts[rel.source];
    const std::size_t cols = counts[rel.target];
    std::vector<Triplet<std::uint64_t>> edges;
    kinds[spec.name] = spec.kind;

    switch (spec.kind) {
      case RelationKind::kInformative: {
        if (rows < k || cols < k) {
          throw ArgumentError("informative relation '" + spec.name + "' needs at least k nodes on each side");
        }
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            const double p = (i % k == j % k) ? spec.density_in : spec.density_out;
            if (unit(rng) < p) edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1});
          }
        }
        break;
      }
      case RelationKind::kNoise: {
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            if (unit(rng) < spec.density_in) edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1});
          }
        }
        break;
      }
      case RelationKind::kRedundant: {
        const auto it = index.find(spec.parent);
        if (it == index.end() || it->second >= ri) {
          throw ArgumentError("redundant relation '" + spec.name + "' must follow its parent '" + spec.parent + "'");
        }
        const auto& parent = adjacency[it->second];
        if (parent.rows() != rows || parent.cols() != cols) {
          throw ArgumentError("redundant relation '" + spec.name + "' must have the shape of its parent");
        }
        std::uniform_int_distribution<std::uint32_t> any_col(0, static_cast<std::uint32_t>(cols - 1));
        for (auto t : parent.triplets()) {
          if (spec.rewire > 0.0 && unit(rng) < spec.rewire) t.col = any_col(rng);
          edges.push_back(t);
        }
        break;
      }
    }
    adjacency[ri] = CountCsr::from_triplets(rows, cols, std::move(edges),
                                            [](std::uint64_t, std::uint64_t) { return std::uint64_t{1}; });
  }

  std::vector<std::uint32_t> truth(config.n_target);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = static_cast<std::uint32_t>(i % k);

  HinGraph graph(HinSchema(std::move(types), std::move(relations)), std::move(counts), std::move(adjacency), 0);
  return {std::move(graph), ClusterLabels(std::move(truth), k), std::move(kinds)};
}

void write_dataset(const SynthGround& ground, const fs::path& dir) {
  write_graph(ground.graph, dir);
  write_labels(ground.truth, dir / "labels.tsv");
}

SynthConfig planted_benchmark(std::size_t n_target, std::size_t k, std::size_t informative, std::size_t redundant,
                              std::size_t noise, std::uint64_t seed) {
  if (redundant > informative) throw ArgumentError("every redundant relation needs an informative parent");
  SynthConfig config;
  config.n_target = n_target;
  config.k_clusters = k;
  config.seed = seed;
  for (std::size_t r = 0; r < informative; ++r) {
    const std::string aux = "Topic" + std::to_string(r);
    config.aux_types.push_back({aux, 10 * k});
    config.relations.push_back({"info" + std::to_string(r), config.target_name, aux, RelationKind::kInformative,
                                0.3, 0.05, "", 0.0});
  }
  for (std::size_t r = 0; r < redundant; ++r) {
    const std::string aux = "TopicCopy" + std::to_string(r);
    config.aux_types.push_back({aux, 10 * k});
    config.relations.push_back(
        {"copy" + std::to_string(r), config.target_name, aux, RelationKind::kRedundant, 0.0, 0.0, "info" + std::to_string(r), 0.2});
  }
  for (std::size_t r = 0; r < noise; ++r) {
    const std::string aux = "Noise" + std::to_string(r);
    config.aux_types.push_back({aux, 2 * k});
    config.relations.push_back(
        {"noise" + std::to_string(r), config.target_name, aux, RelationKind::kNoise, 0.3, 0.0, "", 0.0});
  }
  return config;
}

}  // namespace spmr
