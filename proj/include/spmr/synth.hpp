#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spmr/hin.hpp"
#include "spmr/metrics.hpp"

namespace spmr {

enum class RelationKind { kInformative, kRedundant, kNoise };

const char* to_string(RelationKind kind);

struct AuxTypeSpec {
  std::string name;
  std::size_t count = 0;
};

struct SynthRelation {
  std::string name;
  std::string source;  // type name; the target type or an auxiliary type
  std::string target;
  RelationKind kind = RelationKind::kInformative;
  // Informative: edge probability within / across clusters. Noise: density_in
  // is the uniform edge probability.
  double density_in = 0.0;
  double density_out = 0.0;
  // Redundant: relation whose edges are copied, then each edge is moved to a
  // uniformly random target endpoint with probability `rewire`.
  std::string parent;
  double rewire = 0.0;
};

/// Planted-partition network. Target node i and auxiliary node a belong to
/// clusters i mod k and a mod k.
struct SynthConfig {
  std::string target_name = "Item";
  std::size_t n_target = 0;
  std::size_t k_clusters = 2;
  std::vector<AuxTypeSpec> aux_types;
  std::vector<SynthRelation> relations;
  std::uint64_t seed = 0;
};

struct SynthGround {
  HinGraph graph;
  ClusterLabels truth;
  std::map<std::string, RelationKind> relation_kinds;
};

/// Deterministic per seed. Throws ArgumentError on an infeasible config.
SynthGround generate(const SynthConfig& config);

/// Writes schema.json, edges/<relation>.tsv and labels.tsv under `dir`.
void write_dataset(const SynthGround& ground, const std::filesystem::path& dir);

/// `informative`, `redundant` and `noise` relations from the target type to
/// private auxiliary types; relation r of each kind is named info<r>, copy<r>
/// and noise<r>, and copy<r> is redundant of info<r>.
SynthConfig planted_benchmark(std::size_t n_target, std::size_t k, std::size_t informative, std::size_t redundant,
                              std::size_t noise, std::uint64_t seed);

}  // namespace spmr
