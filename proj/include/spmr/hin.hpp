#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spmr/sparse.hpp"

namespace spmr {

using TypeId = std::uint32_t;
using RelationId = std::uint32_t;

struct NodeType {
  TypeId id = 0;
  std::string name;
};

struct Relation {
  RelationId id = 0;
  std::string name;
  TypeId source = 0;
  TypeId target = 0;
  // A symmetric relation links a type to itself and equals its own inverse;
  // its adjacency is symmetrized on construction.
  bool symmetric = false;
};

/// Typed node sets and typed relations. Every relation R is also usable as
/// R^-1 (target -> source); inverses are never stored separately.
class HinSchema {
 public:
  HinSchema() = default;
  HinSchema(std::vector<NodeType> node_types, std::vector<Relation> relations);

  const std::vector<NodeType>& node_types() const { return node_types_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const NodeType& type(TypeId id) const { return node_types_.at(id); }
  const Relation& relation(RelationId id) const { return relations_.at(id); }

  std::optional<TypeId> find_type(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

 private:
  std::vector<NodeType> node_types_;
  std::vector<Relation> relations_;
};

/// One hop of a meta-path: a relation, traversed forward or inverted.
struct Step {
  RelationId relation = 0;
  bool inverse = false;
  auto operator<=>(const Step&) const = default;
};

struct MetaPath {
  std::vector<Step> steps;
  std::size_t length() const { return steps.size(); }
  auto operator<=>(const MetaPath&) const = default;
};

TypeId step_source(const HinSchema& schema, Step step);
TypeId step_target(const HinSchema& schema, Step step);

/// Node-type sequence, e.g. "Blog-User-User-Blog".
std::string display_name(const HinSchema& schema, const MetaPath& path);
/// Relation-name form used by meta-path files, e.g. "written_by.friend.written_by^-1".
std::string spec_string(const HinSchema& schema, const MetaPath& path);
/// Parses `spec_string` output. Throws ValidationError on unknown relation names.
MetaPath parse_metapath(const HinSchema& schema, std::string_view text);

/// Immutable heterogeneous network: per-type node counts and one 0/1
/// sparse matrix (n_source x n_target) per relation.
class HinGraph {
 public:
  HinGraph(HinSchema schema, std::vector<std::size_t> node_counts, std::vector<CountCsr> adjacency,
           TypeId target_type);

  const HinSchema& schema() const { return schema_; }
  std::size_t node_count(TypeId t) const { return node_counts_.at(t); }
  const std::vector<std::size_t>& node_counts() const { return node_counts_; }
  const CountCsr& adjacency(RelationId r) const { return adjacency_.at(r); }
  TypeId target_type() const { return target_type_; }
  std::size_t target_count() const { return node_counts_[target_type_]; }

  /// Matrix for one step; inverse steps are transposed on demand.
  CountCsr step_matrix(Step step) const;

  /// Stable 64-bit content hash of schema, counts and edges (count-cache key).
  std::uint64_t content_hash() const;

 private:
  HinSchema schema_;
  std::vector<std::size_t> node_counts_;
  std::vector<CountCsr> adjacency_;
  TypeId target_type_;
};

/// Parsed schema file: schema, node counts and target type.
struct SchemaFile {
  HinSchema schema;
  std::vector<std::size_t> node_counts;
  TypeId target_type = 0;
};

SchemaFile load_schema(const std::filesystem::path& schema_file);

/// Reads a two-column TSV edge list into a 0/1 matrix; duplicate rows collapse.
CountCsr load_edges(const std::filesystem::path& edge_file, std::size_t source_count,
                    std::size_t target_count);

HinGraph load_graph(const std::filesystem::path& schema_file,
                    const std::map<std::string, std::filesystem::path>& edge_files);

/// Maps every relation to `<dir>/<relation name>.tsv`.
std::map<std::string, std::filesystem::path> edge_files_in(const HinSchema& schema,
                                                           const std::filesystem::path& dir);

void write_schema(const HinGraph& graph, const std::filesystem::path& schema_file);
void write_edges(const CountCsr& adjacency, const std::filesystem::path& edge_file);
/// Writes `schema.json` and `edges/<relation>.tsv` under `dir`.
void write_graph(const HinGraph& graph, const std::filesystem::path& dir);

struct EnumerateOptions {
  // Forbid R followed by R^-1 unless that pair is a full excursion from the
  // target type (T -> X -> T), which keeps paths such as P-A-P.
  bool prune_backtracking = false;
};

/// All type-compatible step sequences of length 2..max_length from the
/// target type back to it, in lexicographic order over (relation name, inverse).
std::vector<MetaPath> enumerate_metapaths(const HinGraph& graph, std::size_t max_length,
                                          EnumerateOptions options = {});

/// Empty when valid, otherwise a description naming the offending step.
std::optional<std::string> validate_metapath(const HinGraph& graph, const MetaPath& path);

std::vector<MetaPath> load_metapaths(const HinSchema& schema, const std::filesystem::path& file);
void write_metapaths(const HinSchema& schema, const std::vector<MetaPath>& paths,
                     const std::filesystem::path& file);

}  // namespace spmr
