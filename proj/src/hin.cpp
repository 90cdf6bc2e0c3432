#include "spmr/hin.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "spmr/errors.hpp"

namespace spmr {

namespace fs = std::filesystem;
using json = nlohmann::json;

HinSchema::HinSchema(std::vector<NodeType> node_types, std::vector<Relation> relations)
    : node_types_(std::move(node_types)), relations_(std::move(relations)) {
  std::set<std::string> type_names;
  for (std::size_t i = 0; i < node_types_.size(); ++i) {
    if (node_types_[i].id != i) {
      throw ValidationError("node type ids must be dense and zero-based; got id " +
                            std::to_string(node_types_[i].id) + " at position " + std::to_string(i));
    }
    if (!type_names.insert(node_types_[i].name).second) {
      throw ValidationError("duplicate node type name '" + node_types_[i].name + "'");
    }
  }
  std::set<std::string> rel_names;
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& r = relations_[i];
    if (r.id != i) {
      throw ValidationError("relation ids must be dense and zero-based; got id " + std::to_string(r.id) +
                            " at position " + std::to_string(i));
    }
    if (r.source >= node_types_.size() || r.target >= node_types_.size()) {
      throw ValidationError("relation '" + r.name + "' references an unknown node type");
    }
    if (r.symmetric && r.source != r.target) {
      throw ValidationError("symmetric relation '" + r.name + "' must link a type to itself");
    }
    if (r.name.empty() || r.name.find('.') != std::string::npos || r.name.find('^') != std::string::npos) {
      throw ValidationError("relation name '" + r.name + "' must be non-empty and contain no '.' or '^'");
    }
    if (!rel_names.insert(r.name).second) {
      throw ValidationError("duplicate relation name '" + r.name + "'");
    }
  }
}

std::optional<TypeId> HinSchema::find_type(std::string_view name) const {
  for (const auto& t : node_types_) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

std::optional<RelationId> HinSchema::find_relation(std::string_view name) const {
  for (const auto& r : relations_) {
    if (r.name == name) return r.id;
  }
  return std::nullopt;
}

TypeId step_source(const HinSchema& schema, Step step) {
  const auto& r = schema.relation(step.relation);
  return step.inverse ? r.target : r.source;
}

TypeId step_target(const HinSchema& schema, Step step) {
  const auto& r = schema.relation(step.relation);
  return step.inverse ? r.source : r.target;
}

std::string display_name(const HinSchema& schema, const MetaPath& path) {
  if (path.steps.empty()) return {};
  std::string out = schema.type(step_source(schema, path.steps.front())).name;
  for (const auto& s : path.steps) {
    out += '-';
    out += schema.type(step_target(schema, s)).name;
  }
  return out;
}

std::string spec_string(const HinSchema& schema, const MetaPath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (i > 0) out += '.';
    out += schema.relation(path.steps[i].relation).name;
    if (path.steps[i].inverse) out += "^-1";
  }
  return out;
}

MetaPath parse_metapath(const HinSchema& schema, std::string_view text) {
  MetaPath path;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t dot = std::min(text.find('.', start), text.size());
    std::string_view token = text.substr(start, dot - start);
    Step step;
    constexpr std::string_view kInverse = "^-1";
    if (token.size() > kInverse.size() && token.substr(token.size() - kInverse.size()) == kInverse) {
      step.inverse = true;
      token.remove_suffix(kInverse.size());
    }
    const auto rel = schema.find_relation(token);
    if (!rel) throw ValidationError("unknown relation '" + std::string(token) + "' in meta-path '" + std::string(text) + "'");
    step.relation = *rel;
    path.steps.push_back(step);
    start = dot + 1;
  }
  return path;
}

namespace {

CountCsr symmetrize(const CountCsr& m) {
  auto trips = m.triplets();
  const auto t = m.transpose().triplets();
  trips.insert(trips.end(), t.begin(), t.end());
  return CountCsr::from_triplets(m.rows(), m.cols(), std::move(trips),
                                 [](std::uint64_t, std::uint64_t) { return std::uint64_t{1}; });
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

std::string read_file(const fs::path& file, const char* what) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

HinGraph::HinGraph(HinSchema schema, std::vector<std::size_t> node_counts, std::vector<CountCsr> adjacency,
                   TypeId target_type)
    : schema_(std::move(schema)),
      node_counts_(std::move(node_counts)),
      adjacency_(std::move(adjacency)),
      target_type_(target_type) {
  if (node_counts_.size() != schema_.node_types().size()) {
    throw ValidationError("node count list does not match the number of node types");
  }
  if (target_type_ >= node_counts_.size()) throw ValidationError("target type does not exist in schema");
  if (adjacency_.size() != schema_.relations().size()) {
    throw ValidationError("adjacency list does not match the number of relations");
  }
  for (const auto& r : schema_.relations()) {
    auto& m = adjacency_[r.id];
    if (m.rows() != node_counts_[r.source] || m.cols() != node_counts_[r.target]) {
      throw ValidationError("adjacency of relation '" + r.name + "' has wrong dimensions");
    }
    if (std::any_of(m.values().begin(), m.values().end(), [](std::uint64_t v) { return v != 1; })) {
      throw ValidationError("adjacency of relation '" + r.name + "' must be 0/1");
    }
    if (r.symmetric) m = symmetrize(m);
  }
}

CountCsr HinGraph::step_matrix(Step step) const {
  const auto& m = adjacency_.at(step.relation);
  return step.inverse ? m.transpose() : m;
}

std::uint64_t HinGraph::content_hash() const {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    mix_bytes(b, 8);
  };
  auto mix_str = [&](const std::string& s) {
    mix_u64(s.size());
    mix_bytes(s.data(), s.size());
  };
  for (const auto& t : schema_.node_types()) {
    mix_str(t.name);
    mix_u64(node_counts_[t.id]);
  }
  mix_u64(target_type_);
  for (const auto& r : schema_.relations()) {
    mix_str(r.name);
    mix_u64(r.source);
    mix_u64(r.target);
    mix_u64(r.symmetric ? 1 : 0);
    const auto& m = adjacency_[r.id];
    for (auto p : m.row_ptr()) mix_u64(p);
    for (auto c : m.col_idx()) mix_u64(c);
  }
  return h;
}

SchemaFile load_schema(const fs::path& schema_file) {
  if (!fs::exists(schema_file)) throw ConfigError("schema file not found: '" + schema_file.string() + "'");
  const std::string text = read_file(schema_file, "schema file");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(schema_file.string(), line_of_byte(text, e.byte), e.what());
  }
  try {
    std::vector<NodeType> types;
    std::vector<std::size_t> counts;
    for (const auto& t : doc.at("node_types")) {
      types.push_back({t.at("id").get<TypeId>(), t.at("name").get<std::string>()});
      const auto count = t.at("count").get<std::int64_t>();
      if (count < 0) throw ValidationError("node type '" + types.back().name + "' has a negative count");
      counts.push_back(static_cast<std::size_t>(count));
    }
    // Ids may be listed in any order; they must still be dense.
    std::vector<std::size_t> order(types.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return types[a].id < types[b].id; });
    std::vector<NodeType> sorted_types;
    std::vector<std::size_t> sorted_counts;
    for (auto i : order) {
      sorted_types.push_back(types[i]);
      sorted_counts.push_back(counts[i]);
    }

    auto type_ref = [&](const json& v) -> TypeId {
      if (v.is_string()) {
        for (const auto& t : sorted_types) {
          if (t.name == v.get<std::string>()) return t.id;
        }
        throw ValidationError("unknown node type '" + v.get<std::string>() + "'");
      }
      return v.get<TypeId>();
    };

    std::vector<Relation> relations;
    for (const auto& r : doc.at("relations")) {
      Relation rel;
      rel.id = r.at("id").get<RelationId>();
      rel.name = r.at("name").get<std::string>();
      rel.source = type_ref(r.at("source"));
      rel.target = type_ref(r.at("target"));
      rel.symmetric = r.value("symmetric", false);
      relations.push_back(std::move(rel));
    }
    std::sort(relations.begin(), relations.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    const TypeId target = type_ref(doc.at("target_type"));
    SchemaFile out{HinSchema(std::move(sorted_types), std::move(relations)), std::move(sorted_counts), target};
    if (out.target_type >= out.node_counts.size()) throw ValidationError("target_type does not exist in schema");
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(schema_file.string() + ": " + e.what());
  }
}

CountCsr load_edges(const fs::path& edge_file, std::size_t source_count, std::size_t target_count) {
  std::ifstream in(edge_file);
  if (!in) throw ConfigError("cannot open edge file '" + edge_file.string() + "'");
  std::vector<Triplet<std::uint64_t>> trips;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::uint64_t ids[2];
    const char* p = line.data() + first;
    const char* end = line.data() + line.size();
    for (int c = 0; c < 2; ++c) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      const auto [next, ec] = std::from_chars(p, end, ids[c]);
      if (ec != std::errc() || next == p) {
        throw ParseError(edge_file.string(), lineno, "expected two non-negative integer columns");
      }
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) throw ParseError(edge_file.string(), lineno, "unexpected trailing content");
    if (ids[0] >= source_count || ids[1] >= target_count) {
      throw ValidationError(edge_file.string() + ":" + std::to_string(lineno) + ": node id out of range (" +
                            std::to_string(ids[0]) + ", " + std::to_string(ids[1]) + ") for shape " +
                            std::to_string(source_count) + "x" + std::to_string(target_count));
    }
    trips.push_back({static_cast<std::uint32_t>(ids[0]), static_cast<std::uint32_t>(ids[1]), 1});
  }
  return CountCsr::from_triplets(source_count, target_count, std::move(trips),
                                 [](std::uint64_t, std::uint64_t) { return std::uint64_t{1}; });
}

HinGraph load_graph(const fs::path& schema_file, const std::map<std::string, fs::path>& edge_files) {
  auto sf = load_schema(schema_file);
  std::vector<CountCsr> adjacency;
  for (const auto& r : sf.schema.relations()) {
    const auto it = edge_files.find(r.name);
    if (it == edge_files.end()) throw ConfigError("no edge file given for relation '" + r.name + "'");
    if (!fs::exists(it->second)) {
      throw ConfigError("edge file for relation '" + r.name + "' not found: '" + it->second.string() + "'");
    }
    adjacency.push_back(load_edges(it->second, sf.node_counts[r.source], sf.node_counts[r.target]));
  }
  return HinGraph(std::move(sf.schema), std::move(sf.node_counts), std::move(adjacency), sf.target_type);
}

std::map<std::string, fs::path> edge_files_in(const HinSchema& schema, const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& r : schema.relations()) out[r.name] = dir / (r.name + ".tsv");
  return out;
}

void write_schema(const HinGraph& graph, const fs::path& schema_file) {
  json doc;
  doc["node_types"] = json::array();
  for (const auto& t : graph.schema().node_types()) {
    doc["node_types"].push_back({{"id", t.id}, {"name", t.name}, {"count", graph.node_count(t.id)}});
  }
  doc["relations"] = json::array();
  for (const auto& r : graph.schema().relations()) {
    json rel = {{"id", r.id}, {"name", r.name}, {"source", r.source}, {"target", r.target}};
    if (r.symmetric) rel["symmetric"] = true;
    doc["relations"].push_back(rel);
  }
  doc["target_type"] = graph.target_type();
  std::ofstream out(schema_file);
  if (!out) throw ConfigError("cannot write '" + schema_file.string() + "'");
  out << doc.dump(2) << '\n';
}

void write_edges(const CountCsr& adjacency, const fs::path& edge_file) {
  std::ofstream out(edge_file);
  if (!out) throw ConfigError("cannot write '" + edge_file.string() + "'");
  for (std::size_t i = 0; i < adjacency.rows(); ++i) {
    for (auto j : adjacency.row_cols(i)) out << i << '\t' << j << '\n';
  }
}

void write_graph(const HinGraph& graph, const fs::path& dir) {
  fs::create_directories(dir / "edges");
  write_schema(graph, dir / "schema.json");
  for (const auto& r : graph.schema().relations()) {
    write_edges(graph.adjacency(r.id), dir / "edges" / (r.name + ".tsv"));
  }
}

namespace {

std::vector<Step> ordered_steps(const HinSchema& schema) {
  std::vector<Step> steps;
  for (const auto& r : schema.relations()) {
    steps.push_back({r.id, false});
    if (!r.symmetric) steps.push_back({r.id, true});
  }
  // By name, so the order does not depend on relation declaration order.
  std::sort(steps.begin(), steps.end(), [&](const Step& a, const Step& b) {
    const auto& na = schema.relation(a.relation).name;
    const auto& nb = schema.relation(b.relation).name;
    return na != nb ? na < nb : a.inverse < b.inverse;
  });
  return steps;
}

void extend(const HinSchema& schema, const std::vector<Step>& steps, TypeId target, std::size_t max_length,
            const EnumerateOptions& options, MetaPath& current, std::vector<MetaPath>& out) {
  const TypeId at = current.steps.empty() ? target : step_target(schema, current.steps.back());
  if (current.length() >= 2 && at == target) out.push_back(current);
  if (current.length() == max_length) return;
  for (const auto& s : steps) {
    if (step_source(schema, s) != at) continue;
    if (options.prune_backtracking && !current.steps.empty()) {
      const Step prev = current.steps.back();
      const bool backtrack = prev.relation == s.relation && prev.inverse != s.inverse;
      if (backtrack && step_source(schema, prev) != target) continue;
    }
    current.steps.push_back(s);
    extend(schema, steps, target, max_length, options, current, out);
    current.steps.pop_back();
  }
}

}  // namespace

std::vector<MetaPath> enumerate_metapaths(const HinGraph& graph, std::size_t max_length, EnumerateOptions options) {
  if (max_length < 2) throw ArgumentError("max_length must be at least 2, got " + std::to_string(max_length));
  const auto steps = ordered_steps(graph.schema());
  std::vector<MetaPath> out;
  MetaPath current;
  extend(graph.schema(), steps, graph.target_type(), max_length, options, current, out);
  return out;
}

std::optional<std::string> validate_metapath(const HinGraph& graph, const MetaPath& path) {
  const auto& schema = graph.schema();
  if (path.steps.empty()) return "meta-path has no steps";
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (path.steps[i].relation >= schema.relations().size()) {
      return "step " + std::to_string(i) + " references unknown relation id " +
             std::to_string(path.steps[i].relation);
    }
  }
  const TypeId first = step_source(schema, path.steps.front());
  if (first != graph.target_type()) {
    return "step 0 starts at type '" + schema.type(first).name + "', not the target type '" +
           schema.type(graph.target_type()).name + "'";
  }
  for (std::size_t i = 1; i < path.steps.size(); ++i) {
    const TypeId prev = step_target(schema, path.steps[i - 1]);
    const TypeId next = step_source(schema, path.steps[i]);
    if (prev != next) {
      return "step " + std::to_string(i) + " starts at type '" + schema.type(next).name + "' but step " +
             std::to_string(i - 1) + " ends at type '" + schema.type(prev).name + "'";
    }
  }
  if (step_target(schema, path.steps.back()) != graph.target_type()) {
    return "step " + std::to_string(path.steps.size() - 1) + ": meta-path does not return to target type";
  }
  return std::nullopt;
}

std::vector<MetaPath> load_metapaths(const HinSchema& schema, const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open meta-path file '" + file.string() + "'");
  std::vector<MetaPath> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    try {
      out.push_back(parse_metapath(schema, std::string_view(line).substr(first, last - first + 1)));
    } catch (const ValidationError& e) {
      throw ParseError(file.string(), lineno, e.what());
    }
  }
  return out;
}

void write_metapaths(const HinSchema& schema, const std::vector<MetaPath>& paths, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  for (const auto& p : paths) out << spec_string(schema, p) << '\n';
}

}  // namespace spmr
