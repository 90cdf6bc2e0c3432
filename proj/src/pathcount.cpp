#include "spmr/pathcount.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>

#include "spmr/errors.hpp"

namespace spmr {

namespace fs = std::filesystem;

namespace {

struct ChainPlan {
  // split[i][j] = k means (i..k)(k+1..j).
  std::vector<std::vector<std::size_t>> split;
};

// Matrix-chain ordering on estimated flops, assuming uniformly scattered
// nonzeros to predict the density of intermediate products.
ChainPlan plan_chain(const std::vector<CountCsr>& mats) {
  const std::size_t l = mats.size();
  struct Est {
    double rows, cols, nnz;
  };
  std::vector<std::vector<Est>> est(l, std::vector<Est>(l));
  std::vector<std::vector<double>> cost(l, std::vector<double>(l, 0.0));
  ChainPlan plan{std::vector<std::vector<std::size_t>>(l, std::vector<std::size_t>(l, 0))};
  for (std::size_t i = 0; i < l; ++i) {
    est[i][i] = {double(mats[i].rows()), double(mats[i].cols()), double(mats[i].nnz())};
  }
  for (std::size_t len = 2; len <= l; ++len) {
    for (std::size_t i = 0; i + len - 1 < l; ++i) {
      const std::size_t j = i + len - 1;
      cost[i][j] = std::numeric_limits<double>::infinity();
      for (std::size_t k = i; k < j; ++k) {
        const Est& a = est[i][k];
        const Est& b = est[k + 1][j];
        const double inner = std::max(a.cols, 1.0);
        const double flops = a.nnz * b.nnz / inner;
        const double c = cost[i][k] + cost[k + 1][j] + flops;
        if (c < cost[i][j]) {
          cost[i][j] = c;
          plan.split[i][j] = k;
          const double cells = a.rows * b.cols;
          const double da = a.nnz / std::max(a.rows * inner, 1.0);
          const double db = b.nnz / std::max(inner * b.cols, 1.0);
          const double fill = 1.0 - std::pow(1.0 - std::min(da * db, 1.0), inner);
          est[i][j] = {a.rows, b.cols, cells * fill};
        }
      }
    }
  }
  return plan;
}

std::string step_label(const HinSchema& schema, const MetaPath& path, std::size_t i) {
  const auto& s = path.steps[i];
  return "step " + std::to_string(i) + " (" + schema.relation(s.relation).name + (s.inverse ? "^-1" : "") + ")";
}

CountCsr multiply_step(const CountCsr& a, const CountCsr& b, std::size_t max_nnz, const std::string& where) {
  try {
    return multiply(a, b, max_nnz);
  } catch (const ResourceError& e) {
    throw ResourceError(where + ": " + e.what());
  }
}

CountCsr evaluate_plan(const std::vector<CountCsr>& mats, const ChainPlan& plan, std::size_t i, std::size_t j,
                       const HinSchema& schema, const MetaPath& path, std::size_t max_nnz) {
  if (i == j) return mats[i];
  const std::size_t k = plan.split[i][j];
  const CountCsr left = evaluate_plan(mats, plan, i, k, schema, path, max_nnz);
  const CountCsr right = evaluate_plan(mats, plan, k + 1, j, schema, path, max_nnz);
  return multiply_step(left, right, max_nnz,
                       "steps " + std::to_string(i) + ".." + std::to_string(j) + " at " + step_label(schema, path, k + 1));
}

}  // namespace

CountMatrix count_path_instances(const HinGraph& graph, const MetaPath& path, const CountOptions& options) {
  if (const auto violation = validate_metapath(graph, path)) {
    throw ValidationError("invalid meta-path '" + spec_string(graph.schema(), path) + "': " + *violation);
  }
  std::vector<CountCsr> mats;
  mats.reserve(path.length());
  for (const auto& s : path.steps) mats.push_back(graph.step_matrix(s));

  CountCsr product;
  if (options.order == ChainOrder::kCostBased && mats.size() > 2) {
    product = evaluate_plan(mats, plan_chain(mats), 0, mats.size() - 1, graph.schema(), path, options.max_nnz);
  } else {
    product = mats.front();
    for (std::size_t k = 1; k < mats.size(); ++k) {
      product = multiply_step(product, mats[k], options.max_nnz, step_label(graph.schema(), path, k));
    }
  }
  return {path, product.without_diagonal()};
}

RealCsr max_normalize(const CountCsr& counts) {
  std::vector<std::size_t> row_ptr(counts.rows() + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(counts.nnz());
  vals.reserve(counts.nnz());
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    const auto rc = counts.row_cols(i);
    const auto rv = counts.row_values(i);
    std::uint64_t row_max = 0;
    for (std::size_t p = 0; p < rc.size(); ++p) {
      if (rc[p] != i) row_max = std::max(row_max, rv[p]);
    }
    if (row_max > 0) {
      const double denom = static_cast<double>(row_max);
      for (std::size_t p = 0; p < rc.size(); ++p) {
        if (rc[p] == i) continue;
        cols.push_back(rc[p]);
        vals.push_back(rv[p] == row_max ? 1.0 : static_cast<double>(rv[p]) / denom);
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  return RealCsr(counts.rows(), counts.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

AffinityStack AffinityStack::from_matrices(std::vector<RealCsr> s, std::vector<std::string> names) {
  if (s.empty()) throw ArgumentError("affinity stack needs at least one meta-path");
  const std::size_t n = s.front().rows();
  for (auto& m : s) {
    if (m.rows() != n || m.cols() != n) throw ArgumentError("affinity matrices must all be square with equal size");
    m = m.without_diagonal();
  }
  if (names.empty()) {
    for (std::size_t m = 0; m < s.size(); ++m) names.push_back("path" + std::to_string(m));
  }
  if (names.size() != s.size()) throw ArgumentError("one name per affinity matrix required");

  // Sum in meta-path order so the aggregate is reproducible bit for bit.
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  std::vector<double> acc(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (const auto& m : s) {
      const auto rc = m.row_cols(i);
      const auto rv = m.row_values(i);
      for (std::size_t p = 0; p < rc.size(); ++p) {
        if (!seen[rc[p]]) {
          seen[rc[p]] = 1;
          touched.push_back(rc[p]);
        }
        acc[rc[p]] += rv[p];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto j : touched) {
      if (acc[j] != 0.0) {
        cols.push_back(j);
        vals.push_back(acc[j]);
      }
      acc[j] = 0.0;
      seen[j] = 0;
    }
    row_ptr[i + 1] = cols.size();
  }

  AffinityStack stack;
  stack.s = std::move(s);
  stack.names = std::move(names);
  stack.aggregate = RealCsr(n, n, std::move(row_ptr), std::move(cols), std::move(vals));
  return stack;
}

namespace {

constexpr std::uint32_t kCacheMagic = 0x4D435053;  // "SPCM"

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  char b[8];
  for (int i = 0; i < bytes; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, bytes);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char b[8] = {};
  in.read(reinterpret_cast<char*>(b), bytes);
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_count_matrix(const CountCsr& counts, const fs::path& file) {
  if (counts.rows() != counts.cols() || counts.rows() > std::numeric_limits<std::uint32_t>::max()) {
    throw ArgumentError("count matrix must be square with at most 2^32-1 rows");
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write count cache file '" + file.string() + "'");
  put_le(out, kCacheMagic, 4);
  put_le(out, counts.rows(), 4);
  put_le(out, counts.nnz(), 8);
  for (const auto& t : counts.triplets()) {
    put_le(out, t.row, 4);
    put_le(out, t.col, 4);
    put_le(out, t.value, 8);
  }
  if (!out) throw ConfigError("failed writing count cache file '" + file.string() + "'");
}

CountCsr read_count_matrix(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open count cache file '" + file.string() + "'");
  if (get_le(in, 4) != kCacheMagic) throw ParseError(file.string(), 0, "bad count cache magic");
  const std::size_t n = get_le(in, 4);
  const std::size_t nnz = get_le(in, 8);
  if (!in) throw ParseError(file.string(), 0, "truncated count cache header");
  std::vector<Triplet<std::uint64_t>> trips;
  trips.reserve(nnz);
  for (std::size_t t = 0; t < nnz; ++t) {
    const auto i = static_cast<std::uint32_t>(get_le(in, 4));
    const auto j = static_cast<std::uint32_t>(get_le(in, 4));
    const auto v = get_le(in, 8);
    if (!in) throw ParseError(file.string(), 0, "truncated count cache body");
    if (i >= n || j >= n) throw ParseError(file.string(), 0, "count cache entry out of range");
    trips.push_back({i, j, v});
  }
  return CountCsr::from_triplets(n, n, std::move(trips), [](std::uint64_t a, std::uint64_t b) { return a + b; });
}

CountCache::CountCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path CountCache::file_for(std::uint64_t graph_hash, const std::string& path_spec) const {
  return dir_ / (hex64(graph_hash) + "-" + hex64(fnv1a(path_spec)) + ".bin");
}

std::optional<CountCsr> CountCache::load(std::uint64_t graph_hash, const std::string& path_spec) const {
  const auto file = file_for(graph_hash, path_spec);
  if (!fs::exists(file)) return std::nullopt;
  return read_count_matrix(file);
}

void CountCache::store(std::uint64_t graph_hash, const std::string& path_spec, const CountCsr& counts) const {
  fs::create_directories(dir_);
  const auto file = file_for(graph_hash, path_spec);
  auto tmp = file;
  tmp += ".tmp";
  write_count_matrix(counts, tmp);
  fs::rename(tmp, file);
}

AffinityStack build_affinity_stack(const HinGraph& graph, const std::vector<MetaPath>& paths,
                                   const CountOptions& options, const CountCache* cache, StackBuildStats* stats) {
  if (paths.empty()) throw ArgumentError("at least one meta-path is required");
  for (std::size_t m = 0; m < paths.size(); ++m) {
    if (const auto violation = validate_metapath(graph, paths[m])) {
      throw ValidationError("meta-path " + std::to_string(m) + " '" + spec_string(graph.schema(), paths[m]) +
                            "': " + *violation);
    }
  }
  const std::uint64_t hash = cache ? graph.content_hash() : 0;
  const auto count = static_cast<std::int64_t>(paths.size());
  std::vector<RealCsr> s(paths.size());
  std::vector<char> hit(paths.size(), 0);
  std::vector<std::exception_ptr> errors(paths.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t mi = 0; mi < count; ++mi) {
    const auto m = static_cast<std::size_t>(mi);
    try {
      const std::string spec = spec_string(graph.schema(), paths[m]);
      std::optional<CountCsr> counts;
      if (cache) counts = cache->load(hash, spec);
      if (counts) {
        hit[m] = 1;
      } else {
        counts = count_path_instances(graph, paths[m], options).counts;
        if (cache) cache->store(hash, spec, *counts);
      }
      s[m] = max_normalize(*counts);
    } catch (...) {
      errors[m] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (stats) {
    stats->cache_hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    stats->computed = paths.size() - stats->cache_hits;
  }
  std::vector<std::string> names;
  for (const auto& p : paths) names.push_back(display_name(graph.schema(), p));
  auto stack = AffinityStack::from_matrices(std::move(s), std::move(names));
  stack.paths = paths;
  return stack;
}

}  // namespace spmr
