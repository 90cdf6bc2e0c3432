#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spmr/hin.hpp"
#include "spmr/sparse.hpp"

namespace spmr {

/// Path-instance counts between target nodes for one meta-path.
/// Entry (i, j) is the number of node sequences from i to j; diagonal zeroed.
struct CountMatrix {
  MetaPath metapath;
  CountCsr counts;
};

enum class ChainOrder {
  kLeftToRight,
  kCostBased,  // classic matrix-chain ordering on nnz estimates
};

struct CountOptions {
  ChainOrder order = ChainOrder::kLeftToRight;
  // Upper bound on stored nonzeros of any intermediate product.
  std::size_t max_nnz = std::size_t{1} << 28;
};

/// Counts instances of `path` by a sparse matrix-chain product.
/// Throws ValidationError for an invalid path and ResourceError (naming the
/// step) when an intermediate product exceeds the budget or overflows.
CountMatrix count_path_instances(const HinGraph& graph, const MetaPath& path, const CountOptions& options = {});

/// Row-wise max normalization: s_ij = c_ij / max_{k != i} c_ik, all-zero rows stay zero.
RealCsr max_normalize(const CountCsr& counts);

/// Per-meta-path normalized affinities s^(m) and their sum A.
struct AffinityStack {
  std::vector<MetaPath> paths;
  std::vector<std::string> names;
  std::vector<RealCsr> s;
  RealCsr aggregate;

  std::size_t size() const { return s.size(); }
  std::size_t nodes() const { return aggregate.rows(); }

  /// Assembles a stack from precomputed matrices (square, equal shapes,
  /// entries in [0,1]); the diagonal is dropped. Paths may be left empty.
  static AffinityStack from_matrices(std::vector<RealCsr> s, std::vector<std::string> names = {});
};

/// On-disk cache of count matrices keyed by (graph hash, path spec).
/// File layout, little-endian: magic u32 "SPCM", n u32, nnz u64, then nnz
/// triplets (i u32, j u32, v u64).
class CountCache {
 public:
  explicit CountCache(std::filesystem::path dir);

  std::filesystem::path file_for(std::uint64_t graph_hash, const std::string& path_spec) const;
  std::optional<CountCsr> load(std::uint64_t graph_hash, const std::string& path_spec) const;
  void store(std::uint64_t graph_hash, const std::string& path_spec, const CountCsr& counts) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

void write_count_matrix(const CountCsr& counts, const std::filesystem::path& file);
CountCsr read_count_matrix(const std::filesystem::path& file);

struct StackBuildStats {
  std::size_t cache_hits = 0;
  std::size_t computed = 0;
};

/// Counts every path (concurrently, one job per path), normalizes and sums.
/// Throws ArgumentError on an empty path list.
AffinityStack build_affinity_stack(const HinGraph& graph, const std::vector<MetaPath>& paths,
                                   const CountOptions& options = {}, const CountCache* cache = nullptr,
                                   StackBuildStats* stats = nullptr);

}  // namespace spmr
