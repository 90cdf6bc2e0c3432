#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spmr/cluster.hpp"
#include "spmr/metrics.hpp"
#include "spmr/pathcount.hpp"

namespace spmr {

/// A named meta-path subset to score. With `random_size` set, every seed
/// draws a fresh uniformly random subset of that size instead of `indices`.
struct SubsetSpec {
  std::string name;
  std::vector<std::size_t> indices;
  std::optional<std::size_t> random_size;
};

struct SelectionScore {
  std::string name;
  std::size_t paths = 0;
  std::vector<double> accuracy;  // one entry per seed
  std::vector<double> nmi;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_nmi = 0.0;
  double std_nmi = 0.0;
  double median_accuracy = 0.0;
  double median_nmi = 0.0;
};

struct ComparisonTable {
  std::size_t k = 0;
  std::size_t n_seeds = 0;
  std::uint64_t base_seed = 0;
  std::vector<SelectionScore> rows;
};

/// Uniform random size-d subset of {0..paths-1}, ascending.
std::vector<std::size_t> random_subset(std::size_t paths, std::size_t d, std::uint64_t seed);

/// Seed of the random subset drawn for seed index `s` of a comparison.
std::uint64_t random_subset_seed(std::uint64_t base_seed, std::size_t s);

/// Clusters every (subset, seed) cell with seed base_seed + s and scores it
/// against `truth`. Cells run concurrently; results do not depend on that.
ComparisonTable compare_selections(const AffinityStack& stack, const std::vector<SubsetSpec>& subsets,
                                   const ClusterLabels& truth, std::size_t k, std::size_t n_seeds,
                                   std::uint64_t base_seed, const SpectralOptions& options = {});

double median(std::vector<double> values);

/// Labels file: TSV rows (node_id, class_id); every node 0..n-1 exactly once.
ClusterLabels load_labels(const std::filesystem::path& file, std::size_t n);
void write_labels(const ClusterLabels& labels, const std::filesystem::path& file);

}  // namespace spmr
