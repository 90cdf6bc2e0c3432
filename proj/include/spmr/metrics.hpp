#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spmr {

/// Hard cluster assignment; every label is < k.
struct ClusterLabels {
  std::vector<std::uint32_t> labels;
  std::size_t k = 0;

  ClusterLabels() = default;
  ClusterLabels(std::vector<std::uint32_t> labels, std::size_t k);
  /// k = 1 + max label.
  static ClusterLabels from(std::vector<std::uint32_t> labels);
  std::size_t size() const { return labels.size(); }
};

/// rows: predicted cluster, cols: true class.
using Contingency = std::vector<std::vector<std::size_t>>;

Contingency contingency(const ClusterLabels& pred, const ClusterLabels& truth);

/// Maximum-weight perfect assignment on a (padded) square matrix via the
/// Kuhn-Munkres algorithm. Returns assignment[row] = column.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight);

struct AccuracyResult {
  double accuracy = 0.0;
  // mapping[cluster] = class; clusters mapped to padding columns get a class id >= truth.k.
  std::vector<std::size_t> mapping;
  Contingency confusion;
};

/// Fraction of nodes whose class equals map(cluster) under the optimal
/// one-to-one cluster->class mapping. Throws ArgumentError on length mismatch.
AccuracyResult accuracy(const ClusterLabels& pred, const ClusterLabels& truth);

/// MI(C, C') / max(H(C), H(C')) with natural logs. When either entropy is
/// zero: 1 if both partitions are the same single cluster, else 0.
double nmi(const ClusterLabels& pred, const ClusterLabels& truth);

}  // namespace spmr
