#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spmr/metrics.hpp"
#include "spmr/pathcount.hpp"
#include "spmr/transition.hpp"

namespace spmr {

struct SpectralOptions {
  std::size_t kmeans_restarts = 20;
  std::size_t kmeans_max_iters = 300;
};

struct KMeansResult {
  ClusterLabels labels;
  double inertia = 0.0;
};

/// Lloyd's k-means with k-means++ seeding; best of `restarts` runs by inertia.
/// Deterministic for a fixed seed.
KMeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iters);

/// Normalized spectral clustering of a symmetric non-negative affinity:
/// L = I - D^-1/2 W D^-1/2, the k eigenvectors of smallest eigenvalue,
/// row-normalized, then k-means. Throws DegenerateInputError when W is all
/// zero and ArgumentError unless 2 <= k <= n.
ClusterLabels spectral_clustering(const DenseMatrix& affinity, std::size_t k, std::uint64_t seed,
                                  const SpectralOptions& options = {});

/// Dense symmetrized selected affinity (S + S^T) / 2 with S = sum_m w_m s^(m).
DenseMatrix selected_affinity(const AffinityStack& stack, std::span<const double> w);

std::vector<double> subset_weights(std::size_t paths, std::span<const std::size_t> subset);

ClusterLabels cluster_affinity(const AffinityStack& stack, std::span<const double> w, std::size_t k,
                               std::uint64_t seed, const SpectralOptions& options = {});

}  // namespace spmr
