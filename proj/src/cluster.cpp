#include "spmr/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "spmr/errors.hpp"

namespace spmr {

namespace {

double squared_distance(const DenseMatrix& a, Eigen::Index i, const DenseMatrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

DenseMatrix plus_plus_init(const DenseMatrix& x, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  DenseMatrix centers(static_cast<Eigen::Index>(k), x.cols());
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index next = pick(rng);
  for (std::size_t c = 0; c < k; ++c) {
    centers.row(static_cast<Eigen::Index>(c)) = x.row(next);
    chosen[static_cast<std::size_t>(next)] = 1;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      nearest[ii] = std::min(nearest[ii], squared_distance(x, i, centers, static_cast<Eigen::Index>(c)));
      total += nearest[ii];
    }
    if (c + 1 == k) break;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      next = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest[static_cast<std::size_t>(i)];
        if (target <= 0.0 && nearest[static_cast<std::size_t>(i)] > 0.0) {
          next = i;
          break;
        }
      }
    } else {
      // All points coincide with a center: take the first unchosen point.
      next = 0;
      while (next < n - 1 && chosen[static_cast<std::size_t>(next)]) ++next;
    }
  }
  return centers;
}

KMeansResult lloyd(const DenseMatrix& x, std::size_t k, std::mt19937_64& rng, std::size_t max_iters) {
  const Eigen::Index n = x.rows();
  DenseMatrix centers = plus_plus_init(x, k, rng);
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(n), std::numeric_limits<std::uint32_t>::max());
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(x, i, centers, static_cast<Eigen::Index>(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      const auto ii = static_cast<std::size_t>(i);
      dist[ii] = best_d;
      if (labels[ii] != best) {
        labels[ii] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    DenseMatrix sums = DenseMatrix::Zero(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++sizes[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      if (sizes[c] > 0) {
        centers.row(ci) = sums.row(ci) / static_cast<double>(sizes[c]);
        continue;
      }
      // Empty cluster: move its center to the point farthest from its own.
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      centers.row(ci) = x.row(static_cast<Eigen::Index>(far));
      dist[far] = 0.0;
    }
  }

  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    inertia += squared_distance(x, i, centers, labels[static_cast<std::size_t>(i)]);
  }
  return {ClusterLabels(std::move(labels), k), inertia};
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                    std::size_t max_iters) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || k > n) throw ArgumentError("k-means needs 1 <= k <= n");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    KMeansResult run = lloyd(points, k, rng, max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

ClusterLabels spectral_clustering(const DenseMatrix& affinity, std::size_t k, std::uint64_t seed,
                                  const SpectralOptions& options) {
  const auto n = static_cast<std::size_t>(affinity.rows());
  if (affinity.cols() != affinity.rows()) throw ArgumentError("affinity must be square");
  if (k < 2 || k > n) {
    throw ArgumentError("spectral clustering needs 2 <= k <= n (k = " + std::to_string(k) + ", n = " +
                        std::to_string(n) + ")");
  }
  if (affinity.isZero(0.0)) {
    throw DegenerateInputError("selected affinity is all zero; choose a different meta-path subset");
  }
  if (k == n) {
    std::vector<std::uint32_t> own(n);
    std::iota(own.begin(), own.end(), 0u);
    return ClusterLabels(std::move(own), k);
  }

  Eigen::VectorXd inv_sqrt_degree(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < affinity.rows(); ++i) {
    const double d = affinity.row(i).sum();
    inv_sqrt_degree(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Eigen::MatrixXd laplacian = -(inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal());
  laplacian.diagonal().array() += 1.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw DegenerateInputError("eigen decomposition of the Laplacian failed");

  // Eigenvalues come back ascending; order ties by index for reproducibility.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return solver.eigenvalues()(a) < solver.eigenvalues()(b);
  });

  DenseMatrix embedding(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < k; ++c) embedding.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(order[c]);
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return kmeans(embedding, k, seed, options.kmeans_restarts, options.kmeans_max_iters).labels;
}

DenseMatrix selected_affinity(const AffinityStack& stack, std::span<const double> w) {
  if (w.size() != stack.size()) throw ArgumentError("weight vector length does not match the stack");
  const auto n = static_cast<Eigen::Index>(stack.nodes());
  DenseMatrix s = DenseMatrix::Zero(n, n);
  for (std::size_t m = 0; m < stack.size(); ++m) {
    if (w[m] == 0.0) continue;
    for (const auto& t : stack.s[m].triplets()) s(t.row, t.col) += w[m] * t.value;
  }
  DenseMatrix sym = 0.5 * (s + s.transpose());
  return sym;
}

std::vector<double> subset_weights(std::size_t paths, std::span<const std::size_t> subset) {
  std::vector<double> w(paths, 0.0);
  for (auto m : subset) {
    if (m >= paths) throw ArgumentError("subset index " + std::to_string(m) + " out of range");
    w[m] = 1.0;
  }
  return w;
}

ClusterLabels cluster_affinity(const AffinityStack& stack, std::span<const double> w, std::size_t k,
                               std::uint64_t seed, const SpectralOptions& options) {
  return spectral_clustering(selected_affinity(stack, w), k, seed, options);
}

}  // namespace spmr
