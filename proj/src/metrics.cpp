#include "spmr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spmr/errors.hpp"

namespace spmr {

ClusterLabels::ClusterLabels(std::vector<std::uint32_t> l, std::size_t k_) : labels(std::move(l)), k(k_) {
  if (k == 0) throw ArgumentError("cluster count must be at least 1");
  for (auto v : labels) {
    if (v >= k) throw ArgumentError("label " + std::to_string(v) + " is not below k = " + std::to_string(k));
  }
}

ClusterLabels ClusterLabels::from(std::vector<std::uint32_t> l) {
  std::size_t k = 1;
  for (auto v : l) k = std::max<std::size_t>(k, std::size_t{v} + 1);
  return ClusterLabels(std::move(l), k);
}

namespace {

void check_lengths(const ClusterLabels& a, const ClusterLabels& b) {
  if (a.size() != b.size()) {
    throw ArgumentError("label vectors differ in length: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
}

}  // namespace

Contingency contingency(const ClusterLabels& pred, const ClusterLabels& truth) {
  check_lengths(pred, truth);
  Contingency table(pred.k, std::vector<std::size_t>(truth.k, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++table[pred.labels[i]][truth.labels[i]];
  return table;
}

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t n = weight.size();
  if (n == 0) return {};
  double top = 0.0;
  for (const auto& row : weight) {
    if (row.size() != n) throw ArgumentError("assignment matrix must be square");
    for (double v : row) top = std::max(top, v);
  }
  // Shortest augmenting path with potentials on cost = top - weight (1-based).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = (top - weight[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

AccuracyResult accuracy(const ClusterLabels& pred, const ClusterLabels& truth) {
  check_lengths(pred, truth);
  AccuracyResult out;
  out.confusion = contingency(pred, truth);
  if (pred.size() == 0) return out;
  const std::size_t dim = std::max(pred.k, truth.k);
  std::vector<std::vector<double>> weight(dim, std::vector<double>(dim, 0.0));
  for (std::size_t c = 0; c < pred.k; ++c) {
    for (std::size_t t = 0; t < truth.k; ++t) weight[c][t] = static_cast<double>(out.confusion[c][t]);
  }
  const auto assignment = max_weight_assignment(weight);
  std::size_t matched = 0;
  out.mapping.assign(pred.k, 0);
  for (std::size_t c = 0; c < pred.k; ++c) {
    out.mapping[c] = assignment[c];
    if (assignment[c] < truth.k) matched += out.confusion[c][assignment[c]];
  }
  out.accuracy = static_cast<double>(matched) / static_cast<double>(pred.size());
  return out;
}

double nmi(const ClusterLabels& pred, const ClusterLabels& truth) {
  const auto table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  if (pred.size() == 0) return 0.0;
  std::vector<double> row_sum(pred.k, 0.0), col_sum(truth.k, 0.0);
  for (std::size_t c = 0; c < pred.k; ++c) {
    for (std::size_t t = 0; t < truth.k; ++t) {
      row_sum[c] += static_cast<double>(table[c][t]);
      col_sum[t] += static_cast<double>(table[c][t]);
    }
  }
  auto entropy = [n](const std::vector<double>& sums) {
    double h = 0.0;
    for (double s : sums) {
      if (s > 0.0) h -= (s / n) * std::log(s / n);
    }
    return h;
  };
  const double h_pred = entropy(row_sum);
  const double h_truth = entropy(col_sum);
  if (h_pred <= 0.0 || h_truth <= 0.0) {
    return (h_pred <= 0.0 && h_truth <= 0.0) ? 1.0 : 0.0;
  }
  double mi = 0.0;
  for (std::size_t c = 0; c < pred.k; ++c) {
    for (std::size_t t = 0; t < truth.k; ++t) {
      if (table[c][t] == 0) continue;
      const double joint = static_cast<double>(table[c][t]) / n;
      mi += joint * std::log(joint / ((row_sum[c] / n) * (col_sum[t] / n)));
    }
  }
  return std::clamp(mi / std::max(h_pred, h_truth), 0.0, 1.0);
}

}  // namespace spmr
