#include "spmr/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>

#include "spmr/errors.hpp"

namespace spmr {

namespace fs = std::filesystem;

std::vector<std::size_t> random_subset(std::size_t paths, std::size_t d, std::uint64_t seed) {
  if (d > paths) throw ArgumentError("random subset larger than the path set");
  std::vector<std::size_t> all(paths);
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < d; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, paths - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(d);
  std::sort(all.begin(), all.end());
  return all;
}

std::uint64_t random_subset_seed(std::uint64_t base_seed, std::size_t s) {
  return (base_seed ^ 0x9e3779b97f4a7c15ULL) + 0x632be59bd9b4e019ULL * (s + 1);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

ComparisonTable compare_selections(const AffinityStack& stack, const std::vector<SubsetSpec>& subsets,
                                   const ClusterLabels& truth, std::size_t k, std::size_t n_seeds,
                                   std::uint64_t base_seed, const SpectralOptions& options) {
  if (truth.size() != stack.nodes()) throw ArgumentError("ground truth length does not match the target node count");
  if (n_seeds == 0) throw ArgumentError("at least one clustering seed is required");
  for (const auto& spec : subsets) {
    if (spec.random_size) {
      if (*spec.random_size < 1 || *spec.random_size > stack.size()) {
        throw ArgumentError("random subset size for '" + spec.name + "' out of range");
      }
    } else {
      if (spec.indices.empty()) throw ArgumentError("subset '" + spec.name + "' is empty");
      for (auto m : spec.indices) {
        if (m >= stack.size()) throw ArgumentError("subset '" + spec.name + "' references path " + std::to_string(m));
      }
    }
  }

  const std::size_t cells = subsets.size() * n_seeds;
  std::vector<double> acc(cells, 0.0), score(cells, 0.0);
  std::vector<std::exception_ptr> errors(cells);
  const auto cells_i = static_cast<std::int64_t>(cells);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ci = 0; ci < cells_i; ++ci) {
    const auto cell = static_cast<std::size_t>(ci);
    const auto& spec = subsets[cell / n_seeds];
    const std::size_t s = cell % n_seeds;
    try {
      const auto subset =
          spec.random_size ? random_subset(stack.size(), *spec.random_size, random_subset_seed(base_seed, s)) : spec.indices;
      const auto w = subset_weights(stack.size(), subset);
      const auto labels = cluster_affinity(stack, w, k, base_seed + s, options);
      acc[cell] = accuracy(labels, truth).accuracy;
      score[cell] = nmi(labels, truth);
    } catch (...) {
      errors[cell] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ComparisonTable table{k, n_seeds, base_seed, {}};
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    SelectionScore row;
    row.name = subsets[r].name;
    row.paths = subsets[r].random_size ? *subsets[r].random_size : subsets[r].indices.size();
    row.accuracy.assign(acc.begin() + static_cast<std::ptrdiff_t>(r * n_seeds),
                        acc.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_seeds));
    row.nmi.assign(score.begin() + static_cast<std::ptrdiff_t>(r * n_seeds),
                   score.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_seeds));
    std::tie(row.mean_accuracy, row.std_accuracy) = mean_std(row.accuracy);
    std::tie(row.mean_nmi, row.std_nmi) = mean_std(row.nmi);
    row.median_accuracy = median(row.accuracy);
    row.median_nmi = median(row.nmi);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ClusterLabels load_labels(const fs::path& file, std::size_t n) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open labels file '" + file.string() + "'");
  std::vector<std::int64_t> labels(n, -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::uint64_t v[2];
    const char* p = line.data() + first;
    const char* end = line.data() + line.size();
    for (int c = 0; c < 2; ++c) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      const auto [next, ec] = std::from_chars(p, end, v[c]);
      if (ec != std::errc() || next == p) throw ParseError(file.string(), lineno, "expected node_id and class_id");
      p = next;
    }
    if (v[0] >= n) throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": node id out of range");
    if (labels[v[0]] >= 0) throw ValidationError(file.string() + ":" + std::to_string(lineno) + ": duplicate node id");
    labels[v[0]] = static_cast<std::int64_t>(v[1]);
  }
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0) throw ValidationError(file.string() + ": no label for node " + std::to_string(i));
    out[i] = static_cast<std::uint32_t>(labels[i]);
  }
  return ClusterLabels::from(std::move(out));
}

void write_labels(const ClusterLabels& labels, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels.labels[i] << '\n';
}

}  // namespace spmr
