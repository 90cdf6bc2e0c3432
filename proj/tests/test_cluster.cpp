#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spmr/cluster.hpp"
#include "spmr/errors.hpp"
#include "spmr/evaluation.hpp"
#include "spmr/synth.hpp"

namespace {

spmr::DenseMatrix blocks(std::size_t n, std::size_t k) {
  spmr::DenseMatrix w = spmr::DenseMatrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && i % k == j % k) w(i, j) = 1.0;
  return w;
}

struct Planted {
  spmr::AffinityStack stack;
  spmr::ClusterLabels truth;
};

Planted planted(std::size_t n, std::size_t informative, std::size_t noise, std::uint64_t seed) {
  auto ground = spmr::generate(spmr::planted_benchmark(n, 3, informative, 0, noise, seed));
  auto stack = spmr::build_affinity_stack(ground.graph, spmr::enumerate_metapaths(ground.graph, 2));
  return {std::move(stack), ground.truth};
}

std::vector<std::size_t> indices_with(const spmr::AffinityStack& stack, const std::string& needle) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < stack.size(); ++m)
    if (stack.names[m].find(needle) != std::string::npos) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("two perfect blocks separate exactly") {
  const auto labels = spmr::spectral_clustering(blocks(10, 2), 2, 1);
  const spmr::ClusterLabels truth({0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, 2);
  CHECK(spmr::accuracy(labels, truth).accuracy == 1.0);
  CHECK(spmr::nmi(labels, truth) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("k = n puts every node in its own cluster") {
  std::mt19937_64 rng(81);
  const auto stack = oracle::random_stack(rng, 6, 2);
  const auto labels = spmr::cluster_affinity(stack, std::vector<double>{1.0, 1.0}, 6, 0);
  const spmr::ClusterLabels truth({0, 1, 2, 3, 4, 5}, 6);
  CHECK(spmr::accuracy(labels, truth).accuracy == 1.0);
}

TEST_CASE("clustering input errors") {
  CHECK_THROWS_AS(spmr::spectral_clustering(spmr::DenseMatrix::Zero(5, 5), 2, 0), spmr::DegenerateInputError);
  CHECK_THROWS_AS(spmr::spectral_clustering(blocks(5, 2), 1, 0), spmr::ArgumentError);
  CHECK_THROWS_AS(spmr::spectral_clustering(blocks(5, 2), 6, 0), spmr::ArgumentError);
  CHECK_THROWS_AS(spmr::spectral_clustering(spmr::DenseMatrix::Zero(4, 5), 2, 0), spmr::ArgumentError);
}

TEST_CASE("selected affinity is the symmetrized weighted sum") {
  std::mt19937_64 rng(82);
  const auto stack = oracle::random_stack(rng, 7, 3);
  const std::vector<double> w{0.2, 0.0, 0.9};
  const auto a = oracle::weighted_affinity(stack, w);
  const auto s = spmr::selected_affinity(stack, w);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) CHECK(s(i, j) == doctest::Approx(0.5 * (a[i][j] + a[j][i])).epsilon(1e-14));
  CHECK(spmr::subset_weights(4, std::vector<std::size_t>{1, 3}) == std::vector<double>{0, 1, 0, 1});
  CHECK_THROWS_AS(spmr::subset_weights(2, std::vector<std::size_t>{2}), spmr::ArgumentError);
}

TEST_CASE("clustering is deterministic per seed") {
  const auto p = planted(45, 2, 2, 1);
  const std::vector<double> w(p.stack.size(), 1.0);
  const auto a = spmr::cluster_affinity(p.stack, w, 3, 17);
  const auto b = spmr::cluster_affinity(p.stack, w, 3, 17);
  CHECK(a.labels == b.labels);
}

TEST_CASE("planted clusters are recovered from informative paths") {
  std::vector<double> scores;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = planted(60, 3, 0, seed);
    const auto labels = spmr::cluster_affinity(p.stack, std::vector<double>(p.stack.size(), 1.0), 3, seed);
    scores.push_back(spmr::nmi(labels, p.truth));
  }
  CHECK(spmr::median(scores) >= 0.9);
}

TEST_CASE("k-means recovers separated points") {
  spmr::DenseMatrix x(9, 2);
  for (int i = 0; i < 9; ++i) {
    x(i, 0) = 10.0 * (i % 3) + 0.01 * i;
    x(i, 1) = -5.0 * (i % 3);
  }
  const auto r = spmr::kmeans(x, 3, 4, 5, 100);
  CHECK(spmr::accuracy(r.labels, spmr::ClusterLabels({0, 1, 2, 0, 1, 2, 0, 1, 2}, 3)).accuracy == 1.0);
  CHECK(r.inertia < 1.0);
}

TEST_CASE("comparison table") {
  const auto p = planted(60, 2, 2, 4);
  REQUIRE(p.stack.size() == 4);
  const std::vector<std::size_t> all{0, 1, 2, 3};

  SUBCASE("identical subsets give identical rows") {
    const auto t = spmr::compare_selections(p.stack, {{"a", all, {}}, {"b", all, {}}}, p.truth, 3, 4, 9);
    CHECK(t.rows[0].accuracy == t.rows[1].accuracy);
    CHECK(t.rows[0].nmi == t.rows[1].nmi);
  }
  SUBCASE("random subset of full size equals all paths") {
    const auto t = spmr::compare_selections(p.stack, {{"all", all, {}}, {"rs", {}, 4}}, p.truth, 3, 4, 9);
    CHECK(t.rows[0].nmi == t.rows[1].nmi);
    CHECK(t.rows[1].paths == 4);
  }
  SUBCASE("informative paths beat noise paths") {
    const auto t = spmr::compare_selections(
        p.stack, {{"info", indices_with(p.stack, "Topic"), {}}, {"noise", indices_with(p.stack, "Noise"), {}}},
        p.truth, 3, 5, 2);
    CHECK(t.rows[0].median_nmi > t.rows[1].median_nmi);
    CHECK(t.rows[0].mean_nmi > t.rows[1].mean_nmi);
  }
  SUBCASE("k differing from the number of classes still runs") {
    const auto t = spmr::compare_selections(p.stack, {{"all", all, {}}}, p.truth, 5, 2, 0);
    CHECK(t.k == 5);
    CHECK(t.rows[0].nmi.size() == 2);
  }
  SUBCASE("summary statistics") {
    const auto t = spmr::compare_selections(p.stack, {{"all", all, {}}}, p.truth, 3, 3, 0);
    const auto& r = t.rows[0];
    double mean = 0.0;
    for (double v : r.nmi) mean += v / 3.0;
    CHECK(r.mean_nmi == doctest::Approx(mean).epsilon(1e-14));
    CHECK(r.median_nmi == spmr::median(r.nmi));
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(spmr::compare_selections(p.stack, {{"e", {}, {}}}, p.truth, 3, 2, 0), spmr::ArgumentError);
    CHECK_THROWS_AS(spmr::compare_selections(p.stack, {{"x", {7}, {}}}, p.truth, 3, 2, 0), spmr::ArgumentError);
    CHECK_THROWS_AS(spmr::compare_selections(p.stack, {{"r", {}, 5}}, p.truth, 3, 2, 0), spmr::ArgumentError);
  }
}

TEST_CASE("median and random subsets") {
  CHECK(spmr::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(spmr::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = spmr::random_subset(9, 3, s);
    CHECK(r.size() == 3);
    CHECK(std::is_sorted(r.begin(), r.end()));
    CHECK(std::adjacent_find(r.begin(), r.end()) == r.end());
    CHECK(r.back() < 9);
    CHECK(r == spmr::random_subset(9, 3, s));
  }
}
