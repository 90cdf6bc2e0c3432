#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spmr/errors.hpp"
#include "spmr/metrics.hpp"

using spmr::ClusterLabels;

namespace {

std::vector<std::uint32_t> random_labels(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k - 1));
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = pick(rng);
  return v;
}

std::vector<std::uint32_t> relabel(const std::vector<std::uint32_t>& v, const std::vector<std::uint32_t>& perm) {
  std::vector<std::uint32_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = perm[v[i]];
  return out;
}

}  // namespace

TEST_CASE("accuracy worked cases") {
  const std::vector<std::uint32_t> truth{0, 0, 1, 1, 2, 2, 3, 3};
  CHECK(spmr::accuracy(ClusterLabels(relabel(truth, {2, 0, 3, 1}), 4), ClusterLabels(truth, 4)).accuracy == 1.0);
  CHECK(spmr::accuracy(ClusterLabels(std::vector<std::uint32_t>(8, 0), 1), ClusterLabels(truth, 4)).accuracy ==
        0.25);
}

TEST_CASE("accuracy equals the best label permutation") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 30; ++t) {
    const auto pred = random_labels(rng, 30, 4);
    const auto truth = random_labels(rng, 30, 4);
    const auto r = spmr::accuracy(ClusterLabels(pred, 4), ClusterLabels(truth, 4));
    CHECK(r.accuracy == doctest::Approx(oracle::permutation_accuracy(pred, truth, 4)).epsilon(1e-15));
  }
}

TEST_CASE("accuracy with unequal cluster counts") {
  std::mt19937_64 rng(72);
  for (int t = 0; t < 20; ++t) {
    const auto pred = random_labels(rng, 25, 5);
    const auto truth = random_labels(rng, 25, 3);
    const auto r = spmr::accuracy(ClusterLabels(pred, 5), ClusterLabels(truth, 3));
    // Padding truth to 5 classes never matches, so the permutation oracle applies.
    CHECK(r.accuracy == doctest::Approx(oracle::permutation_accuracy(pred, truth, 5)).epsilon(1e-15));
    CHECK(r.mapping.size() == 5);
  }
}

TEST_CASE("NMI worked cases") {
  const std::vector<std::uint32_t> truth{0, 0, 1, 1, 2, 2};
  CHECK(spmr::nmi(ClusterLabels(relabel(truth, {1, 2, 0}), 3), ClusterLabels(truth, 3)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spmr::nmi(ClusterLabels(std::vector<std::uint32_t>(6, 0), 1), ClusterLabels(truth, 3)) == 0.0);
  CHECK(spmr::nmi(ClusterLabels(std::vector<std::uint32_t>(6, 0), 1),
                  ClusterLabels(std::vector<std::uint32_t>(6, 0), 1)) == 1.0);
}

TEST_CASE("NMI equals the direct contingency formula") {
  std::mt19937_64 rng(73);
  for (int t = 0; t < 30; ++t) {
    const auto a = random_labels(rng, 40, 3 + t % 3);
    const auto b = random_labels(rng, 40, 2 + t % 4);
    const double got = spmr::nmi(ClusterLabels::from(a), ClusterLabels::from(b));
    CHECK(std::abs(got - oracle::direct_nmi(a, b)) < 1e-12);
  }
}

TEST_CASE("metrics are permutation invariant and bounded") {
  std::mt19937_64 rng(74);
  for (int t = 0; t < 30; ++t) {
    const auto pred = random_labels(rng, 20, 4);
    const auto truth = random_labels(rng, 20, 4);
    std::vector<std::uint32_t> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    const ClusterLabels p(pred, 4), q(relabel(pred, perm), 4), tr(truth, 4), tq(relabel(truth, perm), 4);
    const double acc = spmr::accuracy(p, tr).accuracy;
    const double n = spmr::nmi(p, tr);
    CHECK(spmr::accuracy(q, tr).accuracy == acc);
    CHECK(spmr::accuracy(p, tq).accuracy == acc);
    CHECK(spmr::nmi(q, tr) == doctest::Approx(n).epsilon(1e-12));
    CHECK(spmr::nmi(p, tq) == doctest::Approx(n).epsilon(1e-12));
    CHECK(acc >= 1.0 / 20.0);
    CHECK(acc <= 1.0);
    CHECK(n >= 0.0);
    CHECK(n <= 1.0);
  }
}

TEST_CASE("length mismatch and bad labels") {
  const ClusterLabels a({0, 1, 0}, 2), b({0, 1}, 2);
  CHECK_THROWS_AS(spmr::accuracy(a, b), spmr::ArgumentError);
  CHECK_THROWS_AS(spmr::nmi(a, b), spmr::ArgumentError);
  CHECK_THROWS_AS(ClusterLabels({0, 3}, 2), spmr::ArgumentError);
}

TEST_CASE("Hungarian assignment matches brute force") {
  std::mt19937_64 rng(75);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 5;
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (auto& row : w)
      for (auto& x : row) x = u(rng);
    const auto a = spmr::max_weight_assignment(w);
    double got = 0.0;
    for (std::size_t i = 0; i < n; ++i) got += w[i][a[i]];
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += w[i][perm[i]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}
