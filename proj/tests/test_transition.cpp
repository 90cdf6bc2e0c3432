#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spmr/errors.hpp"
#include "spmr/transition.hpp"

namespace {

spmr::AffinityStack single_row_stack(const std::vector<double>& row0) {
  std::vector<spmr::Triplet<double>> trips;
  for (std::uint32_t j = 0; j < row0.size(); ++j) trips.push_back({0, j, row0[j]});
  return spmr::AffinityStack::from_matrices(
      {spmr::RealCsr::from_triplets(row0.size(), row0.size(), trips, [](double a, double) { return a; })});
}

double row_sum(const spmr::DenseMatrix& m, Eigen::Index i) { return m.row(i).sum(); }

}  // namespace

TEST_CASE("constant row gives a uniform transition row") {
  const auto model = spmr::build_transition_model(single_row_stack({0.0, 0.4, 0.4, 0.4}));
  CHECK(model.p(0, 0) == 0.0);
  for (int j = 1; j < 4; ++j) CHECK(model.p(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("worked softmax row") {
  // Node 0 has affinity 1 to node 1 and 0 to nodes 2 and 3.
  const auto model = spmr::build_transition_model(single_row_stack({0.0, 1.0, 0.0, 0.0}));
  const double z = std::exp(1.0) + 2.0;
  CHECK(model.p(0, 1) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-15));
  CHECK(model.p(0, 2) == doctest::Approx(1.0 / z).epsilon(1e-15));
  CHECK(model.p(0, 3) == doctest::Approx(1.0 / z).epsilon(1e-15));
}

TEST_CASE("fewer than two nodes is rejected") {
  CHECK_THROWS_AS(spmr::build_transition_model(single_row_stack({0.0})), spmr::ArgumentError);
}

TEST_CASE("P matches an unshifted softmax") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto stack = oracle::random_stack(rng, 8, 3);
    const auto model = spmr::build_transition_model(stack);
    const auto p = oracle::naive_softmax(oracle::weighted_affinity(stack, {1.0, 1.0, 1.0}));
    for (int i = 0; i < 8; ++i) {
      CHECK(model.p(i, i) == 0.0);
      CHECK(row_sum(model.p, i) == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j < 8; ++j) {
        CHECK(std::abs(model.p(i, j) - p[i][j]) < 1e-12);
        if (i != j) CHECK(model.p(i, j) > 0.0);
      }
    }
  }
}

TEST_CASE("row shift leaves P unchanged") {
  std::mt19937_64 rng(42);
  const auto stack = oracle::random_stack(rng, 7, 2);
  auto a = oracle::weighted_affinity(stack, {1.0, 1.0});
  const auto p = oracle::naive_softmax(a);
  // Shift every off-diagonal entry of row 3 by a constant.
  for (std::size_t j = 0; j < 7; ++j) a[3][j] += 0.75;
  std::vector<spmr::Triplet<double>> trips;
  for (std::uint32_t i = 0; i < 7; ++i)
    for (std::uint32_t j = 0; j < 7; ++j)
      if (i != j) trips.push_back({i, j, a[i][j] / 2.5});
  const auto shifted = spmr::AffinityStack::from_matrices(
      {spmr::RealCsr::from_triplets(7, 7, trips, [](double x, double) { return x; }),
       spmr::RealCsr::from_triplets(7, 7, trips, [](double x, double) { return x; })});
  const auto q = spmr::transitions_for_weights(shifted, std::vector<double>{1.25, 1.25});
  for (std::size_t j = 0; j < 7; ++j) CHECK(std::abs(q(3, j) - p[3][j]) < 1e-12);
}

TEST_CASE("transitions for special weight vectors") {
  std::mt19937_64 rng(43);
  const auto stack = oracle::random_stack(rng, 6, 4);
  const auto model = spmr::build_transition_model(stack);

  SUBCASE("all ones reproduces P exactly") {
    const auto q = spmr::transitions_for_weights(stack, std::vector<double>(4, 1.0));
    CHECK(q == model.p);
  }
  SUBCASE("all zeros is uniform") {
    const auto q = spmr::transitions_for_weights(stack, std::vector<double>(4, 0.0));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) CHECK(q(i, j) == doctest::Approx(i == j ? 0.0 : 0.2).epsilon(1e-15));
  }
  SUBCASE("one-hot equals the single-path model") {
    const auto q = spmr::transitions_for_weights(stack, std::vector<double>{0, 0, 1, 0});
    const auto single = spmr::build_transition_model(spmr::AffinityStack::from_matrices({stack.s[2]}));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) CHECK(std::abs(q(i, j) - single.p(i, j)) < 1e-15);
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(spmr::transitions_for_weights(stack, std::vector<double>(3, 1.0)), spmr::ArgumentError);
  }
}

TEST_CASE("KL divergence") {
  std::mt19937_64 rng(44);
  const auto stack = oracle::random_stack(rng, 7, 3);
  const auto model = spmr::build_transition_model(stack);
  CHECK(spmr::kl_divergence(model.p, model.p) == 0.0);
  CHECK_THROWS_AS(spmr::kl_divergence(model.p, spmr::DenseMatrix::Zero(3, 3)), spmr::ArgumentError);

  for (int t = 0; t < 20; ++t) {
    const auto w = oracle::random_weights(rng, 3);
    const auto q = spmr::transitions_for_weights(stack, w);
    const auto p_ref = oracle::naive_softmax(oracle::weighted_affinity(stack, {1, 1, 1}));
    const auto q_ref = oracle::naive_softmax(oracle::weighted_affinity(stack, w));
    const double expected = oracle::kl_term_by_term(p_ref, q_ref);
    CHECK(spmr::kl_divergence(model.p, q) == doctest::Approx(expected).epsilon(1e-10));
    const auto e = spmr::evaluate(stack, model, w, 0.3);
    CHECK(e.kl == doctest::Approx(expected).epsilon(1e-10));
    CHECK(e.kl >= 0.0);
    CHECK(e.objective == doctest::Approx(expected + 0.3 * (w[0] + w[1] + w[2])).epsilon(1e-10));
  }
}

TEST_CASE("objective and gradient at all ones") {
  std::mt19937_64 rng(45);
  const auto stack = oracle::random_stack(rng, 6, 5);
  const auto model = spmr::build_transition_model(stack);
  const std::vector<double> ones(5, 1.0);
  for (double lambda : {0.0, 0.1, 2.0}) {
    const auto e = spmr::evaluate(stack, model, ones, lambda);
    CHECK(e.kl == 0.0);
    CHECK(e.objective == doctest::Approx(lambda * 5.0).epsilon(1e-15));
    for (double g : e.gradient) CHECK(g == doctest::Approx(lambda).epsilon(1e-15));
  }
  for (double g : spmr::gradient(stack, model, ones, 0.0)) CHECK(g == 0.0);
}

TEST_CASE("gradient matches central differences on a 6-node, 4-path instance") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 10; ++t) {
    const auto stack = oracle::random_stack(rng, 6, 4);
    const auto model = spmr::build_transition_model(stack);
    const auto w = oracle::random_weights(rng, 4);
    for (double lambda : {0.0, 0.1, 1.0}) {
      const auto g = spmr::gradient(stack, model, w, lambda);
      const auto fd = oracle::central_differences(
          [&](const std::vector<double>& x) { return spmr::regularized_objective(stack, model, x, lambda); }, w,
          1e-5);
      for (std::size_t m = 0; m < 4; ++m) CHECK(oracle::relative_error(g[m], fd[m]) < 1e-5);
    }
  }
}

TEST_CASE("fused and reference evaluation agree") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 20; ++t) {
    const auto stack = oracle::random_stack(rng, 9, 5, 0.4);
    const auto model = spmr::build_transition_model(stack);
    const auto w = oracle::random_weights(rng, 5);
    const auto a = spmr::evaluate(stack, model, w, 0.2);
    const auto b = spmr::evaluate_reference(stack, model, w, 0.2);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
    for (std::size_t m = 0; m < 5; ++m) CHECK(a.gradient[m] == doctest::Approx(b.gradient[m]).epsilon(1e-10));
  }
}

TEST_CASE("rows of Q are stochastic across the box") {
  std::mt19937_64 rng(48);
  for (int t = 0; t < 30; ++t) {
    const auto stack = oracle::random_stack(rng, 10, 4);
    const auto q = spmr::transitions_for_weights(stack, oracle::random_weights(rng, 4));
    for (int i = 0; i < 10; ++i) {
      CHECK(std::abs(row_sum(q, i) - 1.0) < 1e-9);
      CHECK(q(i, i) == 0.0);
    }
  }
}
