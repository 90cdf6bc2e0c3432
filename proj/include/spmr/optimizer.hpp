#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spmr/transition.hpp"

namespace spmr {

struct OptimizerConfig {
  double lambda = 0.0;
  std::size_t max_iters = 500;
  // Stop when ||proj(w - g) - w||_inf <= grad_tol.
  double grad_tol = 1e-6;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  std::size_t max_backtracks = 60;
  std::size_t memory = 10;
  double selection_threshold = 0.9;
  // Starting point; all-ones (Q = P) when unset.
  std::optional<std::vector<double>> initial_weights;
};

/// One minimize run inside the lambda search.
struct LambdaProbe {
  double lambda = 0.0;
  std::size_t selected_count = 0;
  std::vector<double> objective_trace;
};

struct SelectionResult {
  std::vector<double> weights;
  std::vector<std::size_t> selected;  // ascending indices
  std::vector<double> objective_trace;
  double kl = 0.0;
  double objective = 0.0;
  double lambda = 0.0;
  bool converged = false;
  bool stalled = false;  // line search found no decrease before convergence
  bool fallback_used = false;
  std::size_t iterations = 0;
  std::vector<LambdaProbe> probes;
};

/// Componentwise clamp to [0, 1].
std::vector<double> project_box(std::span<const double> w);

/// Indices with w_m > threshold, ascending.
std::vector<std::size_t> threshold_selection(std::span<const double> w, double threshold);

/// Minimizes KL(P||Q(w)) + lambda * sum(w) over the box [0,1]^M with a
/// projected limited-memory quasi-Newton method and Armijo backtracking along
/// the projection arc. The objective trace never increases. Throws
/// NumericalError on a non-finite objective.
SelectionResult minimize(const AffinityStack& stack, const TransitionModel& model, const OptimizerConfig& config);
SelectionResult minimize(const AffinityStack& stack, const OptimizerConfig& config);

struct LambdaSearch {
  double log10_lo = -6.0;
  double log10_hi = 3.0;
  std::size_t max_steps = 40;
};

/// Searches lambda by bisection on log10(lambda), warm-starting every run from
/// the previous solution, until exactly `d` weights exceed the selection
/// threshold. Falls back to the top-d weights of the closest run otherwise.
SelectionResult select_for_size(const AffinityStack& stack, const TransitionModel& model, std::size_t d,
                                 const OptimizerConfig& config = {}, const LambdaSearch& search = {});

/// KL of the binary selection given by `subset`.
double subset_kl(const AffinityStack& stack, const TransitionModel& model, std::span<const std::size_t> subset);

struct SubsetOptimum {
  std::vector<std::size_t> subset;
  double kl = 0.0;
  std::size_t evaluated = 0;
};

/// Exact minimizer of the KL over binary weights with exactly d ones; ties go
/// to the lexicographically smallest subset. Throws ResourceError when
/// C(M, d) exceeds `budget`.
SubsetOptimum brute_force_subset(const AffinityStack& stack, const TransitionModel& model, std::size_t d,
                                 std::uint64_t budget = 1'000'000);

}  // namespace spmr
