#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spmr/pathcount.hpp"

namespace spmr {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Full-set transition probabilities: row-wise softmax of the aggregate
/// affinity over k != i, with p_ii = 0. `log_p` holds log p_ij off-diagonal.
struct TransitionModel {
  DenseMatrix p;
  DenseMatrix log_p;
  std::size_t size() const { return static_cast<std::size_t>(p.rows()); }
};

/// Throws ArgumentError when the stack has fewer than two target nodes.
TransitionModel build_transition_model(const AffinityStack& stack);

/// Transitions under the weighted affinity a_ij = sum_m w_m s^(m)_ij.
DenseMatrix transitions_for_weights(const AffinityStack& stack, std::span<const double> w);

/// sum_i sum_{j != i} p_ij log(p_ij / q_ij), with 0 log(0/q) = 0.
double kl_divergence(const DenseMatrix& p, const DenseMatrix& q);

struct Evaluation {
  double kl = 0.0;
  double objective = 0.0;  // kl + lambda * sum(w)
  std::vector<double> gradient;
};

/// KL, L1-regularized objective and its gradient
///   g_m = -sum_i sum_{j != i} (p_ij - q_ij) s^(m)_ij + lambda
/// in one pass. Rows are processed in parallel and reduced in row order, so
/// the result does not depend on the thread count.
Evaluation evaluate(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                    double lambda, bool with_gradient = true);

/// Serial, unfused reference for `evaluate` (dense Q, then plain loops).
Evaluation evaluate_reference(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                              double lambda);

double regularized_objective(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                             double lambda);

std::vector<double> gradient(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                             double lambda);

}  // namespace spmr
