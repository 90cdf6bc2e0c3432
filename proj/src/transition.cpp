#include "spmr/transition.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spmr/errors.hpp"

namespace spmr {

namespace {

void check_weights(const AffinityStack& stack, std::span<const double> w) {
  if (w.size() != stack.size()) {
    throw ArgumentError("weight vector has length " + std::to_string(w.size()) + ", stack has " +
                        std::to_string(stack.size()) + " meta-paths");
  }
}

void check_nodes(std::size_t n) {
  if (n < 2) throw ArgumentError("transition model needs at least 2 target nodes, got " + std::to_string(n));
}

// Dense affinity row: a_j = sum_m w_m s^(m)_ij, accumulated in meta-path order.
void weighted_row(const AffinityStack& stack, std::span<const double> w, std::size_t i, std::vector<double>& row) {
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t m = 0; m < stack.size(); ++m) {
    const auto rc = stack.s[m].row_cols(i);
    const auto rv = stack.s[m].row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) row[rc[p]] += w[m] * rv[p];
  }
}

void dense_row(const RealCsr& a, std::size_t i, std::vector<double>& row) {
  std::fill(row.begin(), row.end(), 0.0);
  const auto rc = a.row_cols(i);
  const auto rv = a.row_values(i);
  for (std::size_t p = 0; p < rc.size(); ++p) row[rc[p]] = rv[p];
}

// Log of the softmax normalizer over j != i, shifted by the row max.
double log_normalizer(const std::vector<double>& row, std::size_t i) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j != i) shift = std::max(shift, row[j]);
  }
  double z = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j != i) z += std::exp(row[j] - shift);
  }
  return shift + std::log(z);
}

}  // namespace

TransitionModel build_transition_model(const AffinityStack& stack) {
  const std::size_t n = stack.nodes();
  check_nodes(n);
  TransitionModel model{DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                        DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  const auto n_i = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
    std::vector<double> row(n);
#pragma omp for schedule(static)
    for (std::int64_t ii = 0; ii < n_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      dense_row(stack.aggregate, i, row);
      const double lz = log_normalizer(row, i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double lp = row[j] - lz;
        model.log_p(ii, static_cast<Eigen::Index>(j)) = lp;
        model.p(ii, static_cast<Eigen::Index>(j)) = std::exp(lp);
      }
    }
  }
  return model;
}

DenseMatrix transitions_for_weights(const AffinityStack& stack, std::span<const double> w) {
  check_weights(stack, w);
  const std::size_t n = stack.nodes();
  check_nodes(n);
  DenseMatrix q = DenseMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto n_i = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
    std::vector<double> row(n);
#pragma omp for schedule(static)
    for (std::int64_t ii = 0; ii < n_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      weighted_row(stack, w, i, row);
      const double lz = log_normalizer(row, i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) q(ii, static_cast<Eigen::Index>(j)) = std::exp(row[j] - lz);
      }
    }
  }
  return q;
}

double kl_divergence(const DenseMatrix& p, const DenseMatrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols()) {
    throw ArgumentError("KL divergence needs square matrices of equal shape");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (j == i || p(i, j) == 0.0) continue;
      row += p(i, j) * (std::log(p(i, j)) - std::log(q(i, j)));
    }
    total += row;
  }
  return total;
}

Evaluation evaluate(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                    double lambda, bool with_gradient) {
  check_weights(stack, w);
  const std::size_t n = stack.nodes();
  const std::size_t paths = stack.size();
  if (model.size() != n) throw ArgumentError("transition model and affinity stack disagree on node count");

  std::vector<double> row_kl(n, 0.0);
  std::vector<double> row_grad(with_gradient ? n * paths : 0, 0.0);
  const auto n_i = static_cast<std::int64_t>(n);

#pragma omp parallel
  {
    std::vector<double> a(n);
    std::vector<double> diff(n);
#pragma omp for schedule(static)
    for (std::int64_t ii = 0; ii < n_i; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      weighted_row(stack, w, i, a);
      const double lz = log_normalizer(a, i);
      const double* p_row = model.p.row(ii).data();
      const double* lp_row = model.log_p.row(ii).data();
      double kl = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double log_q = a[j] - lz;
        if (p_row[j] > 0.0) kl += p_row[j] * (lp_row[j] - log_q);
        diff[j] = p_row[j] - std::exp(log_q);
      }
      row_kl[i] = kl;
      if (with_gradient) {
        double* g = row_grad.data() + i * paths;
        for (std::size_t m = 0; m < paths; ++m) {
          const auto rc = stack.s[m].row_cols(i);
          const auto rv = stack.s[m].row_values(i);
          double acc = 0.0;
          for (std::size_t p = 0; p < rc.size(); ++p) acc += diff[rc[p]] * rv[p];
          g[m] = acc;
        }
      }
    }
  }

  Evaluation out;
  for (double v : row_kl) out.kl += v;
  double l1 = 0.0;
  for (double v : w) l1 += v;
  out.objective = out.kl + lambda * l1;
  if (with_gradient) {
    out.gradient.assign(paths, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t m = 0; m < paths; ++m) out.gradient[m] -= row_grad[i * paths + m];
    }
    for (auto& g : out.gradient) g += lambda;
  }
  return out;
}

Evaluation evaluate_reference(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                              double lambda) {
  check_weights(stack, w);
  const std::size_t n = stack.nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t m = 0; m < stack.size(); ++m) {
    for (const auto& t : stack.s[m].triplets()) a[t.row][t.col] += w[m] * t.value;
  }
  std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) z += std::exp(a[i][k]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) q[i][j] = std::exp(a[i][j]) / z;
    }
  }
  Evaluation out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = model.p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (j != i && p > 0.0) out.kl += p * std::log(p / q[i][j]);
    }
  }
  double l1 = 0.0;
  for (double v : w) l1 += v;
  out.objective = out.kl + lambda * l1;
  out.gradient.assign(stack.size(), lambda);
  for (std::size_t m = 0; m < stack.size(); ++m) {
    for (const auto& t : stack.s[m].triplets()) {
      const double p = model.p(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col));
      out.gradient[m] -= (p - q[t.row][t.col]) * t.value;
    }
  }
  return out;
}

double regularized_objective(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                             double lambda) {
  return evaluate(stack, model, w, lambda, false).objective;
}

std::vector<double> gradient(const AffinityStack& stack, const TransitionModel& model, std::span<const double> w,
                             double lambda) {
  return evaluate(stack, model, w, lambda, true).gradient;
}

}  // namespace spmr
