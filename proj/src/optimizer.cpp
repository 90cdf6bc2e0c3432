#include "spmr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "spmr/errors.hpp"

namespace spmr {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b, const std::vector<char>& mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask[i]) s += a[i] * b[i];
  }
  return s;
}

double projected_gradient_norm(const std::vector<double>& w, const std::vector<double>& g) {
  double norm = 0.0;
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double moved = std::clamp(w[m] - g[m], 0.0, 1.0);
    norm = std::max(norm, std::abs(moved - w[m]));
  }
  return norm;
}

void require_finite(const Evaluation& e, std::size_t iteration) {
  if (!std::isfinite(e.objective)) throw NumericalError("non-finite objective", iteration);
  for (double g : e.gradient) {
    if (!std::isfinite(g)) throw NumericalError("non-finite gradient", iteration);
  }
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
};

// Two-loop recursion restricted to the free variables; returns -H g.
std::vector<double> quasi_newton_direction(const std::vector<double>& g, const std::deque<CurvaturePair>& memory,
                                           const std::vector<char>& free) {
  std::vector<double> q(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) q[i] = free[i] ? g[i] : 0.0;
  std::vector<double> alpha(memory.size(), 0.0);
  std::vector<double> rho(memory.size(), 0.0);
  bool usable = false;
  for (std::size_t k = memory.size(); k-- > 0;) {
    const double sy = dot(memory[k].s, memory[k].y, free);
    if (sy <= 0.0) continue;
    usable = true;
    rho[k] = 1.0 / sy;
    alpha[k] = rho[k] * dot(memory[k].s, q, free);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (free[i]) q[i] -= alpha[k] * memory[k].y[i];
    }
  }
  if (usable) {
    const auto& last = memory.back();
    const double yy = dot(last.y, last.y, free);
    const double sy = dot(last.s, last.y, free);
    const double gamma = (yy > 0.0 && sy > 0.0) ? sy / yy : 1.0;
    for (auto& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    if (rho[k] == 0.0) continue;
    const double beta = rho[k] * dot(memory[k].y, q, free);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (free[i]) q[i] += (alpha[k] - beta) * memory[k].s[i];
    }
  }
  for (auto& v : q) v = -v;
  return q;
}

}  // namespace

std::vector<double> project_box(std::span<const double> w) {
  std::vector<double> out(w.begin(), w.end());
  for (auto& v : out) v = std::min(1.0, std::max(0.0, v));
  return out;
}

std::vector<std::size_t> threshold_selection(std::span<const double> w, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < w.size(); ++m) {
    if (w[m] > threshold) out.push_back(m);
  }
  return out;
}

SelectionResult minimize(const AffinityStack& stack, const TransitionModel& model, const OptimizerConfig& config) {
  const std::size_t paths = stack.size();
  if (paths == 0) throw ArgumentError("minimize needs at least one meta-path");
  if (config.lambda < 0.0) throw ArgumentError("lambda must be non-negative");
  if (!(config.selection_threshold > 0.0 && config.selection_threshold < 1.0)) {
    throw ArgumentError("selection threshold must lie strictly between 0 and 1");
  }

  std::vector<double> w(paths, 1.0);
  if (config.initial_weights) {
    if (config.initial_weights->size() != paths) throw ArgumentError("initial weights have the wrong length");
    w = project_box(*config.initial_weights);
  }

  SelectionResult result;
  result.lambda = config.lambda;
  Evaluation cur = evaluate(stack, model, w, config.lambda);
  require_finite(cur, 0);
  result.objective_trace.push_back(cur.objective);

  std::deque<CurvaturePair> memory;
  std::size_t iter = 0;
  for (; iter < config.max_iters; ++iter) {
    const double pg = projected_gradient_norm(w, cur.gradient);
    if (pg <= config.grad_tol) {
      result.converged = true;
      break;
    }

    // Variables held at a bound by the gradient are fixed for this step.
    const double eps = std::min(1e-2, pg);
    std::vector<char> free(paths, 1);
    for (std::size_t m = 0; m < paths; ++m) {
      if ((w[m] <= eps && cur.gradient[m] > 0.0) || (w[m] >= 1.0 - eps && cur.gradient[m] < 0.0)) free[m] = 0;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool steepest = attempt == 1 || memory.empty();
      std::vector<double> d;
      if (!steepest) {
        d = quasi_newton_direction(cur.gradient, memory, free);
        if (dot(d, cur.gradient, free) >= 0.0) d.clear();
      }
      double step = config.initial_step;
      if (d.empty()) {
        d.assign(paths, 0.0);
        double gmax = 0.0;
        for (std::size_t m = 0; m < paths; ++m) {
          if (free[m]) {
            d[m] = -cur.gradient[m];
            gmax = std::max(gmax, std::abs(d[m]));
          }
        }
        step = config.initial_step / std::max(1.0, gmax);
      }

      for (std::size_t bt = 0; bt <= config.max_backtracks; ++bt, step *= config.backtrack_factor) {
        std::vector<double> trial(paths);
        double decrease = 0.0;
        bool moved = false;
        for (std::size_t m = 0; m < paths; ++m) {
          trial[m] = std::clamp(w[m] + step * d[m], 0.0, 1.0);
          decrease += cur.gradient[m] * (trial[m] - w[m]);
          moved = moved || trial[m] != w[m];
        }
        if (!moved) break;
        Evaluation next = evaluate(stack, model, trial, config.lambda);
        require_finite(next, iter + 1);
        if (next.objective <= cur.objective + config.sufficient_decrease * decrease &&
            next.objective <= cur.objective) {
          CurvaturePair pair{std::vector<double>(paths), std::vector<double>(paths)};
          for (std::size_t m = 0; m < paths; ++m) {
            pair.s[m] = trial[m] - w[m];
            pair.y[m] = next.gradient[m] - cur.gradient[m];
          }
          const std::vector<char> all(paths, 1);
          const double sy = dot(pair.s, pair.y, all);
          const double scale = std::sqrt(dot(pair.s, pair.s, all) * dot(pair.y, pair.y, all));
          if (sy > 1e-10 * scale) {
            memory.push_back(std::move(pair));
            if (memory.size() > config.memory) memory.pop_front();
          }
          w = std::move(trial);
          cur = std::move(next);
          result.objective_trace.push_back(cur.objective);
          accepted = true;
          break;
        }
      }
      if (!accepted && !steepest) memory.clear();
      if (!accepted && steepest) break;
    }
    if (!accepted) {
      // No decrease possible along the projected arc (stalled at rounding level).
      result.stalled = true;
      break;
    }
  }

  result.iterations = iter;
  result.weights = w;
  result.selected = threshold_selection(w, config.selection_threshold);
  result.kl = cur.kl;
  result.objective = cur.objective;
  return result;
}

SelectionResult minimize(const AffinityStack& stack, const OptimizerConfig& config) {
  return minimize(stack, build_transition_model(stack), config);
}

SelectionResult select_for_size(const AffinityStack& stack, const TransitionModel& model, std::size_t d,
                                const OptimizerConfig& config, const LambdaSearch& search) {
  const std::size_t paths = stack.size();
  if (d < 1 || d > paths) {
    throw ArgumentError("subset size must be in [1, " + std::to_string(paths) + "], got " + std::to_string(d));
  }

  OptimizerConfig run_config = config;
  std::vector<LambdaProbe> probes;
  auto run = [&](double lambda) {
    run_config.lambda = lambda;
    SelectionResult r = minimize(stack, model, run_config);
    run_config.initial_weights = r.weights;
    probes.push_back({lambda, r.selected.size(), r.objective_trace});
    return r;
  };

  if (d == paths) {
    SelectionResult r = run(0.0);
    r.probes = std::move(probes);
    return r;
  }

  std::optional<SelectionResult> best;
  auto consider = [&](SelectionResult r) {
    if (!best) {
      best = std::move(r);
      return;
    }
    const auto gap = [d](std::size_t c) { return c > d ? c - d : d - c; };
    const std::size_t g_new = gap(r.selected.size());
    const std::size_t g_old = gap(best->selected.size());
    // Prefer the closer count; on a tie prefer the run with too many paths.
    if (g_new < g_old || (g_new == g_old && r.selected.size() > d && best->selected.size() < d)) {
      best = std::move(r);
    }
  };

  double lo = search.log10_lo;
  double hi = search.log10_hi;
  bool exact = false;
  {
    SelectionResult r = run(std::pow(10.0, lo));
    exact = r.selected.size() == d;
    const bool too_few = r.selected.size() < d;
    consider(std::move(r));
    if (!exact && !too_few) {
      SelectionResult h = run(std::pow(10.0, hi));
      exact = h.selected.size() == d;
      const bool too_many = h.selected.size() > d;
      consider(std::move(h));
      for (std::size_t step = 0; !exact && !too_many && step < search.max_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        SelectionResult m = run(std::pow(10.0, mid));
        const std::size_t c = m.selected.size();
        exact = c == d;
        if (c > d) {
          lo = mid;
        } else if (c < d) {
          hi = mid;
        }
        if (exact) {
          best = std::move(m);
        } else {
          consider(std::move(m));
        }
      }
    } else if (exact) {
      best = std::move(r);
    }
  }

  SelectionResult result = std::move(*best);
  if (result.selected.size() != d) {
    std::vector<std::size_t> order(paths);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return result.weights[a] > result.weights[b]; });
    order.resize(d);
    std::sort(order.begin(), order.end());
    result.selected = std::move(order);
    result.fallback_used = true;
  }
  result.probes = std::move(probes);
  return result;
}

double subset_kl(const AffinityStack& stack, const TransitionModel& model, std::span<const std::size_t> subset) {
  std::vector<double> w(stack.size(), 0.0);
  for (auto m : subset) {
    if (m >= stack.size()) throw ArgumentError("subset index " + std::to_string(m) + " out of range");
    w[m] = 1.0;
  }
  return evaluate(stack, model, w, 0.0, false).kl;
}

SubsetOptimum brute_force_subset(const AffinityStack& stack, const TransitionModel& model, std::size_t d,
                                 std::uint64_t budget) {
  const std::size_t paths = stack.size();
  if (d < 1 || d > paths) {
    throw ArgumentError("subset size must be in [1, " + std::to_string(paths) + "], got " + std::to_string(d));
  }
  std::uint64_t combos = 1;
  for (std::size_t k = 1; k <= d; ++k) {
    combos = combos * (paths - d + k) / k;  // exact: C(paths-d+k, k) stays integral
    if (combos > budget) {
      throw ResourceError("C(" + std::to_string(paths) + ", " + std::to_string(d) + ") exceeds the enumeration budget of " +
                          std::to_string(budget));
    }
  }

  SubsetOptimum best;
  best.kl = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    const double kl = subset_kl(stack, model, idx);
    ++best.evaluated;
    if (kl < best.kl) {
      best.kl = kl;
      best.subset = idx;
    }
    // Next combination in lexicographic order.
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == paths - d + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace spmr
