#pragma once

// Independent reference computations for the tests. Everything here is
// deliberately naive: dense loops, explicit enumeration, no shared kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "spmr/hin.hpp"
#include "spmr/metrics.hpp"
#include "spmr/pathcount.hpp"
#include "spmr/transition.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using DenseCount = std::vector<std::vector<std::uint64_t>>;

template <class T>
std::vector<std::vector<T>> to_dense(const spmr::CsrMatrix<T>& m) {
  std::vector<std::vector<T>> d(m.rows(), std::vector<T>(m.cols(), T{}));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d[i][j] = m.at(i, j);
  return d;
}

inline DenseCount triple_loop_product(const DenseCount& a, const DenseCount& b) {
  DenseCount c(a.size(), std::vector<std::uint64_t>(b.empty() ? 0 : b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < c[i].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// Walks every node sequence that follows `path` and tallies (start, end).
/// The diagonal is zeroed to match the counting contract.
inline DenseCount enumerate_path_instances(const spmr::HinGraph& g, const spmr::MetaPath& path) {
  const auto& schema = g.schema();
  std::vector<DenseCount> hops;
  for (const auto& st : path.steps) {
    const auto& adj = g.adjacency(st.relation);
    const std::size_t ns = g.node_count(spmr::step_source(schema, st));
    const std::size_t nt = g.node_count(spmr::step_target(schema, st));
    DenseCount h(ns, std::vector<std::uint64_t>(nt, 0));
    for (std::size_t u = 0; u < ns; ++u)
      for (std::size_t v = 0; v < nt; ++v) h[u][v] = st.inverse ? adj.at(v, u) : adj.at(u, v);
    hops.push_back(std::move(h));
  }
  const std::size_t n = g.target_count();
  DenseCount out(n, std::vector<std::uint64_t>(n, 0));
  std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t node,
                                                                        std::size_t depth) {
    if (depth == hops.size()) {
      ++out[start][node];
      return;
    }
    for (std::size_t next = 0; next < hops[depth][node].size(); ++next)
      if (hops[depth][node][next]) walk(start, next, depth + 1);
  };
  for (std::size_t i = 0; i < n; ++i) walk(i, i, 0);
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 0;
  return out;
}

/// Every step sequence of length 2..max_length over all (relation, direction)
/// pairs, kept when type-compatible from and back to the target type.
inline std::vector<spmr::MetaPath> all_metapaths(const spmr::HinGraph& g, std::size_t max_length) {
  const auto& schema = g.schema();
  std::vector<spmr::Step> alphabet;
  for (const auto& r : schema.relations()) {
    alphabet.push_back({r.id, false});
    if (!r.symmetric) alphabet.push_back({r.id, true});
  }
  std::vector<spmr::MetaPath> out;
  for (std::size_t len = 2; len <= max_length; ++len) {
    std::vector<std::size_t> digits(len, 0);
    while (true) {
      spmr::MetaPath p;
      for (auto d : digits) p.steps.push_back(alphabet[d]);
      bool ok = spmr::step_source(schema, p.steps.front()) == g.target_type() &&
                spmr::step_target(schema, p.steps.back()) == g.target_type();
      for (std::size_t s = 0; ok && s + 1 < len; ++s)
        ok = spmr::step_target(schema, p.steps[s]) == spmr::step_source(schema, p.steps[s + 1]);
      if (ok) out.push_back(p);
      std::size_t pos = 0;
      while (pos < len && ++digits[pos] == alphabet.size()) digits[pos++] = 0;
      if (pos == len) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// p_ij = exp(a_ij) / sum_{k != i} exp(a_ik) with no shift.
inline Dense naive_softmax(const Dense& a) {
  const std::size_t n = a.size();
  Dense p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) z += std::exp(a[i][k]);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) p[i][j] = std::exp(a[i][j]) / z;
  }
  return p;
}

inline Dense weighted_affinity(const spmr::AffinityStack& stack, const std::vector<double>& w) {
  const std::size_t n = stack.nodes();
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t m = 0; m < stack.size(); ++m) {
    const auto s = to_dense(stack.s[m]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] += w[m] * s[i][j];
  }
  return a;
}

inline double kl_term_by_term(const Dense& p, const Dense& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (i != j && p[i][j] > 0.0) kl += p[i][j] * std::log(p[i][j] / q[i][j]);
  return kl;
}

inline double objective(const spmr::AffinityStack& stack, const std::vector<double>& w, double lambda) {
  const std::vector<double> ones(stack.size(), 1.0);
  const auto p = naive_softmax(weighted_affinity(stack, ones));
  const auto q = naive_softmax(weighted_affinity(stack, w));
  return kl_term_by_term(p, q) + lambda * std::accumulate(w.begin(), w.end(), 0.0);
}

inline std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> w, double h) {
  std::vector<double> g(w.size());
  for (std::size_t m = 0; m < w.size(); ++m) {
    const double w0 = w[m];
    w[m] = w0 + h;
    const double up = f(w);
    w[m] = w0 - h;
    const double down = f(w);
    w[m] = w0;
    g[m] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Best raw match rate over all k! relabelings of the prediction.
inline double permutation_accuracy(const std::vector<std::uint32_t>& pred, const std::vector<std::uint32_t>& truth,
                                   std::size_t k) {
  std::vector<std::uint32_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0u);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += perm[pred[i]] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

/// MI / max(H, H') from a freshly tallied joint distribution.
inline double direct_nmi(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  std::map<std::uint32_t, double> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0 / n;
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
  }
  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (const auto& [key, pj] : joint) mi += pj * std::log(pj / (pa[key.first] * pb[key.second]));
  for (const auto& [_, p] : pa) ha -= p * std::log(p);
  for (const auto& [_, p] : pb) hb -= p * std::log(p);
  const double h = std::max(ha, hb);
  if (ha == 0.0 || hb == 0.0) return (pa.size() == 1 && pb.size() == 1) ? 1.0 : 0.0;
  return mi / h;
}

// ---- fixtures --------------------------------------------------------------

struct EdgeList {
  std::string name;
  std::string source;
  std::string target;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  bool symmetric = false;
};

inline spmr::HinGraph make_graph(const std::vector<std::pair<std::string, std::size_t>>& types,
                                 const std::vector<EdgeList>& relations, const std::string& target) {
  std::vector<spmr::NodeType> nts;
  std::vector<std::size_t> counts;
  for (std::size_t t = 0; t < types.size(); ++t) {
    nts.push_back({static_cast<spmr::TypeId>(t), types[t].first});
    counts.push_back(types[t].second);
  }
  auto id_of = [&](const std::string& name) {
    for (std::size_t t = 0; t < types.size(); ++t)
      if (types[t].first == name) return static_cast<spmr::TypeId>(t);
    throw std::logic_error("unknown type " + name);
  };
  std::vector<spmr::Relation> rels;
  std::vector<spmr::CountCsr> adj;
  for (std::size_t r = 0; r < relations.size(); ++r) {
    const auto& e = relations[r];
    rels.push_back({static_cast<spmr::RelationId>(r), e.name, id_of(e.source), id_of(e.target), e.symmetric});
    std::vector<spmr::Triplet<std::uint64_t>> trips;
    for (auto [u, v] : e.edges) trips.push_back({u, v, 1});
    adj.push_back(spmr::CountCsr::from_triplets(counts[id_of(e.source)], counts[id_of(e.target)], trips,
                                                [](std::uint64_t, std::uint64_t) { return std::uint64_t{1}; }));
  }
  return spmr::HinGraph(spmr::HinSchema(nts, rels), counts, adj, id_of(target));
}

/// Random typed graph: `types` node types with 1..max_per_type nodes each,
/// `relations` random relations at the given edge density.
inline spmr::HinGraph random_graph(std::mt19937_64& rng, std::size_t types, std::size_t max_per_type,
                                   std::size_t relations, double density) {
  std::uniform_int_distribution<std::size_t> size(1, max_per_type);
  std::uniform_int_distribution<std::size_t> pick(0, types - 1);
  std::bernoulli_distribution edge(density);
  std::vector<std::pair<std::string, std::size_t>> ts;
  for (std::size_t t = 0; t < types; ++t) ts.emplace_back("T" + std::to_string(t), size(rng));
  std::vector<EdgeList> rels;
  for (std::size_t r = 0; r < relations; ++r) {
    EdgeList e;
    e.name = "r" + std::to_string(r);
    const std::size_t s = r == 0 ? 0 : pick(rng);
    const std::size_t t = pick(rng);
    e.source = ts[s].first;
    e.target = ts[t].first;
    for (std::uint32_t u = 0; u < ts[s].second; ++u)
      for (std::uint32_t v = 0; v < ts[t].second; ++v)
        if (edge(rng)) e.edges.emplace_back(u, v);
    rels.push_back(e);
  }
  return make_graph(ts, rels, "T0");
}

/// Random stack of m matrices on n nodes with entries in [0, 1] and zero diagonal.
inline spmr::AffinityStack random_stack(std::mt19937_64& rng, std::size_t n, std::size_t m, double density = 0.6) {
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<spmr::RealCsr> s;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<spmr::Triplet<double>> trips;
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j)
        if (i != j && keep(rng)) trips.push_back({i, j, value(rng)});
    s.push_back(spmr::RealCsr::from_triplets(n, n, trips, [](double a, double) { return a; }));
  }
  return spmr::AffinityStack::from_matrices(std::move(s));
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(m);
  for (auto& x : w) x = u(rng);
  return w;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

inline bool non_increasing(const std::vector<double>& trace, double tol = 1e-12) {
  for (std::size_t t = 1; t < trace.size(); ++t)
    if (trace[t] > trace[t - 1] + tol) return false;
  return true;
}

}  // namespace oracle
