#include "spmr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "spmr/errors.hpp"

namespace spmr {

namespace fs = std::filesystem;
using json = nlohmann::json;

double report_number(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(report_number(x));
  return out;
}

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

json selection_to_json(const SelectionResult& result, const std::vector<std::string>& names,
                       const std::vector<std::string>& specs) {
  json probes = json::array();
  for (const auto& p : result.probes) {
    probes.push_back({{"lambda", report_number(p.lambda)},
                      {"selected_count", p.selected_count},
                      {"iterations", p.objective_trace.size() - 1}});
  }
  return {
      {"weights", numbers(result.weights)},
      {"selected", result.selected},
      {"lambda", report_number(result.lambda)},
      {"kl", report_number(result.kl)},
      {"objective", report_number(result.objective)},
      {"trace", numbers(result.objective_trace)},
      {"fallback_used", result.fallback_used},
      {"converged", result.converged},
      {"metapaths", names},
      {"metapath_specs", specs},
      {"lambda_probes", probes},
  };
}

SelectionReport selection_from_json(const json& doc) {
  try {
    SelectionReport r;
    r.weights = doc.at("weights").get<std::vector<double>>();
    r.selected = doc.at("selected").get<std::vector<std::size_t>>();
    r.names = doc.at("metapaths").get<std::vector<std::string>>();
    r.specs = doc.at("metapath_specs").get<std::vector<std::string>>();
    r.lambda = doc.at("lambda").get<double>();
    r.kl = doc.at("kl").get<double>();
    r.fallback_used = doc.at("fallback_used").get<bool>();
    if (r.specs.size() != r.weights.size() || r.names.size() != r.weights.size()) {
      throw ValidationError("selection report: weights, metapaths and metapath_specs differ in length");
    }
    for (auto m : r.selected) {
      if (m >= r.weights.size()) throw ValidationError("selection report: selected index out of range");
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("selection report: ") + e.what());
  }
}

std::string ranked_listing(const SelectionResult& result, const std::vector<std::string>& names,
                           const std::vector<std::string>& specs) {
  std::vector<std::size_t> order(result.weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<char> chosen(order.size(), 0);
  for (auto m : result.selected) chosen[m] = 1;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (chosen[a] != chosen[b]) return chosen[a] > chosen[b];
    return result.weights[a] > result.weights[b];
  });

  std::size_t width = 4;
  for (const auto& n : names) width = std::max(width, n.size());
  std::ostringstream out;
  out << "# Ranked meta-paths (" << result.selected.size() << " of " << order.size() << " selected, lambda "
      << report_number(result.lambda) << ")\n";
  std::size_t rank = 0;
  for (auto m : order) {
    if (rank == result.selected.size()) out << "# not selected\n";
    ++rank;
    out << (chosen[m] ? std::to_string(rank) : std::string("-")) << '\t' << fixed(result.weights[m], 6) << '\t'
        << names[m] << std::string(width - names[m].size(), ' ') << '\t' << specs[m] << '\n';
  }
  return out.str();
}

json comparison_to_json(const ComparisonTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"name", r.name},
                    {"paths", r.paths},
                    {"accuracy", numbers(r.accuracy)},
                    {"nmi", numbers(r.nmi)},
                    {"mean_accuracy", report_number(r.mean_accuracy)},
                    {"std_accuracy", report_number(r.std_accuracy)},
                    {"mean_nmi", report_number(r.mean_nmi)},
                    {"std_nmi", report_number(r.std_nmi)},
                    {"median_accuracy", report_number(r.median_accuracy)},
                    {"median_nmi", report_number(r.median_nmi)}});
  }
  return {{"k", table.k}, {"seeds", table.n_seeds}, {"base_seed", table.base_seed}, {"rows", rows}};
}

std::string format_comparison(const ComparisonTable& table) {
  std::size_t width = 6;
  for (const auto& r : table.rows) width = std::max(width, r.name.size());
  std::ostringstream out;
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << "# k = " << table.k << ", seeds = " << table.n_seeds << ", base seed = " << table.base_seed << '\n';
  out << pad("Method") << "  #paths  Accuracy          NMI\n";
  out << std::string(width, '-') << "  ------  ----------------  ----------------\n";
  for (const auto& r : table.rows) {
    std::string paths = std::to_string(r.paths);
    paths.insert(paths.begin(), 6 - std::min<std::size_t>(6, paths.size()), ' ');
    out << pad(r.name) << "  " << paths << "  " << fixed(r.mean_accuracy, 4) << " +- " << fixed(r.std_accuracy, 4)
        << "  " << fixed(r.mean_nmi, 4) << " +- " << fixed(r.std_nmi, 4) << '\n';
  }
  return out.str();
}

void write_json(const json& doc, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(file.string(), 0, e.what());
  }
}

void write_text(const std::string& text, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << text;
}

}  // namespace spmr
