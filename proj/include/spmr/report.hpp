#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "spmr/evaluation.hpp"
#include "spmr/hin.hpp"
#include "spmr/optimizer.hpp"

namespace spmr {

/// Rounds to 12 significant digits so reports are stable and diffable.
double report_number(double v);

/// Selection report: weights, selected, lambda, kl, trace, fallback_used,
/// metapaths (display names) and metapath_specs (file form).
nlohmann::json selection_to_json(const SelectionResult& result, const std::vector<std::string>& names,
                                 const std::vector<std::string>& specs);

struct SelectionReport {
  std::vector<double> weights;
  std::vector<std::size_t> selected;
  std::vector<std::string> names;
  std::vector<std::string> specs;
  double lambda = 0.0;
  double kl = 0.0;
  bool fallback_used = false;
};

SelectionReport selection_from_json(const nlohmann::json& doc);

/// Ranked meta-path listing: selected paths by descending weight, then the rest.
std::string ranked_listing(const SelectionResult& result, const std::vector<std::string>& names,
                           const std::vector<std::string>& specs);

nlohmann::json comparison_to_json(const ComparisonTable& table);

/// Aligned plain-text table: one row per subset with mean and std over seeds.
std::string format_comparison(const ComparisonTable& table);

/// Writes `doc` with sorted keys, two-space indent and a trailing newline.
void write_json(const nlohmann::json& doc, const std::filesystem::path& file);
nlohmann::json read_json(const std::filesystem::path& file);

void write_text(const std::string& text, const std::filesystem::path& file);

}  // namespace spmr
