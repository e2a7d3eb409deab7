/**
 * @file experiments.hpp
 * @brief Experiment harness: configuration, trace-function assembly, and JSON/CSV reports.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelab/families.hpp"
#include "tracelab/model.hpp"
#include "tracelab/tracefn.hpp"

namespace tracelab {

struct ExperimentConfig {
  std::string experiment;

  u64 p = 7;
  int e = 1;

  u64 ell = 3;
  /// Order of the cyclotomic ring; a kind-specific default applies when unset.
  std::optional<u64> d;
  u64 conjugate = 1;
  /// Residue degree for model and gauss-sum runs, which work on F_{ell^m} directly.
  u64 m = 1;

  std::string kind = "kummer";
  /// Kloosterman rank, or matrix size for model runs.
  u64 n = 2;
  u64 chi_order = 2;
  std::vector<i64> f{0, 1};
  std::vector<i64> f_den{1};
  bool normalized = true;

  std::string family = "shifted_subset";
  std::vector<std::string> set{"0"};
  std::vector<std::string> shifts;
  std::vector<u64> sizes;
  std::vector<std::vector<u64>> coordinate_sets;

  std::optional<double> delta;
  double epsilon = 0.1;
  double bound_constant = 5.0;
  u64 seed = 0;
  unsigned workers = 1;

  std::string group = "SL";
  u64 steps = 1;
  u64 trials = 0;
  std::optional<u64> a;
  bool restrict_lisse = false;
  bool timing = false;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};

struct Bound {
  std::string name;
  double value = 0.0;
};

/// `hard` verdicts are exact identities; a failing one makes the run fail.
struct Verdict {
  std::string name;
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool hard = false;
};

struct ExperimentReport {
  nlohmann::json config;
  std::vector<ReportTable> tables;
  std::optional<double> max_deviation;
  std::vector<Bound> bounds;
  std::vector<Verdict> verdicts;
  nlohmann::json values = nlohmann::json::object();
  std::optional<double> seconds;

  bool exact_checks_pass() const;
  const ReportTable& table(const std::string& name) const;
  nlohmann::json to_json() const;
  /// report.json plus one CSV per table.
  void write(const std::filesystem::path& dir) const;
};

/// Source field F_{p^e}.
Field source_field(const ExperimentConfig& config);
/// d = chi order for Kummer; for Kloosterman and normalized hyperelliptic, p when p = 1 mod 4, n is odd or the
/// run is unnormalized, else 4p; 1 for unnormalized hyperelliptic.
u64 default_context_order(const ExperimentConfig& config);
TraceFunction build_trace_function(const ExperimentConfig& config);

/// Elements written as coefficient lists "c0,c1,...".
std::vector<Elem> parse_elements(const Field& f, std::span<const std::string> texts);

/// Sums of 1..max_terms elements of I (with repetition) are all nonzero.
bool kummer_compatible(const Field& f, std::span<const Elem> subset, u64 max_terms);

/// Counts of S(t, I + x) over x in F_q, indexed by residue element.
std::vector<u64> shift_sum_counts(const TraceFunction& t, std::span<const Elem> subset);

ExperimentReport cmd_equidist_shift(const ExperimentConfig& config);
ExperimentReport cmd_partial_intervals(const ExperimentConfig& config);
ExperimentReport cmd_shift_subsets(const ExperimentConfig& config);
ExperimentReport cmd_partial_interval_shifts(const ExperimentConfig& config);
ExperimentReport cmd_variance(const ExperimentConfig& config);
ExperimentReport cmd_model(const ExperimentConfig& config);
ExperimentReport cmd_gauss_sum(const ExperimentConfig& config);

/// Dispatches on config.experiment and fills in timing when requested.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::vector<std::string> experiment_names();

}  // namespace tracelab
