// Command-line front end: one subcommand per experiment, JSON report on stdout.
//
// Exit codes: 0 all exact checks pass, 1 an exact check failed, 2 configuration error.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>

#include "tracelab/errors.hpp"
#include "tracelab/experiments.hpp"

namespace {

using tracelab::ExperimentConfig;
using tracelab::i64;
using tracelab::u64;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto token = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!token.empty()) out.push_back(token);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

i64 to_int(const std::string& s) {
  i64 v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw tracelab::PreconditionError("bad integer '" + s + "'");
  return v;
}

/// "a..b" expands to the integers a, ..., b; anything else passes through.
std::vector<std::string> expand_ranges(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    const auto dots = t.find("..");
    if (dots == std::string::npos) {
      out.push_back(t);
      continue;
    }
    const i64 lo = to_int(t.substr(0, dots));
    const i64 hi = to_int(t.substr(dots + 2));
    if (hi < lo) throw tracelab::PreconditionError("empty range '" + t + "'");
    for (i64 v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  }
  return out;
}

std::vector<i64> int_list(const std::string& text) {
  std::vector<i64> out;
  for (const auto& t : split(text, ',')) out.push_back(to_int(t));
  return out;
}

struct RawOptions {
  std::string f;
  std::string f_den;
  std::string set;
  std::string shifts;
  std::string sizes;
  std::string subsets;
  bool unnormalized = false;
  std::optional<u64> d;
  std::optional<double> delta;
  std::optional<u64> a;
};

void add_options(CLI::App& cmd, ExperimentConfig& c, RawOptions& raw) {
  cmd.add_option("--p", c.p, "characteristic of the source field");
  cmd.add_option("--e", c.e, "degree of the source field over F_p");
  cmd.add_option("--ell", c.ell, "residue characteristic");
  cmd.add_option("--d", raw.d, "order of the cyclotomic ring, or d for mu_d");
  cmd.add_option("--conj", c.conjugate, "exponent choosing the prime above ell");
  cmd.add_option("--m", c.m, "residue degree for model and gauss-sum");
  cmd.add_option("--kind", c.kind, "kummer, kloosterman or hyperelliptic");
  cmd.add_option("--n", c.n, "Kloosterman rank or matrix size");
  cmd.add_option("--chi-order", c.chi_order, "order of the multiplicative character");
  cmd.add_option("--f", raw.f, "polynomial coefficients, constant term first, e.g. -1,0,1");
  cmd.add_option("--f-den", raw.f_den, "denominator coefficients for Kummer");
  cmd.add_flag("--unnormalized", raw.unnormalized, "skip the square-root normalization");
  cmd.add_option("--family", c.family, "shifted_subset or intervals");
  cmd.add_option("--set", raw.set, "elements separated by ';', each as c0,c1,...");
  cmd.add_option("--shifts", raw.shifts, "shift elements separated by ';' (ranges a..b allowed)");
  cmd.add_option("--sizes", raw.sizes, "interval sizes separated by ',' (ranges a..b allowed)");
  cmd.add_option("--subsets", raw.subsets, "coordinate sets E_2..E_e separated by ';', entries by ','");
  cmd.add_option("--delta", raw.delta, "box / character-size exponent");
  cmd.add_option("--epsilon", c.epsilon, "power-saving slack");
  cmd.add_option("--bound-constant", c.bound_constant, "multiplier C for soft bound checks");
  cmd.add_option("--seed", c.seed, "master RNG seed");
  cmd.add_option("--workers", c.workers, "worker threads");
  cmd.add_option("--group", c.group, "GL, SL, Sp, SO_odd, SO_plus or mu");
  cmd.add_option("--L", c.steps, "walk length");
  cmd.add_option("--trials", c.trials, "Monte Carlo trials (0 disables)");
  cmd.add_option("--a", raw.a, "single residue element index for gauss-sum");
  cmd.add_flag("--restrict-lisse", c.restrict_lisse, "average only over shifts avoiding singular points");
  cmd.add_flag("--timing", c.timing, "include wall time in the report");
}

void finish(ExperimentConfig& c, const RawOptions& raw) {
  if (!raw.f.empty()) c.f = int_list(raw.f);
  if (!raw.f_den.empty()) c.f_den = int_list(raw.f_den);
  if (!raw.set.empty()) c.set = expand_ranges(split(raw.set, ';'));
  if (!raw.shifts.empty()) c.shifts = expand_ranges(split(raw.shifts, ';'));
  if (!raw.sizes.empty()) {
    for (const auto& s : expand_ranges(split(raw.sizes, ','))) c.sizes.push_back(static_cast<u64>(to_int(s)));
  }
  if (!raw.subsets.empty()) {
    for (const auto& group : split(raw.subsets, ';')) {
      std::vector<u64> set;
      for (i64 v : int_list(group)) set.push_back(static_cast<u64>(v));
      c.coordinate_sets.push_back(std::move(set));
    }
  }
  c.normalized = !raw.unnormalized;
  c.d = raw.d;
  c.delta = raw.delta;
  c.a = raw.a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced trace functions, monodromy models and short-sum experiments"};
  app.require_subcommand(0, 1);
  std::string out_dir;
  std::string config_file;
  app.add_option("--out", out_dir, "directory for report.json and table CSVs");
  app.add_option("--config", config_file, "rerun the configuration echoed in a report.json");

  ExperimentConfig config;
  RawOptions raw;
  for (const auto& name : tracelab::experiment_names()) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_options(*cmd, config, raw);
    cmd->add_option("--out", out_dir, "directory for report.json and table CSVs");
    cmd->callback([&config, name] { config.experiment = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw tracelab::PreconditionError("cannot read " + config_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& ex) {
        throw tracelab::PreconditionError(config_file + " is not valid JSON: " + ex.what());
      }
      config = ExperimentConfig::from_json(j.contains("config") ? j["config"] : j);
    } else {
      if (config.experiment.empty()) {
        std::cerr << app.help();
        return 2;
      }
      finish(config, raw);
    }

    const auto report = tracelab::run_experiment(config);
    std::cout << report.to_json().dump(2) << '\n';
    if (!out_dir.empty()) report.write(out_dir);
    if (!report.exact_checks_pass()) {
      std::cerr << "exact check failed\n";
      return 1;
    }
    return 0;
  } catch (const tracelab::PreconditionError& ex) {
    std::cerr << "configuration error: " << ex.what() << '\n';
    return 2;
  } catch (const tracelab::BudgetError& ex) {
    std::cerr << "budget exceeded: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
