#include "tracelab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

#include "tracelab/errors.hpp"
#include "tracelab/numtheory.hpp"
#include "tracelab/poly.hpp"

namespace tracelab {

// ---------------------------------------------------------------------------
// Configuration

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["p"] = p;
  j["e"] = e;
  j["ell"] = ell;
  j["d"] = d ? nlohmann::json(*d) : nlohmann::json(nullptr);
  j["conjugate"] = conjugate;
  j["m"] = m;
  j["kind"] = kind;
  j["n"] = n;
  j["chi_order"] = chi_order;
  j["f"] = f;
  j["f_den"] = f_den;
  j["normalized"] = normalized;
  j["family"] = family;
  j["set"] = set;
  j["shifts"] = shifts;
  j["sizes"] = sizes;
  j["coordinate_sets"] = coordinate_sets;
  j["delta"] = delta ? nlohmann::json(*delta) : nlohmann::json(nullptr);
  j["epsilon"] = epsilon;
  j["bound_constant"] = bound_constant;
  j["seed"] = seed;
  j["workers"] = workers;
  j["group"] = group;
  j["steps"] = steps;
  j["trials"] = trials;
  j["a"] = a ? nlohmann::json(*a) : nlohmann::json(nullptr);
  j["restrict_lisse"] = restrict_lisse;
  j["timing"] = timing;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) j[key].get_to(field);
  };
  auto get_optional = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<typename std::decay_t<decltype(field)>::value_type>();
  };
  try {
    get("experiment", c.experiment);
    get("p", c.p);
    get("e", c.e);
    get("ell", c.ell);
    get_optional("d", c.d);
    get("conjugate", c.conjugate);
    get("m", c.m);
    get("kind", c.kind);
    get("n", c.n);
    get("chi_order", c.chi_order);
    get("f", c.f);
    get("f_den", c.f_den);
    get("normalized", c.normalized);
    get("family", c.family);
    get("set", c.set);
    get("shifts", c.shifts);
    get("sizes", c.sizes);
    get("coordinate_sets", c.coordinate_sets);
    get_optional("delta", c.delta);
    get("epsilon", c.epsilon);
    get("bound_constant", c.bound_constant);
    get("seed", c.seed);
    get("workers", c.workers);
    get("group", c.group);
    get("steps", c.steps);
    get("trials", c.trials);
    get_optional("a", c.a);
    get("restrict_lisse", c.restrict_lisse);
    get("timing", c.timing);
  } catch (const nlohmann::json::exception& ex) {
    throw PreconditionError(std::string("malformed configuration: ") + ex.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reports

nlohmann::json ReportTable::to_json() const { return {{"name", name}, {"columns", columns}, {"rows", rows}}; }

namespace {

std::string csv_cell(const nlohmann::json& v) {
  std::string text = v.is_string() ? v.get<std::string>() : v.dump();
  if (text.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return text;
}

}  // namespace

void ReportTable::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_cell(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

bool ExperimentReport::exact_checks_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.hard || v.pass; });
}

const ReportTable& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw PreconditionError("report has no table '" + name + "'");
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : tables) j["tables"].push_back(t.to_json());
  nlohmann::json summary;
  summary["max_deviation"] = max_deviation ? nlohmann::json(*max_deviation) : nlohmann::json(nullptr);
  summary["bounds"] = nlohmann::json::array();
  for (const auto& b : bounds) summary["bounds"].push_back({{"name", b.name}, {"value", b.value}});
  summary["verdicts"] = nlohmann::json::array();
  for (const auto& v : verdicts) {
    summary["verdicts"].push_back(
        {{"name", v.name}, {"observed", v.observed}, {"threshold", v.threshold}, {"pass", v.pass}, {"hard", v.hard}});
  }
  summary["values"] = values;
  j["summary"] = summary;
  j["timing"] = seconds ? nlohmann::json{{"seconds", *seconds}} : nlohmann::json(nullptr);
  return j;
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << to_json().dump(2) << '\n';
  }
  for (const auto& t : tables) {
    std::ofstream out(dir / (t.name + ".csv"));
    if (!out) throw Error("cannot write table " + t.name);
    t.write_csv(out);
  }
}

// ---------------------------------------------------------------------------
// Assembly helpers

Field source_field(const ExperimentConfig& config) {
  require(is_prime(config.p), "p = " + std::to_string(config.p) + " is not prime");
  require(config.e >= 1, "e must be at least 1");
  return Field::make(config.p, config.e);
}

u64 default_context_order(const ExperimentConfig& config) {
  if (config.d) return *config.d;
  if (config.kind == "kummer") return config.chi_order;
  if (config.kind == "kloosterman") {
    if (config.p % 4 == 1 || config.n % 2 == 1 || !config.normalized) return config.p;
    return 4 * config.p;
  }
  if (config.kind == "hyperelliptic") {
    if (!config.normalized) return 1;
    return config.p % 4 == 1 ? config.p : 4 * config.p;
  }
  throw PreconditionError("unknown trace kind '" + config.kind + "' (expected kummer, kloosterman or hyperelliptic)");
}

TraceFunction build_trace_function(const ExperimentConfig& config) {
  const Field source = source_field(config);
  const u64 d = default_context_order(config);
  require(config.ell != config.p, "ell must differ from p");
  require(is_prime(config.ell), "ell = " + std::to_string(config.ell) + " is not prime");
  const auto ctx = ResidueContext::build(d, config.ell, config.conjugate);
  if (config.kind == "kummer") {
    require((source.order() - 1) % config.chi_order == 0,
            "character order " + std::to_string(config.chi_order) + " does not divide q-1");
    require(d % config.chi_order == 0, "character order must divide d");
    const MultiplicativeCharacter chi(source, config.chi_order, ctx);
    RationalFunction rf{poly::from_ints(source, config.f), poly::from_ints(source, config.f_den)};
    return kummer(chi, rf);
  }
  if (config.kind == "kloosterman") return kloosterman(config.n, source, ctx, config.normalized);
  return hyperelliptic_family(source, poly::from_ints(source, config.f), ctx, config.normalized);
}

std::vector<Elem> parse_elements(const Field& f, std::span<const std::string> texts) {
  std::vector<Elem> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(f.parse_element(t));
  return out;
}

bool kummer_compatible(const Field& f, std::span<const Elem> subset, u64 max_terms) {
  std::vector<bool> reach(f.order(), false);
  std::vector<Elem> frontier{0};
  reach[0] = true;
  for (u64 terms = 1; terms <= max_terms; ++terms) {
    std::vector<bool> next_reach(f.order(), false);
    std::vector<Elem> next;
    for (Elem s : frontier) {
      for (Elem x : subset) {
        const Elem t = f.add(s, x);
        if (t == 0) return false;
        if (!next_reach[t]) {
          next_reach[t] = true;
          next.push_back(t);
        }
      }
    }
    frontier = std::move(next);
  }
  return true;
}

std::vector<u64> shift_sum_counts(const TraceFunction& t, std::span<const Elem> subset) {
  const Field& f = t.domain();
  const Field& r = t.codomain();
  std::vector<u64> counts(r.order(), 0);
  for (Elem x = 0; x < f.order(); ++x) {
    Elem s = 0;
    for (Elem i : subset) s = r.add(s, t(f.add(i, x)));
    ++counts[s];
  }
  return counts;
}

namespace {

bool is_cyclic(const TraceFunction& t) { return t.group().kind == GroupKind::mu; }

u64 numerator_degree(const TraceFunction& t) {
  return static_cast<u64>(std::max(0, poly::degree(t.rational_function().numerator)));
}

/// log d for cyclic monodromy, log |F_l| otherwise.
double log_group_scale(const TraceFunction& t) {
  return std::log(static_cast<double>(is_cyclic(t) ? t.group().size : t.codomain().order()));
}

double effective_delta(const ExperimentConfig& config, double fallback) { return config.delta.value_or(fallback); }

ReportTable density_table(const Field& residue, std::span<const u64> counts, u64 total) {
  ReportTable table{"density", {"a", "count", "density"}, {}};
  for (Elem a = 0; a < counts.size(); ++a) {
    table.rows.push_back({residue.format(a), counts[a], static_cast<double>(counts[a]) / static_cast<double>(total)});
  }
  return table;
}

double max_deviation(std::span<const u64> counts, u64 total) {
  const double uniform = 1.0 / static_cast<double>(counts.size());
  double worst = 0.0;
  for (u64 c : counts) worst = std::max(worst, std::abs(static_cast<double>(c) / static_cast<double>(total) - uniform));
  return worst;
}

void add_mass_verdict(ExperimentReport& report, std::span<const u64> counts, u64 total) {
  const u64 sum = std::accumulate(counts.begin(), counts.end(), u64{0});
  report.verdicts.push_back({"densities_sum_to_one", static_cast<double>(sum), static_cast<double>(total), sum == total, true});
}

void add_bound_verdict(ExperimentReport& report, const ExperimentConfig& config, const std::string& name, double observed,
                       double bound) {
  report.verdicts.push_back({name, observed, config.bound_constant * bound, observed <= config.bound_constant * bound, false});
}

ExperimentReport base_report(const ExperimentConfig& config, const TraceFunction& t) {
  ExperimentReport report;
  report.config = config.to_json();
  report.values["trace_function"] = t.params();
  report.values["context"] = t.context().to_json();
  report.values["group"] = t.group().to_json();
  report.values["domain"] = t.domain().describe();
  return report;
}

void require_kummer_delta(const TraceFunction& t, double delta) {
  if (t.kind() != TraceKind::kummer) return;
  const u64 deg = numerator_degree(t);
  if (deg > 1) {
    require(delta < 1.0 / static_cast<double>(deg),
            "Kummer compatibility needs delta < 1/deg(f1) = " + std::to_string(1.0 / static_cast<double>(deg)));
  }
}

/// Empirical law of S(t, I + x) over the lisse shifts against the walk law of the monodromy group.
void add_model_comparison(ExperimentReport& report, const TraceFunction& t, std::span<const Elem> subset) {
  const Field& f = t.domain();
  const Field& r = t.codomain();
  std::vector<u64> counts(r.order(), 0);
  u64 lisse = 0;
  for (Elem x = 0; x < f.order(); ++x) {
    Elem s = 0;
    bool ok = true;
    for (Elem i : subset) {
      const Elem y = f.add(i, x);
      if (t.is_singular(y)) {
        ok = false;
        break;
      }
      s = r.add(s, t(y));
    }
    if (!ok) continue;
    ++counts[s];
    ++lisse;
  }
  report.values["lisse_shift_count"] = lisse;
  if (lisse == 0) return;
  try {
    const auto law = walk_law_exact(t.group(), subset.size());
    std::vector<double> empirical(counts.size());
    for (std::size_t a = 0; a < counts.size(); ++a) empirical[a] = static_cast<double>(counts[a]) / static_cast<double>(lisse);
    report.values["tv_model"] = total_variation(empirical, law.probabilities);
    report.values["walk_law_source"] = law.source;
    ReportTable table{"model_law", {"a", "empirical", "model"}, {}};
    for (Elem a = 0; a < counts.size(); ++a) table.rows.push_back({r.format(a), empirical[a], law.probabilities[a]});
    report.tables.push_back(std::move(table));
  } catch (const BudgetError& ex) {
    report.values["tv_model"] = nullptr;
    report.values["tv_model_skipped"] = ex.what();
  }
}

/// The two summands of the equidistribution error for L = |I| shifts.
std::vector<Bound> equidistribution_bounds(const ExperimentConfig& config, const TraceFunction& t, u64 L,
                                           nlohmann::json& values) {
  const double Q = static_cast<double>(t.codomain().order());
  const double sqrt_q = std::sqrt(static_cast<double>(t.domain().order()));
  const double Ld = static_cast<double>(L);
  const GroupSpec& group = t.group();
  if (group.classical()) {
    const auto c = constants(group);
    const double alpha = boost::rational_cast<double>(c.alpha);
    const double exponent = Ld * boost::rational_cast<double>(c.beta_plus) + 2.0 * boost::rational_cast<double>(c.beta_minus) - 1.0;
    values["alpha"] = alpha;
    values["alpha_source"] = "table";
    return {{"model_term", std::pow(Q, -Ld * alpha)}, {"sheaf_term", Ld * std::pow(Q, exponent) / sqrt_q}};
  }
  const double d = static_cast<double>(group.size);
  const double delta = effective_delta(config, std::log(d) / std::log(Q));
  double alpha = 0.0;
  if (auto explicit_value = explicit_alpha(delta, t.codomain().degree() == 1)) {
    alpha = *explicit_value;
    values["alpha_source"] = "explicit";
  } else {
    alpha = mu_alpha_empirical(t.codomain(), group.size).alpha;
    values["alpha_source"] = "empirical";
  }
  values["alpha"] = alpha;
  values["delta"] = delta;
  const double scale = error_scale(group, L);
  return {{"model_term", std::pow(Q, -Ld * alpha)},
          {"sheaf_term", Ld * scale / (sqrt_q * std::pow(Q, std::min(Ld * alpha, 1.0)))}};
}

double sum_bounds(std::span<const Bound> bounds) {
  double s = 0.0;
  for (const auto& b : bounds) s += b.value;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

ExperimentReport cmd_equidist_shift(const ExperimentConfig& config) {
  const TraceFunction t = build_trace_function(config);
  const Field& f = t.domain();
  const auto subset = parse_elements(f, config.set);
  require(!subset.empty(), "the shift set I must be nonempty");
  if (t.kind() == TraceKind::kummer && t.rational_function().degree() > 1 && subset.size() > 1) {
    require(kummer_compatible(f, subset, numerator_degree(t)),
            "Kummer sheaf is not I-compatible: some sum of at most deg(f1) elements of I vanishes");
  }
  ExperimentReport report = base_report(config, t);
  const auto counts = shift_sum_counts(t, subset);
  report.tables.push_back(density_table(t.codomain(), counts, f.order()));
  report.max_deviation = max_deviation(counts, f.order());
  add_mass_verdict(report, counts, f.order());
  report.bounds = equidistribution_bounds(config, t, subset.size(), report.values);
  add_bound_verdict(report, config, "deviation_within_bound", *report.max_deviation, sum_bounds(report.bounds));
  add_model_comparison(report, t, subset);
  return report;
}

ExperimentReport cmd_shift_subsets(const ExperimentConfig& config) {
  const TraceFunction t = build_trace_function(config);
  const Field& f = t.domain();
  const auto subset = parse_elements(f, config.set);
  require(!subset.empty(), "the subset E must be nonempty");
  const double q = static_cast<double>(f.order());
  const double delta = effective_delta(config, 0.5);
  const u64 box = bounding_box_size(f, subset);
  const double box_cap = std::pow(q, 0.5 - config.epsilon);
  require(static_cast<double>(box) < box_cap,
          "bounding box |B_E| = " + std::to_string(box) + " is not below q^(1/2 - epsilon) = " + std::to_string(box_cap));
  for (Elem x : subset) {
    for (u64 c : coordinates(f, x)) {
      require(static_cast<double>(c) < delta * static_cast<double>(f.characteristic()),
              "B_E leaves [0, delta p)^e: coordinate " + std::to_string(c));
    }
  }
  require_kummer_delta(t, delta);

  ExperimentReport report = base_report(config, t);
  report.values["bounding_box"] = box;
  report.values["delta"] = delta;
  const auto counts = shift_sum_counts(t, subset);
  report.tables.push_back(density_table(t.codomain(), counts, f.order()));
  report.max_deviation = max_deviation(counts, f.order());
  add_mass_verdict(report, counts, f.order());
  const double E = static_cast<double>(subset.size());
  report.bounds = {{"power_saving", std::pow(q, -(0.25 - config.epsilon / 2.0))},
                   {"size_term", std::sqrt(E * log_group_scale(t) / std::log(q))}};
  add_bound_verdict(report, config, "deviation_within_bound", *report.max_deviation, sum_bounds(report.bounds));
  return report;
}

ExperimentReport cmd_partial_intervals(const ExperimentConfig& config) {
  require(config.e == 1, "partial intervals need a prime field (e = 1); the method does not extend to boxes");
  const TraceFunction t = build_trace_function(config);
  const Field& f = t.domain();
  const Field& r = t.codomain();
  const u64 p = f.characteristic();

  u64 last = p;
  if (t.kind() == TraceKind::kummer && numerator_degree(t) > 1) {
    require(config.delta.has_value(), "Kummer partial intervals with deg(f1) > 1 need --delta");
    require_kummer_delta(t, *config.delta);
    last = static_cast<u64>(std::ceil(*config.delta * static_cast<double>(p))) - 1;
    require(last >= 1, "delta p is too small to hold an interval");
  }

  std::vector<u64> counts(r.order(), 0);
  Elem running = 0;
  for (u64 k = 1; k <= last; ++k) {
    running = r.add(running, t(f.from_int(static_cast<i64>(k))));
    ++counts[running];
  }
  Elem full = 0;
  for (Elem x = 0; x < f.order(); ++x) full = r.add(full, t(x));

  ExperimentReport report = base_report(config, t);
  report.values["interval_count"] = last;
  report.values["full_sum"] = r.format(full);
  report.values["full_sum_vanishes"] = full == 0;
  report.tables.push_back(density_table(r, counts, last));
  report.max_deviation = max_deviation(counts, last);
  add_mass_verdict(report, counts, last);

  const double pd = static_cast<double>(p);
  const double Q = static_cast<double>(r.order());
  const double scale = log_group_scale(t);
  report.bounds = {{"power_saving", std::pow(pd, -(0.25 - config.epsilon / 2.0))},
                   {"log_ratio", std::sqrt(scale / std::log(pd))}};
  if (full != 0) report.bounds.push_back({"full_sum_term", std::sqrt(Q * std::log(pd) / (pd * scale))});
  add_bound_verdict(report, config, "deviation_within_bound", *report.max_deviation, sum_bounds(report.bounds));
  const double baseline = std::sqrt(Q / std::log(pd));
  report.values["baseline"] = baseline;
  add_bound_verdict(report, config, "deviation_within_baseline", *report.max_deviation, baseline);
  return report;
}

ExperimentReport cmd_partial_interval_shifts(const ExperimentConfig& config) {
  require(config.e >= 2, "partial intervals with shifts need e >= 2");
  const TraceFunction t = build_trace_function(config);
  const Field& f = t.domain();
  const Field& r = t.codomain();
  const u64 p = f.characteristic();
  const std::size_t slices = static_cast<std::size_t>(config.e - 1);

  std::vector<std::vector<u64>> sets = config.coordinate_sets;
  if (sets.empty()) sets.assign(slices, {1});
  require(sets.size() == slices, "need exactly e-1 coordinate sets E_2..E_e");
  const double delta = effective_delta(config, 0.5);
  u64 box = 1;
  u64 product = 1;
  for (auto& s : sets) {
    require(!s.empty(), "coordinate sets must be nonempty");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (u64 v : s) {
      require(v >= 1 && static_cast<double>(v) < delta * static_cast<double>(p),
              "E_i must lie in [1, delta p): element " + std::to_string(v));
    }
    box *= s.back() - s.front() + 1;
    product *= s.size();
  }
  const double q = static_cast<double>(f.order());
  require(static_cast<double>(box) <= std::pow(q, 0.5 - config.epsilon), "bounding box of E exceeds q^(1/2 - epsilon)");
  require_kummer_delta(t, delta);

  // Offsets of prod E_i in the coordinates 2..e.
  std::vector<std::vector<u64>> offsets{{}};
  for (const auto& s : sets) {
    std::vector<std::vector<u64>> next;
    for (const auto& o : offsets) {
      for (u64 v : s) {
        auto w = o;
        w.push_back(v);
        next.push_back(std::move(w));
      }
    }
    offsets = std::move(next);
  }

  std::vector<u64> counts(r.order(), 0);
  std::vector<u64> coords(static_cast<std::size_t>(config.e));
  std::vector<u64> tail(slices, 1);
  u64 total = 0;
  while (true) {
    Elem running = 0;
    for (u64 x1 = 1; x1 <= p; ++x1) {
      coords[0] = x1;
      for (const auto& o : offsets) {
        for (std::size_t i = 0; i < slices; ++i) coords[i + 1] = o[i] + tail[i];
        running = r.add(running, t(from_coordinates(f, coords)));
      }
      ++counts[running];
      ++total;
    }
    std::size_t i = 0;
    while (i < slices && tail[i] == p) tail[i++] = 1;
    if (i == slices) break;
    ++tail[i];
  }

  ExperimentReport report = base_report(config, t);
  report.values["bounding_box"] = box;
  report.values["delta"] = delta;
  report.tables.push_back(density_table(r, counts, total));
  report.max_deviation = max_deviation(counts, total);
  add_mass_verdict(report, counts, total);
  report.bounds = {{"power_saving", std::pow(q, -(0.25 - config.epsilon / 2.0))},
                   {"size_term", std::sqrt(static_cast<double>(product) * log_group_scale(t) / std::log(q))}};
  add_bound_verdict(report, config, "deviation_within_bound", *report.max_deviation, sum_bounds(report.bounds));
  return report;
}

ExperimentReport cmd_variance(const ExperimentConfig& config) {
  const TraceFunction t = build_trace_function(config);
  const Field& f = t.domain();
  std::optional<SumFamily> fam;
  if (config.family == "shifted_subset") {
    const auto subset = parse_elements(f, config.set);
    const auto shifts = parse_elements(f, config.shifts);
    require(!subset.empty(), "the subset E must be nonempty");
    require(!shifts.empty(), "the family is empty: give --shifts");
    fam.emplace(make_shifted_subset(f, subset, shifts));
  } else if (config.family == "intervals") {
    require(!config.sizes.empty(), "the family is empty: give --sizes");
    fam.emplace(make_intervals(f, config.sizes));
  } else {
    throw PreconditionError("variance supports the shifted_subset and intervals families, not '" + config.family + "'");
  }

  const FamilyStats st = stats(*fam, config.workers);
  const VarianceResult v = averaged_variance(t, *fam, config.restrict_lisse, config.workers);

  ExperimentReport report = base_report(config, t);
  report.values["family"] = fam->to_json();
  report.values["family_size"] = st.family_size;
  report.values["variance"] = v.value;
  report.values["variance_numerator"] = v.numerator.str();
  report.values["variance_denominator"] = v.denominator.str();
  report.values["variance_times_family_size"] = v.value * static_cast<double>(st.family_size);
  report.values["shift_count"] = v.shift_count;
  report.values["sqrt_variance"] = std::sqrt(v.value);
  report.max_deviation = v.max_averaged_deviation;

  ReportTable averaged{"averaged_density", {"a", "count", "density"}, {}};
  const u64 denom = v.shift_count * v.family_size;
  for (Elem a = 0; a < v.averaged_counts.size(); ++a) {
    averaged.rows.push_back({t.codomain().format(a), v.averaged_counts[a],
                             denom ? static_cast<double>(v.averaged_counts[a]) / static_cast<double>(denom) : 0.0});
  }
  report.tables.push_back(std::move(averaged));

  ReportTable stats_table{"family_stats", {"d", "g", "h"}, {}};
  std::map<u64, std::pair<u64, u64>> merged;
  for (const auto& [d, c] : st.size_counts) merged[d].first = c;
  for (const auto& [d, c] : st.difference_counts) merged[d].second = c;
  for (const auto& [d, gh] : merged) stats_table.rows.push_back({d, gh.first, gh.second});
  report.tables.push_back(std::move(stats_table));

  report.verdicts.push_back({"cauchy_schwarz", v.max_averaged_deviation, std::sqrt(v.value), v.cauchy_schwarz_holds, true});
  const u64 K = st.family_size;
  report.verdicts.push_back({"union_size", static_cast<double>(st.union_size), static_cast<double>(K * st.max_member),
                             st.union_size <= K * st.max_member, true});
  if (K >= 2) {
    report.verdicts.push_back({"min_difference", static_cast<double>(st.min_difference), 2.0 * static_cast<double>(st.union_size),
                               st.min_difference >= 1 && st.min_difference <= 2 * st.union_size, true});
  }
  u64 pairs = 0;
  for (const auto& [d, c] : st.difference_counts) pairs += c;
  report.verdicts.push_back({"difference_pairs", static_cast<double>(pairs), static_cast<double>(K * (K - 1)), pairs == K * (K - 1), true});

  try {
    const auto prediction = model_family_stats(t.group(), st);
    report.values["model_variance"] = prediction.model_variance;
    report.values["variance_ratio"] = v.value / prediction.model_variance;
    report.values["expected_density_error"] = prediction.expected_density_error;
    const double envelope = static_cast<double>(st.union_size) * error_scale(t.group(), st.union_size) /
                            std::sqrt(static_cast<double>(f.order()));
    report.bounds.push_back({"model_envelope", envelope});
    add_bound_verdict(report, config, "variance_matches_model", std::abs(v.value / prediction.model_variance - 1.0), envelope);
  } catch (const BudgetError& ex) {
    report.values["model_variance"] = nullptr;
    report.values["model_skipped"] = ex.what();
  }
  return report;
}

namespace {

GroupSpec model_group(const ExperimentConfig& config) {
  require(is_prime(config.ell), "ell = " + std::to_string(config.ell) + " is not prime");
  require(config.m >= 1, "residue degree m must be positive");
  const Field residue = Field::make(config.ell, static_cast<int>(config.m));
  const GroupKind kind = parse_group_kind(config.group);
  const u64 size = kind == GroupKind::mu ? config.d.value_or(2) : config.n;
  return GroupSpec(kind, size, residue);
}

}  // namespace

ExperimentReport cmd_model(const ExperimentConfig& config) {
  const GroupSpec group = model_group(config);
  const Field& r = group.field;
  ExperimentReport report;
  report.config = config.to_json();
  report.values["group"] = group.to_json();

  const WalkLaw exact = walk_law_exact(group, config.steps);
  report.values["mass"] = exact.mass();
  report.values["max_imaginary"] = exact.max_imaginary;
  report.values["gaussian_sum_source"] = exact.source;
  report.verdicts.push_back({"unit_mass", exact.mass(), 1.0, std::abs(exact.mass() - 1.0) <= 1e-9, true});
  report.verdicts.push_back({"real_law", exact.max_imaginary, 1e-9, exact.max_imaginary <= 1e-9, true});

  std::vector<double> uniform(r.order(), 1.0 / static_cast<double>(r.order()));
  const double tv = total_variation(exact.probabilities, uniform);
  const auto sums = gaussian_sums(group);
  const double order = group_order(group).convert_to<double>();
  double max_mu = 0.0;
  for (u64 b = 1; b < r.order(); ++b) max_mu = std::max(max_mu, std::abs(sums.values[b]) / order);
  const double tv_bound = static_cast<double>(r.order() - 1) * std::pow(max_mu, static_cast<double>(config.steps));
  report.values["tv_to_uniform"] = tv;
  report.values["max_normalized_gaussian_sum"] = max_mu;
  report.bounds.push_back({"tv_fourier", tv_bound});
  report.verdicts.push_back({"tv_within_fourier_bound", tv, tv_bound, tv <= tv_bound + 1e-12, true});

  std::optional<WalkLaw> enumerated;
  const EnumerationLimits limits;
  try {
    if (group_order(group) > BigInt(limits.max_elements) || r.order() > 256) {
      throw BudgetError("group or residue field too large for exhaustive enumeration");
    }
    enumerated = walk_law_enumerated(group, config.steps);
    double diff = 0.0;
    for (u64 a = 0; a < r.order(); ++a) diff = std::max(diff, std::abs(exact.probabilities[a] - enumerated->probabilities[a]));
    report.values["exact_vs_enumerated_double"] = diff;
    const WalkLaw fourier = walk_law_fourier_rational(group, config.steps);
    u64 mismatches = 0;
    for (u64 a = 0; a < r.order(); ++a) {
      if ((*fourier.numerators)[a] * enumerated->denominator != (*enumerated->numerators)[a] * fourier.denominator) ++mismatches;
    }
    report.values["exact_vs_enumerated_max_diff"] = mismatches == 0 ? 0.0 : diff;
    report.verdicts.push_back({"fourier_equals_enumeration", static_cast<double>(mismatches), 0.0, mismatches == 0, true});
    report.verdicts.push_back({"double_formula_matches_enumeration", diff, 1e-9, diff <= 1e-9, true});
  } catch (const BudgetError& ex) {
    report.values["enumeration_skipped"] = ex.what();
  }

  std::optional<WalkLaw> mc;
  if (config.trials > 0) {
    Rng rng = split_stream(config.seed, 0);
    mc = walk_law_mc(group, config.steps, config.trials, rng);
    double diff = 0.0;
    for (u64 a = 0; a < r.order(); ++a) diff = std::max(diff, std::abs(exact.probabilities[a] - mc->probabilities[a]));
    const double envelope = std::sqrt(std::log(static_cast<double>(r.order())) / static_cast<double>(config.trials));
    report.values["mc_max_diff"] = diff;
    report.bounds.push_back({"mc_envelope", envelope});
    report.verdicts.push_back({"mc_within_envelope", diff, 5.0 * envelope, diff <= 5.0 * envelope, false});
  }

  ReportTable table{"walk_law", {"a", "exact"}, {}};
  if (enumerated) table.columns.push_back("enumerated");
  if (mc) table.columns.push_back("monte_carlo");
  for (Elem a = 0; a < r.order(); ++a) {
    std::vector<nlohmann::json> row{r.format(a), exact.probabilities[a]};
    if (enumerated) row.push_back(enumerated->probabilities[a]);
    if (mc) row.push_back(mc->probabilities[a]);
    table.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(table));
  report.max_deviation = tv;
  return report;
}

ExperimentReport cmd_gauss_sum(const ExperimentConfig& config) {
  const GroupSpec group = model_group(config);
  const Field& r = group.field;
  ExperimentReport report;
  report.config = config.to_json();
  report.values["group"] = group.to_json();

  std::vector<Elem> targets;
  if (config.a) {
    require(*config.a >= 1 && *config.a < r.order(), "a must be a nonzero element index of the residue field");
    targets.push_back(static_cast<Elem>(*config.a));
  } else {
    for (Elem a = 1; a < r.order(); ++a) targets.push_back(a);
  }

  std::optional<std::vector<u64>> hist;
  try {
    hist = trace_histogram(group);
  } catch (const BudgetError& ex) {
    report.values["brute_skipped"] = ex.what();
  }

  ReportTable sums_table{"gaussian_sums", {"group", "Q", "a", "real", "imag", "source"}, {}};
  ReportTable diff_table{"closed_vs_brute", {"a", "closed_real", "closed_imag", "brute_real", "brute_imag", "diff"}, {}};
  double worst = 0.0;
  std::optional<std::complex<double>> first_closed;
  bool a_independent = true;
  for (Elem a : targets) {
    const auto closed = gaussian_sum_closed(group, a);
    std::optional<std::complex<double>> brute;
    if (hist) {
      std::complex<double> acc = 0.0;
      for (Elem t = 0; t < hist->size(); ++t) {
        if ((*hist)[t] != 0) acc += static_cast<double>((*hist)[t]) * residue_character(r, a, t);
      }
      brute = acc;
    }
    if (closed) sums_table.rows.push_back({group.name(), r.order(), r.format(a), closed->real(), closed->imag(), "closed"});
    if (brute) sums_table.rows.push_back({group.name(), r.order(), r.format(a), brute->real(), brute->imag(), "brute"});
    if (closed && brute) {
      const double diff = std::abs(*closed - *brute);
      worst = std::max(worst, diff / std::max(1.0, std::abs(*brute)));
      diff_table.rows.push_back({r.format(a), closed->real(), closed->imag(), brute->real(), brute->imag(), diff});
    }
    if (group.kind == GroupKind::GL && closed) {
      if (!first_closed) first_closed = closed;
      if (brute && std::abs(*brute - *first_closed) > 1e-6 * std::max(1.0, std::abs(*first_closed))) a_independent = false;
    }
  }
  report.tables.push_back(std::move(sums_table));
  report.tables.push_back(std::move(diff_table));
  report.values["max_relative_diff"] = worst;
  report.values["closed_form_available"] = gaussian_sum_closed(group, targets.front()).has_value();
  report.max_deviation = worst;
  if (hist && report.values["closed_form_available"].get<bool>()) {
    report.verdicts.push_back({"closed_matches_brute", worst, 1e-6, worst <= 1e-6, true});
  }
  if (group.kind == GroupKind::GL && hist) {
    report.verdicts.push_back({"gl_sum_independent_of_a", a_independent ? 0.0 : 1.0, 0.0, a_independent, true});
  }
  return report;
}

std::vector<std::string> experiment_names() {
  return {"equidist-shift", "partial-intervals", "shift-subsets", "partial-interval-shifts", "variance", "model", "gauss-sum"};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  static const std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>> commands{
      {"equidist-shift", cmd_equidist_shift}, {"partial-intervals", cmd_partial_intervals},
      {"shift-subsets", cmd_shift_subsets},   {"partial-interval-shifts", cmd_partial_interval_shifts},
      {"variance", cmd_variance},             {"model", cmd_model},
      {"gauss-sum", cmd_gauss_sum}};
  const auto it = commands.find(config.experiment);
  if (it == commands.end()) throw PreconditionError("unknown experiment '" + config.experiment + "'");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = it->second(config);
  if (config.timing) report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace tracelab
