#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tracelab/errors.hpp"
#include "tracelab/experiments.hpp"

using namespace tracelab;

namespace {

ExperimentConfig legendre(const std::string& experiment, u64 p, u64 ell = 3) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.p = p;
  c.ell = ell;
  c.kind = "kummer";
  c.chi_order = 2;
  return c;
}

ExperimentConfig kloosterman_config(const std::string& experiment, u64 p, int e, u64 d, u64 ell) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.p = p;
  c.e = e;
  c.d = d;
  c.ell = ell;
  c.kind = "kloosterman";
  c.n = 2;
  return c;
}

ExperimentConfig model_config(const std::string& experiment, const std::string& group, u64 n, u64 ell, u64 m = 1) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.group = group;
  c.n = n;
  c.ell = ell;
  c.m = m;
  return c;
}

std::vector<u64> density_counts(const ExperimentReport& r) {
  std::vector<u64> out;
  for (const auto& row : r.table("density").rows) out.push_back(row[1].get<u64>());
  return out;
}

// Legendre symbol reduced into F_3 (-1 becomes 2), by Euler's criterion.
u64 legendre_mod3(u64 x, u64 p) {
  if (x % p == 0) return 0;
  u64 result = 1, base = x % p, exp = (p - 1) / 2;
  while (exp) {
    if (exp & 1) result = result * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return result == 1 ? 1 : 2;
}

const Verdict& verdict(const ExperimentReport& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return v;
  FAIL("missing verdict " << name);
  throw std::logic_error("unreachable");
}

bool has_bound(const ExperimentReport& r, const std::string& name) {
  return std::any_of(r.bounds.begin(), r.bounds.end(), [&](const Bound& b) { return b.name == name; });
}

}  // namespace

TEST_CASE("report JSON follows the published schema") {
  auto c = legendre("equidist-shift", 101);
  const auto j = run_experiment(c).to_json();
  CHECK(j.contains("config"));
  CHECK(j["config"]["experiment"] == "equidist-shift");
  REQUIRE(j["tables"].is_array());
  for (const auto& t : j["tables"]) {
    CHECK(t.contains("name"));
    CHECK(t["columns"].is_array());
    CHECK(t["rows"].is_array());
  }
  CHECK(j["summary"].contains("max_deviation"));
  CHECK(j["summary"]["bounds"].is_array());
  CHECK(j["summary"]["verdicts"].is_array());
  CHECK(j["timing"].is_null());

  c.timing = true;
  CHECK(run_experiment(c).to_json()["timing"]["seconds"].is_number());
}

TEST_CASE("Legendre shift density on F_10007 has three rows summing to one") {
  const auto r = run_experiment(legendre("equidist-shift", 10007));
  const auto& t = r.table("density");
  CHECK(t.rows.size() == 3);
  CHECK(density_counts(r) == std::vector<u64>{1, 5003, 5003});
  double mass = 0.0;
  for (const auto& row : t.rows) mass += row[2].get<double>();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(verdict(r, "densities_sum_to_one").pass);
  CHECK(r.exact_checks_pass());
}

TEST_CASE("densities sum to one in every report") {
  std::vector<ExperimentConfig> configs;
  configs.push_back(legendre("equidist-shift", 1009));
  configs.push_back(legendre("partial-intervals", 1009));
  auto shifted = legendre("shift-subsets", 1009);
  shifted.set = {"0", "2"};
  configs.push_back(shifted);
  auto pis = legendre("partial-interval-shifts", 7);
  pis.e = 2;
  configs.push_back(pis);
  configs.push_back(kloosterman_config("equidist-shift", 13, 2, 13, 3));
  auto hyper = legendre("equidist-shift", 11);
  hyper.kind = "hyperelliptic";
  hyper.f = {-1, 0, 1};
  hyper.normalized = false;
  configs.push_back(hyper);
  for (const auto& c : configs) {
    CAPTURE(c.to_json().dump());
    const auto r = run_experiment(c);
    const auto counts = density_counts(r);
    const u64 sum = std::accumulate(counts.begin(), counts.end(), u64{0});
    double mass = 0.0;
    for (const auto& row : r.table("density").rows) mass += row[2].get<double>();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(static_cast<double>(sum) == verdict(r, "densities_sum_to_one").threshold);
    CHECK(verdict(r, "densities_sum_to_one").pass);
  }
}

TEST_CASE("shift subsets with E = {0} reproduce the equidistribution run") {
  for (u64 p : {101u, 1009u}) {
    const auto a = run_experiment(legendre("equidist-shift", p));
    const auto b = run_experiment(legendre("shift-subsets", p));
    CHECK(a.table("density").rows == b.table("density").rows);
    CHECK(*a.max_deviation == *b.max_deviation);
  }
  const auto a = run_experiment(kloosterman_config("equidist-shift", 13, 2, 13, 3));
  const auto b = run_experiment(kloosterman_config("shift-subsets", 13, 2, 13, 3));
  CHECK(a.table("density").rows == b.table("density").rows);
}

TEST_CASE("partial intervals match a direct Legendre running sum") {
  for (u64 p : {1009u, 10007u}) {
    std::vector<u64> counts(3, 0);
    u64 running = 0;
    for (u64 k = 1; k <= p; ++k) {
      running = (running + legendre_mod3(k, p)) % 3;
      ++counts[running];
    }
    const auto r = run_experiment(legendre("partial-intervals", p));
    CHECK(density_counts(r) == counts);
    double worst = 0.0;
    for (u64 c : counts) worst = std::max(worst, std::abs(static_cast<double>(c) / static_cast<double>(p) - 1.0 / 3.0));
    CHECK(*r.max_deviation == doctest::Approx(worst).epsilon(1e-15));
  }
}

TEST_CASE("pinned Legendre partial-interval deviations") {
  const double p1009 = *run_experiment(legendre("partial-intervals", 1009)).max_deviation;
  const double p10007 = *run_experiment(legendre("partial-intervals", 10007)).max_deviation;
  const double p100003 = *run_experiment(legendre("partial-intervals", 100003)).max_deviation;
  CHECK(p1009 == doctest::Approx(0.012553683515031389).epsilon(1e-12));
  CHECK(p10007 == doctest::Approx(0.010126244961860043).epsilon(1e-12));
  CHECK(p100003 == doctest::Approx(0.000486652067104687).epsilon(1e-12));
  CHECK(p100003 < p1009);
  for (double dev : {p10007, p100003}) CHECK(dev <= 2.0 * std::sqrt(3.0 / std::log(10007.0)));
}

TEST_CASE("a full character sum that vanishes drops the third summand") {
  auto c = legendre("partial-intervals", 10061, 11);
  c.chi_order = 5;
  const auto r = run_experiment(c);
  CHECK(r.values["full_sum_vanishes"].get<bool>());
  CHECK(r.values["full_sum"] == "0");
  CHECK_FALSE(has_bound(r, "full_sum_term"));
  CHECK(r.table("density").rows.size() == 11);

  auto shifted = legendre("equidist-shift", 10061, 11);
  shifted.chi_order = 5;
  shifted.set = {"0", "1"};
  const auto s = run_experiment(shifted);
  CHECK(has_bound(s, "model_term"));
  CHECK(has_bound(s, "sheaf_term"));
  CHECK(s.max_deviation.has_value());
}

TEST_CASE("Kloosterman shift subsets report both error summands") {
  auto c = kloosterman_config("shift-subsets", 13, 4, 13, 3);
  c.set = {"0", "1"};
  const auto r = run_experiment(c);
  CHECK(has_bound(r, "power_saving"));
  CHECK(has_bound(r, "size_term"));
  CHECK(r.values["bounding_box"] == 2);
  CHECK(*r.max_deviation == doctest::Approx(0.004895305304954828).epsilon(1e-12));
}

TEST_CASE("Kloosterman model trend from e = 2 to e = 4") {
  std::vector<double> tv;
  for (int e : {2, 3, 4}) {
    const auto r = run_experiment(kloosterman_config("equidist-shift", 13, e, 13, 3));
    CHECK(r.values["group"]["name"] == "Sp_2(F_27)");
    u64 q = 1;
    for (int i = 0; i < e; ++i) q *= 13;
    CHECK(r.values["lisse_shift_count"].get<u64>() == q - 1);
    tv.push_back(r.values["tv_model"].get<double>());
  }
  CHECK(tv[0] == doctest::Approx(0.09890109890109886).epsilon(1e-12));
  CHECK(tv[1] == doctest::Approx(0.06781811085089773).epsilon(1e-12));
  CHECK(tv[2] == doctest::Approx(0.020111506140917872).epsilon(1e-12));
  CHECK(tv[2] < tv[0]);
  CHECK(tv[1] < tv[0]);
  CHECK(tv[2] < tv[1]);
}

TEST_CASE("partial interval shifts with E_2 = {1} match a direct double loop") {
  auto c = legendre("partial-interval-shifts", 7);
  c.e = 2;
  const auto r = run_experiment(c);
  const Field f = Field::make(7, 2);
  const u64 q = f.order();
  std::vector<u64> counts(3, 0);
  for (u64 x2 = 1; x2 <= 7; ++x2) {
    u64 running = 0;
    for (u64 x1 = 1; x1 <= 7; ++x1) {
      const Elem y = static_cast<Elem>(x1 % 7 + 7 * ((1 + x2) % 7));
      if (y != 0) running = (running + (f.pow(y, static_cast<i64>((q - 1) / 2)) == 1 ? 1 : 2)) % 3;
      ++counts[running];
    }
  }
  CHECK(density_counts(r) == counts);
}

TEST_CASE("Kloosterman partial interval shifts over F_25 run end to end") {
  const auto r = run_experiment(kloosterman_config("partial-interval-shifts", 5, 2, 20, 3));
  CHECK(r.values["context"]["m"] == 4);
  CHECK(r.table("density").rows.size() == 81);
  CHECK(*r.max_deviation == doctest::Approx(0.38765432098765434).epsilon(1e-12));
  CHECK(r.exact_checks_pass());
}

TEST_CASE("variance run on a three-member Legendre family") {
  auto c = legendre("variance", 10007);
  c.family = "shifted_subset";
  c.set = {"0", "1"};
  c.shifts = {"0", "1", "2"};
  const auto r = run_experiment(c);
  const double scaled = r.values["variance_times_family_size"].get<double>();
  CHECK(scaled >= 0.5);
  CHECK(scaled <= 2.0);
  CHECK(r.values["variance_numerator"] == "246924");
  CHECK(r.values["variance_denominator"] == "810567");
  CHECK(verdict(r, "cauchy_schwarz").pass);
  CHECK(*r.max_deviation <= std::sqrt(r.values["variance"].get<double>()));
  CHECK(r.exact_checks_pass());

  c.workers = 4;
  auto r4 = run_experiment(c).to_json();
  auto r1 = r.to_json();
  r4["config"].erase("workers");
  r1["config"].erase("workers");
  CHECK(r4 == r1);
}

TEST_CASE("Cauchy-Schwarz holds across variance runs") {
  std::vector<ExperimentConfig> configs;
  for (u64 p : {101u, 1009u}) {
    auto c = legendre("variance", p);
    c.family = "intervals";
    c.sizes = {1, 2, 3, 5, 8};
    configs.push_back(c);
    c.family = "shifted_subset";
    c.set = {"0", "1", "3"};
    c.shifts = {"0", "1", "2", "3"};
    configs.push_back(c);
    c.restrict_lisse = true;
    configs.push_back(c);
  }
  auto kl = kloosterman_config("variance", 13, 2, 13, 3);
  kl.family = "shifted_subset";
  kl.set = {"0", "1"};
  kl.shifts = {"0", "1", "2"};
  configs.push_back(kl);
  for (const auto& c : configs) {
    CAPTURE(c.to_json().dump());
    const auto r = run_experiment(c);
    CHECK(verdict(r, "cauchy_schwarz").pass);
    CHECK(verdict(r, "union_size").pass);
    CHECK(verdict(r, "difference_pairs").pass);
    CHECK(r.exact_checks_pass());
  }
}

TEST_CASE("variance rejects empty families") {
  auto c = legendre("variance", 101);
  c.family = "shifted_subset";
  c.shifts = {};
  CHECK_THROWS_AS(run_experiment(c), PreconditionError);
  c.family = "intervals";
  CHECK_THROWS_AS(run_experiment(c), PreconditionError);
  c.family = "boxes";
  CHECK_THROWS_AS(run_experiment(c), PreconditionError);
}

TEST_CASE("model run: SL_2(F_3) two-step law matches enumeration") {
  auto c = model_config("model", "SL", 2, 3);
  c.steps = 2;
  const auto r = run_experiment(c);
  CHECK(r.values["exact_vs_enumerated_max_diff"].get<double>() == 0.0);
  CHECK(verdict(r, "fourier_equals_enumeration").pass);
  CHECK(r.exact_checks_pass());
  // Trace histogram (6, 9, 9) over 24^2 pairs gives (198, 189, 189) / 576.
  const auto& rows = r.table("walk_law").rows;
  CHECK(rows[0][2].get<double>() == doctest::Approx(198.0 / 576.0));
  CHECK(rows[1][2].get<double>() == doctest::Approx(189.0 / 576.0));
}

TEST_CASE("model Monte Carlo is reproducible from the seed") {
  auto c = model_config("model", "SL", 2, 5);
  c.steps = 3;
  c.trials = 20000;
  c.seed = 42;
  CHECK(run_experiment(c).to_json().dump() == run_experiment(c).to_json().dump());
  auto other = c;
  other.seed = 43;
  CHECK(run_experiment(c).to_json() != run_experiment(other).to_json());
}

TEST_CASE("gauss-sum run: GL_2(F_3)") {
  const auto r = run_experiment(model_config("gauss-sum", "GL", 2, 3));
  for (const auto& row : r.table("closed_vs_brute").rows) {
    CHECK(row[1].get<double>() == doctest::Approx(3.0));
    CHECK(row[3].get<double>() == doctest::Approx(3.0));
    CHECK(row[5].get<double>() <= 1e-12);
  }
  CHECK(verdict(r, "gl_sum_independent_of_a").pass);
  CHECK(verdict(r, "closed_matches_brute").pass);
  auto one = model_config("gauss-sum", "GL", 2, 3);
  one.a = 0;
  CHECK_THROWS_AS(run_experiment(one), PreconditionError);
}

TEST_CASE("configuration round trips through JSON") {
  auto c = kloosterman_config("shift-subsets", 13, 3, 13, 3);
  c.set = {"0", "1"};
  c.shifts = {"2"};
  c.sizes = {1, 4};
  c.coordinate_sets = {{1, 2}};
  c.delta = 0.25;
  c.a = 2;
  c.seed = 77;
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json{{"p", "seven"}}), PreconditionError);
}

TEST_CASE("rerunning an echoed config reproduces the report") {
  std::vector<ExperimentConfig> configs{legendre("partial-intervals", 1009), kloosterman_config("equidist-shift", 13, 2, 13, 3)};
  auto model = model_config("model", "Sp", 2, 3, 2);
  model.trials = 5000;
  model.seed = 9;
  configs.push_back(model);
  for (const auto& c : configs) {
    const auto first = run_experiment(c).to_json();
    const auto again = run_experiment(ExperimentConfig::from_json(first["config"])).to_json();
    CHECK(first.dump() == again.dump());
  }
}

TEST_CASE("reports write JSON and CSV files") {
  const auto dir = std::filesystem::temp_directory_path() / "tracelab_report_test";
  std::filesystem::remove_all(dir);
  run_experiment(legendre("equidist-shift", 101)).write(dir);
  std::ifstream json_in(dir / "report.json");
  REQUIRE(json_in);
  CHECK(nlohmann::json::parse(json_in)["config"]["p"] == 101);
  std::ifstream csv(dir / "density.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "a,count,density");
  std::filesystem::remove_all(dir);

  ReportTable t{"t", {"x", "y"}, {{"a,b", 1}, {"say \"hi\"", 2}}};
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "x,y\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n");
}

TEST_CASE("default cyclotomic orders") {
  ExperimentConfig c;
  c.kind = "kummer";
  c.chi_order = 5;
  CHECK(default_context_order(c) == 5);
  c.kind = "kloosterman";
  c.p = 13;
  CHECK(default_context_order(c) == 13);
  c.p = 7;
  CHECK(default_context_order(c) == 28);
  c.n = 3;
  CHECK(default_context_order(c) == 7);
  c.n = 2;
  c.normalized = false;
  CHECK(default_context_order(c) == 7);
  c.kind = "hyperelliptic";
  CHECK(default_context_order(c) == 1);
  c.normalized = true;
  CHECK(default_context_order(c) == 28);
  c.d = 9;
  CHECK(default_context_order(c) == 9);
  c.d.reset();
  c.kind = "elliptic";
  CHECK_THROWS_AS(default_context_order(c), PreconditionError);
}

TEST_CASE("Kummer compatibility agrees with brute-force subset sums") {
  const Field f = Field::make(11, 1);
  for (u64 mask = 1; mask < (1u << 5); ++mask) {
    std::vector<Elem> subset;
    for (Elem x = 0; x < 5; ++x)
      if (mask >> x & 1) subset.push_back(x * 2 + 1);
    for (u64 terms = 1; terms <= 3; ++terms) {
      // Any multiset of 1..terms elements summing to zero mod 11.
      bool vanishing = false;
      for (Elem a : subset) {
        if (a % 11 == 0) vanishing = true;
        for (Elem b : subset) {
          if (terms >= 2 && (a + b) % 11 == 0) vanishing = true;
          for (Elem c : subset)
            if (terms >= 3 && (a + b + c) % 11 == 0) vanishing = true;
        }
      }
      CAPTURE(mask);
      CAPTURE(terms);
      CHECK(kummer_compatible(f, subset, terms) == !vanishing);
    }
  }
}

TEST_CASE("configuration errors are preconditions") {
  CHECK_THROWS_AS(run_experiment(legendre("equidist-shift", 9)), PreconditionError);
  CHECK_THROWS_AS(run_experiment(legendre("equidist-shift", 3, 3)), PreconditionError);
  auto bad_order = legendre("equidist-shift", 11);
  bad_order.chi_order = 3;
  CHECK_THROWS_AS(run_experiment(bad_order), PreconditionError);
  auto unknown = legendre("nothing", 11);
  CHECK_THROWS_AS(run_experiment(unknown), PreconditionError);
  auto boxes = legendre("partial-intervals", 11);
  boxes.e = 2;
  CHECK_THROWS_AS(run_experiment(boxes), PreconditionError);
  auto wide = legendre("shift-subsets", 101);
  wide.set = {"0", "60"};
  CHECK_THROWS_AS(run_experiment(wide), PreconditionError);
  auto nonprime = model_config("model", "SL", 2, 4);
  CHECK_THROWS_AS(run_experiment(nonprime), PreconditionError);
  CHECK(experiment_names().size() == 7);
}
