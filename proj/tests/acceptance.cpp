// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "tracelab/cyclo.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/experiments.hpp"
#include "tracelab/families.hpp"
#include "tracelab/model.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/tracefn.hpp"

using namespace tracelab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
};

u64 inverse_mod(u64 a, u64 p) {
  for (u64 b = 1; b < p; ++b)
    if (a * b % p == 1) return b;
  return 0;
}

std::vector<u64> discrete_logs(u64 p) {
  for (u64 g = 2; g < p || p == 2; ++g) {
    std::vector<u64> log(p, 0);
    u64 power = 1, k = 0;
    do {
      log[power] = k++;
      power = power * g % p;
    } while (power != 1);
    if (k == p - 1) return log;
  }
  return std::vector<u64>(p, 0);
}

// (-1)^{n-1} sum over x_1 ... x_n = x of zeta_p^{x_1 + ... + x_n}, exactly in Z[zeta_p].
CycloElement kloosterman_symbolic(u64 p, u64 n, u64 x) {
  std::vector<ZetaTerm> terms;
  const BigInt sign = (n - 1) % 2 == 0 ? 1 : -1;
  std::vector<u64> tuple(n - 1, 1);
  while (true) {
    u64 product = 1, sum = 0;
    for (u64 v : tuple) {
      product = product * v % p;
      sum += v;
    }
    terms.push_back({sign, static_cast<i64>((sum + x * inverse_mod(product, p)) % p)});
    std::size_t i = 0;
    while (i < tuple.size() && tuple[i] == p - 1) tuple[i++] = 1;
    if (i == tuple.size()) break;
    ++tuple[i];
  }
  return cyclo_oracle_value(p, terms);
}

u64 det3(u64 p, const std::array<u64, 9>& m) {
  const u64 a = m[0] * ((m[4] * m[8] + p * p - m[5] * m[7]) % p);
  const u64 b = m[1] * ((m[3] * m[8] + p * p - m[5] * m[6]) % p);
  const u64 c = m[2] * ((m[3] * m[7] + p * p - m[4] * m[6]) % p);
  return (a + p * p - b % (p * p) + c) % p;
}

// Trace histograms of GL_n(F_p) and SL_n(F_p), n in {2, 3}, built row by row: each new row avoids the span of the
// previous ones.
std::pair<std::vector<u64>, std::vector<u64>> linear_histograms(u64 n, u64 p) {
  std::vector<u64> gl(p, 0), sl(p, 0);
  u64 vectors = 1;
  for (u64 i = 0; i < n; ++i) vectors *= p;
  auto row = [&](u64 idx) {
    std::array<u64, 3> r{};
    for (u64 i = 0; i < n; ++i, idx /= p) r[i] = idx % p;
    return r;
  };
  auto in_span = [&](const std::array<u64, 3>& v, const std::vector<std::array<u64, 3>>& basis) {
    if (basis.empty()) return std::all_of(v.begin(), v.begin() + static_cast<long>(n), [](u64 x) { return x == 0; });
    for (u64 s = 0; s < p; ++s) {
      for (u64 t = 0; t < (basis.size() > 1 ? p : 1); ++t) {
        bool equal = true;
        for (u64 i = 0; i < n; ++i) {
          const u64 comb = (s * basis[0][i] + (basis.size() > 1 ? t * basis[1][i] : 0)) % p;
          equal = equal && comb == v[i];
        }
        if (equal) return true;
      }
    }
    return false;
  };
  for (u64 i0 = 1; i0 < vectors; ++i0) {
    const auto r0 = row(i0);
    for (u64 i1 = 0; i1 < vectors; ++i1) {
      const auto r1 = row(i1);
      if (in_span(r1, {r0})) continue;
      if (n == 2) {
        const u64 det = (r0[0] * r1[1] + p * p - r0[1] * r1[0]) % p;
        const u64 tr = (r0[0] + r1[1]) % p;
        ++gl[tr];
        if (det == 1) ++sl[tr];
        continue;
      }
      for (u64 i2 = 0; i2 < vectors; ++i2) {
        const auto r2 = row(i2);
        if (in_span(r2, {r0, r1})) continue;
        const std::array<u64, 9> m{r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]};
        const u64 tr = (m[0] + m[4] + m[8]) % p;
        ++gl[tr];
        if (det3(p, m) == 1) ++sl[tr];
      }
    }
  }
  return {gl, sl};
}

std::complex<double> histogram_sum(u64 p, const std::vector<u64>& hist, u64 a) {
  std::complex<double> acc = 0.0;
  for (u64 t = 0; t < p; ++t) {
    acc += static_cast<double>(hist[t]) *
           std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(a * t % p) / static_cast<double>(p));
  }
  return acc;
}

double relative_error(std::complex<double> value, std::complex<double> reference) {
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

// ---------------------------------------------------------------------------

void criterion_reduction(Outcome& out) {
  u64 kloosterman_checks = 0, kummer_checks = 0;
  for (u64 p : {3u, 5u, 7u, 13u}) {
    const Field field = Field::make(p, 1);
    const auto log = discrete_logs(p);
    for (u64 ell : {3u, 7u, 11u, 13u}) {
      if (ell == p) continue;
      if (residue_degree(p, ell) <= 6) {
        const auto ctx = ResidueContext::build(p, ell);
        for (u64 n : {2u, 3u}) {
          const auto t = kloosterman(n, field, ctx, false);
          for (u64 x = 1; x < p; ++x, ++kloosterman_checks) {
            if (t(static_cast<Elem>(x)) != reduce(kloosterman_symbolic(p, n, x), ctx)) {
              out.fail("Kl_" + std::to_string(n) + " p=" + std::to_string(p) + " ell=" + std::to_string(ell));
            }
          }
        }
      }
      for (u64 d : {2u, 3u, 5u}) {
        if ((p - 1) % d != 0 || ell % d == 0 || residue_degree(d, ell) > 6) continue;
        const auto ctx = ResidueContext::build(d, ell);
        const MultiplicativeCharacter chi(field, d, ctx);
        for (const auto& coeffs : std::vector<std::vector<i64>>{{0, 1}, {1, 0, 1}, {-1, 0, 0, 1}}) {
          const auto t = kummer(chi, {poly::from_ints(field, coeffs), poly::from_ints(field, std::vector<i64>{1})});
          for (u64 x = 1; x < p; ++x, ++kummer_checks) {
            i64 v = 0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = (v * static_cast<i64>(x) + coeffs[i]) % static_cast<i64>(p);
            v = (v + static_cast<i64>(p)) % static_cast<i64>(p);
            // Symbolic chi(f(x)) = zeta_d^{(log_g f(x)) mod d} with g the least primitive root.
            const std::vector<ZetaTerm> term{{1, static_cast<i64>(log[static_cast<u64>(v)] % d)}};
            const CycloElement exact = v == 0 ? CycloElement(d) : cyclo_oracle_value(d, term);
            if (t(static_cast<Elem>(x)) != reduce(exact, ctx)) out.fail("Kummer p=" + std::to_string(p) + " d=" + std::to_string(d));
          }
        }
      }
    }
  }
  out.detail << kloosterman_checks << " Kloosterman and " << kummer_checks << " Kummer values, all exact";
}

void criterion_linear_gauss_sums(Outcome& out) {
  double worst = 0.0;
  u64 sums = 0;
  for (u64 n : {2u, 3u}) {
    for (u64 p : {2u, 3u, 5u}) {
      const auto [gl_hist, sl_hist] = linear_histograms(n, p);
      const GroupSpec gl(GroupKind::GL, n, Field::make(p, 1));
      const GroupSpec sl(GroupKind::SL, n, Field::make(p, 1));
      if (BigInt(std::accumulate(gl_hist.begin(), gl_hist.end(), u64{0})) != group_order(gl)) out.fail("GL enumeration size");
      if (BigInt(std::accumulate(sl_hist.begin(), sl_hist.end(), u64{0})) != group_order(sl)) out.fail("SL enumeration size");
      std::optional<CycloElement> gl_first;
      for (u64 a = 1; a < p; ++a, sums += 2) {
        worst = std::max(worst, relative_error(*gaussian_sum_closed(gl, static_cast<Elem>(a)), histogram_sum(p, gl_hist, a)));
        worst = std::max(worst, relative_error(*gaussian_sum_closed(sl, static_cast<Elem>(a)), histogram_sum(p, sl_hist, a)));
        // Exact sum in Z[zeta_p] for the a-independence check.
        std::vector<BigInt> powers(p, 0);
        for (u64 t = 0; t < p; ++t) powers[a * t % p] += gl_hist[t];
        const auto exact = CycloElement::from_powers(p, std::move(powers));
        if (!gl_first) gl_first = exact;
        if (exact != *gl_first) out.fail("GL sum depends on a for n=" + std::to_string(n) + " p=" + std::to_string(p));
      }
    }
  }
  if (worst > 1e-6) out.fail("relative error " + std::to_string(worst));
  out.detail << sums << " sums, max relative error " << std::scientific << std::setprecision(2) << worst;
}

void criterion_symplectic(Outcome& out) {
  double collapse = 0.0;
  for (auto [p, e] : std::vector<std::pair<u64, int>>{{3, 1}, {5, 1}, {7, 1}, {3, 2}}) {
    const Field f = Field::make(p, e);
    const GroupSpec sp(GroupKind::Sp, 2, f), sl(GroupKind::SL, 2, f);
    for (Elem a = 1; a < f.order(); ++a) {
      collapse = std::max(collapse, relative_error(*gaussian_sum_closed(sp, a), *gaussian_sum_closed(sl, a)));
    }
  }
  if (collapse > 1e-6) out.fail("Sp_2 collapse error " + std::to_string(collapse));

  const GroupSpec sp4(GroupKind::Sp, 4, Field::make(3, 1));
  const auto elements = enumerate_group(sp4);
  if (BigInt(elements.size()) != 51840) out.fail("Sp_4(F_3) enumeration size " + std::to_string(elements.size()));
  const auto sums = gaussian_sums(sp4);
  double kim = 0.0;
  for (Elem a = 1; a < 3; ++a) kim = std::max(kim, relative_error(*gaussian_sum_closed(sp4, a), gaussian_sum_bruteforce(sp4, a)));
  const bool gated = !symplectic_closed_form_enabled(2);
  if (kim > 1e-6 && !gated) out.fail("Kim expansion disagrees with enumeration but is not gated off");
  out.detail << std::scientific << std::setprecision(2) << "Sp_2 collapse error " << collapse << ", Sp_4(F_3) expansion vs "
             << elements.size() << "-element enumeration " << kim << (gated ? " (closed form gated off)" : " (closed form enabled)")
             << ", sums source " << sums.source;
}

void criterion_walk_law(Outcome& out) {
  struct Case {
    GroupSpec group;
    u64 steps;
  };
  const std::vector<Case> exhaustive{{GroupSpec(GroupKind::mu, 3, Field::make(7, 1)), 1},
                                     {GroupSpec(GroupKind::mu, 3, Field::make(7, 1)), 2},
                                     {GroupSpec(GroupKind::mu, 3, Field::make(7, 1)), 3},
                                     {GroupSpec(GroupKind::SL, 2, Field::make(3, 1)), 2}};
  for (const auto& c : exhaustive) {
    const Field& f = c.group.field;
    const auto elements = enumerate_group(c.group);
    // Every L-tuple of group elements.
    std::vector<BigInt> counts(f.order(), 0);
    std::vector<std::size_t> idx(c.steps, 0);
    while (true) {
      Elem s = 0;
      for (std::size_t i : idx) s = f.add(s, trace(f, elements[i]));
      ++counts[s];
      std::size_t k = 0;
      while (k < idx.size() && idx[k] + 1 == elements.size()) idx[k++] = 0;
      if (k == idx.size()) break;
      ++idx[k];
    }
    const BigInt tuples = boost::multiprecision::pow(BigInt(elements.size()), static_cast<unsigned>(c.steps));
    const auto fourier = walk_law_fourier_rational(c.group, c.steps);
    const auto exact = walk_law_exact(c.group, c.steps);
    for (Elem a = 0; a < f.order(); ++a) {
      const BigRational expected = BigRational(counts[a]) / BigRational(tuples);
      if (BigRational((*fourier.numerators)[a]) / BigRational(fourier.denominator) != expected) {
        out.fail(c.group.name() + " rational law differs from enumeration");
      }
      if (std::abs(exact.probabilities[a] - expected.convert_to<double>()) > 1e-12) out.fail(c.group.name() + " double law");
    }
  }

  double worst_mass = 0.0;
  u64 laws = 0;
  const std::vector<GroupSpec> matrix{
      GroupSpec(GroupKind::SL, 2, Field::make(3, 1)),  GroupSpec(GroupKind::SL, 2, Field::make(5, 1)),
      GroupSpec(GroupKind::SL, 3, Field::make(2, 1)),  GroupSpec(GroupKind::GL, 2, Field::make(3, 1)),
      GroupSpec(GroupKind::Sp, 2, Field::make(3, 3)),  GroupSpec(GroupKind::Sp, 4, Field::make(3, 1)),
      GroupSpec(GroupKind::mu, 3, Field::make(7, 1)),  GroupSpec(GroupKind::mu, 13, Field::make(3, 3)),
      GroupSpec(GroupKind::SO_odd, 3, Field::make(5, 1)), GroupSpec(GroupKind::SO_plus, 4, Field::make(3, 1))};
  for (const auto& g : matrix) {
    for (u64 L = 1; L <= 5; ++L, ++laws) worst_mass = std::max(worst_mass, std::abs(walk_law_exact(g, L).mass() - 1.0));
  }
  if (worst_mass > 1e-9) out.fail("mass error " + std::to_string(worst_mass));
  out.detail << exhaustive.size() << " laws equal exhaustive enumeration exactly; " << laws << " laws with max |mass - 1| = "
             << std::scientific << std::setprecision(2) << worst_mass;
}

void criterion_weil(Outcome& out) {
  double worst = 0.0;
  for (auto [p, e] : std::vector<std::pair<u64, int>>{{7, 1}, {3, 3}, {101, 1}}) {
    const Field f = Field::make(p, e);
    const double q = static_cast<double>(f.order());
    for (u64 n : {2u, 3u, 4u}) {
      const auto kl = kloosterman_complex(f, n);
      const double scale = std::pow(q, static_cast<double>(n - 1) / 2.0);
      for (Elem x = 1; x < f.order(); ++x) worst = std::max(worst, std::abs(kl[x]) / (scale * static_cast<double>(n)));
    }
  }
  if (worst > 1.0 + 1e-6) out.fail("|Kl_n| / n reaches " + std::to_string(worst));

  u64 gauss = 0;
  for (u64 p : {3u, 5u, 7u, 13u}) {
    for (u64 ell : {3u, 7u, 11u, 13u}) {
      if (ell == p || residue_degree(p, ell) > 6) continue;
      const auto ctx = ResidueContext::build(p, ell);
      const Elem g = quadratic_gauss_sum(p, ctx);
      const i64 sign = (p - 1) / 2 % 2 == 0 ? 1 : -1;
      if (ctx.field().mul(g, g) != ctx.image(sign * static_cast<i64>(p))) out.fail("Gauss sum square law p=" + std::to_string(p));
      std::vector<ZetaTerm> terms;
      for (u64 x = 0; x < p; ++x) terms.push_back({1, static_cast<i64>(x * x % p)});
      if (g != reduce(cyclo_oracle_value(p, terms), ctx)) out.fail("Gauss sum reduction p=" + std::to_string(p));
      ++gauss;
    }
  }
  out.detail << "max |Kl_n| / n = " << std::fixed << std::setprecision(4) << worst << "; " << gauss
             << " Gauss sums square to (-1)^((p-1)/2) p";
}

void criterion_orthogonality(Outcome& out) {
  for (u64 q : {101u, 499u, 1009u}) {
    const auto kl = kloosterman_complex(Field::make(q, 1), 2);
    double sum = 0.0;
    for (Elem x = 1; x < q; ++x) sum += std::norm(kl[x]) / static_cast<double>(q);
    const double gap = std::abs(sum - static_cast<double>(q));
    out.detail << (q == 101 ? "" : ", ") << "q=" << q << ": |sum - q| = " << std::fixed << std::setprecision(3) << gap;
    if (gap > 5.0 * std::sqrt(static_cast<double>(q))) out.fail("q=" + std::to_string(q));
  }
}

void criterion_hyperelliptic(Outcome& out) {
  Rng rng(7);
  u64 checks = 0;
  for (auto [p, e] : std::vector<std::pair<u64, int>>{{5, 1}, {7, 1}, {7, 2}}) {
    const Field f = Field::make(p, e);
    std::vector<Elem> roots;
    while (roots.size() < 4) {
      const Elem r = static_cast<Elem>(uniform_below(rng, f.order()));
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    const std::vector<Poly> polys{poly::from_ints(f, std::vector<i64>{-1, 0, 1}), poly::from_roots(f, roots)};
    for (const auto& pf : polys) {
      const auto zeros = poly::roots(f, pf);
      for (Elem z = 0; z < f.order(); ++z) {
        if (std::find(zeros.begin(), zeros.end(), z) != zeros.end()) continue;
        u64 count = 1;
        for (Elem x = 0; x < f.order(); ++x) {
          const Elem rhs = f.mul(poly::eval(f, pf, x), f.sub(x, z));
          for (Elem y = 0; y < f.order(); ++y) count += f.mul(y, y) == rhs;
        }
        if (hyperelliptic_point_count(f, pf, z) != count) out.fail(f.describe() + " z=" + f.format(z));
        ++checks;
      }
    }
  }
  const Field f5 = Field::make(5, 1);
  const u64 example = hyperelliptic_point_count(f5, poly::from_ints(f5, std::vector<i64>{-1, 0, 1}), 0);
  if (example != 8) out.fail("F_5, z=0 count " + std::to_string(example));
  out.detail << checks << " curves match (x, y) enumeration; F_5, z=0 has " << example << " points";
}

void criterion_legendre_intervals(Outcome& out) {
  auto run = [](u64 p) {
    ExperimentConfig c;
    c.experiment = "partial-intervals";
    c.p = p;
    c.ell = 3;
    c.kind = "kummer";
    c.chi_order = 2;
    return *run_experiment(c).max_deviation;
  };
  const double d1009 = run(1009), d10007 = run(10007), d100003 = run(100003);
  for (auto [p, dev] : std::vector<std::pair<double, double>>{{10007, d10007}, {100003, d100003}}) {
    const double bound = 2.0 * std::sqrt(3.0 / std::log(p));
    if (dev > bound) out.fail("soft bound at p=" + std::to_string(static_cast<u64>(p)));
  }
  if (!(d100003 < d1009)) out.fail("deviation does not shrink from p=1009 to p=100003");
  out.detail << std::setprecision(6) << "max deviation " << d1009 << " (p=1009), " << d10007 << " (p=10007), " << d100003
             << " (p=100003)";
}

void criterion_model_trend(Outcome& out) {
  std::vector<double> tv;
  for (int e : {2, 3, 4}) {
    ExperimentConfig c;
    c.experiment = "equidist-shift";
    c.p = 13;
    c.e = e;
    c.d = 13;
    c.ell = 3;
    c.kind = "kloosterman";
    const auto r = run_experiment(c);
    if (r.values["group"]["name"] != "Sp_2(F_27)") out.fail("unexpected model group");
    tv.push_back(r.values["tv_model"].get<double>());
  }
  if (!(tv[0] > tv[1] && tv[1] > tv[2])) out.fail("total variation is not strictly decreasing");
  out.detail << std::setprecision(6) << "TV to Sp_2(F_27) law: " << tv[0] << " (e=2), " << tv[1] << " (e=3), " << tv[2]
             << " (e=4)";
}

void criterion_inequalities(Outcome& out) {
  u64 runs = 0;
  std::vector<ExperimentConfig> configs;
  for (u64 p : {101u, 1009u, 10007u}) {
    ExperimentConfig c;
    c.experiment = "variance";
    c.p = p;
    c.ell = 3;
    c.kind = "kummer";
    c.chi_order = 2;
    c.family = "shifted_subset";
    c.set = {"0", "1"};
    c.shifts = {"0", "1", "2"};
    configs.push_back(c);
    c.restrict_lisse = true;
    configs.push_back(c);
    c.family = "intervals";
    c.sizes = {1, 2, 3, 5, 8, 13};
    configs.push_back(c);
  }
  ExperimentConfig kl;
  kl.experiment = "variance";
  kl.p = 13;
  kl.e = 2;
  kl.d = 13;
  kl.ell = 3;
  kl.kind = "kloosterman";
  kl.family = "shifted_subset";
  kl.set = {"0", "1", "3"};
  kl.shifts = {"0", "1", "2", "3"};
  configs.push_back(kl);
  ExperimentConfig order5;
  order5.experiment = "variance";
  order5.p = 101;
  order5.ell = 11;
  order5.chi_order = 5;
  order5.family = "intervals";
  order5.sizes = {2, 4, 6, 8};
  configs.push_back(order5);
  for (const auto& c : configs) {
    const auto r = run_experiment(c);
    for (const auto& v : r.verdicts) {
      if (v.hard && !v.pass) out.fail(v.name + " in " + c.to_json().dump());
    }
    ++runs;
  }

  // Statistics invariants on constructed families of every kind.
  std::vector<SumFamily> families;
  const Field f101 = Field::make(101, 1);
  std::vector<u64> sizes;
  for (u64 k = 1; k <= 20; ++k) sizes.push_back(k);
  families.push_back(make_intervals(f101, sizes));
  const Field f49 = Field::make(7, 2);
  std::vector<std::vector<u64>> corners{{1, 1}, {2, 1}, {2, 3}, {3, 3}, {1, 4}};
  families.push_back(make_boxes(f49, corners));
  Rng rng(10);
  for (const Field& f : {f101, Field::make(5, 3), f49}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Elem> subset, shifts;
      while (subset.size() < 3) {
        const Elem x = static_cast<Elem>(uniform_below(rng, f.order()));
        if (std::find(subset.begin(), subset.end(), x) == subset.end()) subset.push_back(x);
      }
      while (shifts.size() < 6) {
        const Elem x = static_cast<Elem>(uniform_below(rng, f.order()));
        if (std::find(shifts.begin(), shifts.end(), x) == shifts.end()) shifts.push_back(x);
      }
      families.push_back(make_shifted_subset(f, subset, shifts));
    }
  }
  const Field f7 = Field::make(7, 1);
  const std::vector<u64> a{1, 2, 4}, b{1, 3};
  const std::vector<SumFamily> factors{make_intervals(f7, a), make_intervals(f7, b)};
  families.push_back(make_product(f49, factors));
  for (const auto& fam : families) {
    const auto st = stats(fam);
    const u64 K = st.family_size;
    u64 pairs = 0;
    for (const auto& [d, c] : st.difference_counts) pairs += c;
    if (st.union_size > K * st.max_member) out.fail("M > |K| m");
    if (K >= 2 && (st.min_difference < 1 || st.min_difference > 2 * st.union_size)) out.fail("A outside [1, 2M]");
    if (pairs != K * (K - 1)) out.fail("sum of h differs from |K|(|K|-1)");
  }
  out.detail << runs << " variance runs satisfy Cauchy-Schwarz; " << families.size() << " families satisfy the statistics invariants";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    double seconds_limit;  // 0 when no runtime limit applies
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "reduction oracle identity", 5.0, criterion_reduction},
      {2, "GL/SL Gaussian sums vs enumeration", 10.0, criterion_linear_gauss_sums},
      {3, "symplectic expansion vs enumeration", 60.0, criterion_symplectic},
      {4, "walk law exactness", 30.0, criterion_walk_law},
      {5, "Weil/Deligne bounds and Gauss sum law", 0.0, criterion_weil},
      {6, "Kloosterman orthogonality", 5.0, criterion_orthogonality},
      {7, "hyperelliptic point counts", 0.0, criterion_hyperelliptic},
      {8, "Legendre partial intervals mod 3", 30.0, criterion_legendre_intervals},
      {9, "Kloosterman model trend", 120.0, criterion_model_trend},
      {10, "exact inequalities", 0.0, criterion_inequalities},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& ex) {
      out.fail(std::string("exception: ") + ex.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.seconds_limit > 0.0 && seconds > c.seconds_limit) {
      out.fail("runtime " + std::to_string(seconds) + " s over the " + std::to_string(c.seconds_limit) + " s limit");
    }
    failures += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << out.detail.str() << " ["
              << std::fixed << std::setprecision(2) << seconds << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
