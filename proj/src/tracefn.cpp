#include "tracelab/tracefn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "tracelab/errors.hpp"

namespace tracelab {

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kummer: return "kummer";
    case TraceKind::kloosterman: return "kloosterman";
    case TraceKind::hyperelliptic: return "hyperelliptic";
  }
  return "unknown";
}

int RationalFunction::degree() const {
  return std::max(poly::degree(numerator), poly::degree(denominator));
}

nlohmann::json RationalFunction::to_json(const Field& f) const {
  auto side = [&](const Poly& p) {
    nlohmann::json out = nlohmann::json::array();
    for (Elem c : p) out.push_back(f.format(c));
    return out;
  };
  return {{"numerator", side(numerator)}, {"denominator", side(denominator)}};
}

bool TraceFunction::is_singular(Elem x) const {
  return std::binary_search(singular_.begin(), singular_.end(), x);
}

TraceFunction TraceFunction::from_table(TraceKind kind, Field domain, ResidueContext ctx, std::vector<Elem> values,
                                        std::vector<Elem> singular, u64 conductor, GroupSpec group, bool normalized,
                                        nlohmann::json params, u64 rank_parameter, RationalFunction f) {
  require(values.size() == domain.order(), "trace table length must equal the field order");
  for (Elem v : values) require(v < ctx.field().order(), "trace value outside the residue field");
  TraceFunction t(kind, std::move(domain), std::move(ctx), std::move(group));
  t.values_ = std::move(values);
  std::sort(singular.begin(), singular.end());
  singular.erase(std::unique(singular.begin(), singular.end()), singular.end());
  t.singular_ = std::move(singular);
  t.conductor_ = conductor;
  t.normalized_ = normalized;
  t.params_ = std::move(params);
  t.rank_parameter_ = rank_parameter;
  t.f_ = std::move(f);
  return t;
}

namespace {

void check_orders(const Field& f, const Poly& p, u64 d, const char* what) {
  for (const auto& [factor, k] : poly::squarefree_decomposition(f, p)) {
    if (static_cast<u64>(k) % d == 0) {
      throw PreconditionError(std::string("f has a ") + what + " of order " + std::to_string(k) +
                              ", divisible by the character order " + std::to_string(d));
    }
  }
}

}  // namespace

TraceFunction kummer(const MultiplicativeCharacter& chi, const RationalFunction& rf) {
  const Field& f = chi.source();
  const u64 d = chi.order();
  require(d >= 2, "Kummer trace functions need a character of order >= 2");
  Poly num = rf.numerator;
  Poly den = rf.denominator;
  poly::trim(num);
  poly::trim(den);
  require(!num.empty() && !den.empty(), "numerator and denominator must be nonzero");
  require(poly::degree(poly::gcd(f, num, den)) == 0, "numerator and denominator must be coprime");
  require(poly::degree(num) > 0 || poly::degree(den) > 0, "f is constant");
  check_orders(f, num, d, "zero");
  check_orders(f, den, d, "pole");

  std::vector<Elem> values(f.order(), 0);
  std::vector<Elem> singular;
  for (u64 x = 0; x < f.order(); ++x) {
    const Elem top = poly::eval(f, num, static_cast<Elem>(x));
    const Elem bottom = poly::eval(f, den, static_cast<Elem>(x));
    if (top == 0 || bottom == 0) {
      singular.push_back(static_cast<Elem>(x));
      continue;
    }
    values[x] = chi(f.div(top, bottom));
  }
  RationalFunction clean{num, den};
  nlohmann::json params = {{"d", d}, {"f", clean.to_json(f)}};
  const u64 conductor = 1 + static_cast<u64>(poly::degree(num)) + static_cast<u64>(poly::degree(den));
  return TraceFunction::from_table(TraceKind::kummer, f, chi.context(), std::move(values), std::move(singular),
                                   conductor, GroupSpec(GroupKind::mu, d, chi.context().field()), false,
                                   std::move(params), d, std::move(clean));
}

namespace {

/// Image of sqrt(q)^k, avoiding Gauss sums when k is even.
Elem sqrt_q_power(const Field& source, const ResidueContext& ctx, u64 k) {
  const Field& r = ctx.field();
  const Elem q_image = r.from_int(static_cast<i64>(source.order() % ctx.ell()));
  Elem result = r.pow(q_image, static_cast<i64>(k / 2));
  if (k % 2 == 1) result = r.mul(result, gauss_sqrt(source, ctx));
  return result;
}

}  // namespace

TraceFunction kloosterman(u64 n, const Field& source, const ResidueContext& ctx, bool normalized) {
  require(n >= 2, "Kloosterman rank must be at least 2");
  require(source.tabulated(), "source field exceeds the tabulation cap");
  const AdditiveCharacter psi(source, ctx);
  const Field& r = ctx.field();
  const u64 p = source.characteristic();
  const u64 big_q = r.order();
  const std::size_t group = source.order() - 1;

  std::vector<std::uint32_t> psi_exp(group);
  for (std::size_t i = 0; i < group; ++i) psi_exp[i] = static_cast<std::uint32_t>(psi.exponent(source.exp(i)));
  const Elem zeta_p = *ctx.root_of_unity(p);

  // times_zeta[a * Q + v] = v * zeta_p^a
  std::vector<Elem> times_zeta;
  const bool use_table = p * big_q <= (u64{1} << 24);
  if (use_table) {
    times_zeta.resize(p * big_q);
    for (u64 a = 0; a < p; ++a) {
      const Elem z = r.pow(zeta_p, static_cast<i64>(a));
      for (u64 v = 0; v < big_q; ++v) times_zeta[a * big_q + v] = r.mul(static_cast<Elem>(v), z);
    }
  }
  std::vector<Elem> zeta_powers(p);
  for (u64 a = 0; a < p; ++a) zeta_powers[a] = r.pow(zeta_p, static_cast<i64>(a));

  std::vector<Elem> current(group);
  for (std::size_t i = 0; i < group; ++i) current[i] = zeta_powers[psi_exp[i]];
  std::vector<Elem> next(group);
  std::vector<u64> counts(big_q);
  for (u64 k = 2; k <= n; ++k) {
    for (std::size_t s = 0; s < group; ++s) {
      std::fill(counts.begin(), counts.end(), 0);
      auto accumulate = [&](std::size_t i, std::size_t j) {
        const Elem v = use_table ? times_zeta[psi_exp[j] * big_q + current[i]] : r.mul(current[i], zeta_powers[psi_exp[j]]);
        ++counts[v];
      };
      for (std::size_t i = 0; i <= s; ++i) accumulate(i, s - i);
      for (std::size_t i = s + 1; i < group; ++i) accumulate(i, s + group - i);
      Elem total = 0;
      for (u64 v = 1; v < big_q; ++v) {
        if (counts[v] != 0) total = r.add(total, r.scale(static_cast<Elem>(v), counts[v]));
      }
      next[s] = total;
    }
    std::swap(current, next);
  }

  const Elem sign = (n - 1) % 2 == 0 ? r.one() : r.neg(r.one());
  Elem scale = sign;
  Elem at_zero = 0;
  if (normalized) {
    scale = r.mul(sign, r.inv(sqrt_q_power(source, ctx, n - 1)));
    at_zero = r.mul(sign, sqrt_q_power(source, ctx, n - 1));
  } else {
    at_zero = r.mul(sign, sqrt_q_power(source, ctx, 2 * (n - 1)));
  }
  std::vector<Elem> values(source.order(), 0);
  values[0] = at_zero;
  for (std::size_t s = 0; s < group; ++s) values[source.exp(s)] = r.mul(scale, current[s]);

  const GroupKind kind = n % 2 == 1 ? GroupKind::SL : GroupKind::Sp;
  return TraceFunction::from_table(TraceKind::kloosterman, source, ctx, std::move(values), {0}, n + 3,
                                   GroupSpec(kind, n, r), normalized, {{"n", n}}, n);
}

namespace {

std::vector<int> quadratic_signs(const Field& f) {
  std::vector<int> sign(f.order(), 0);
  for (u64 x = 1; x < f.order(); ++x) sign[x] = f.log(static_cast<Elem>(x)) % 2 == 0 ? 1 : -1;
  return sign;
}

/// sum_x chi_2(f(x)(x - z)) for every z.
std::vector<i64> hyperelliptic_char_sums(const Field& f, const Poly& poly_f) {
  const auto sign = quadratic_signs(f);
  std::vector<int> f_sign(f.order());
  for (u64 x = 0; x < f.order(); ++x) f_sign[x] = sign[poly::eval(f, poly_f, static_cast<Elem>(x))];
  std::vector<i64> sums(f.order(), 0);
  for (u64 z = 0; z < f.order(); ++z) {
    i64 s = 0;
    for (u64 x = 0; x < f.order(); ++x) {
      if (f_sign[x] == 0) continue;
      s += f_sign[x] * sign[f.sub(static_cast<Elem>(x), static_cast<Elem>(z))];
    }
    sums[z] = s;
  }
  return sums;
}

void check_hyperelliptic(const Field& f, const Poly& poly_f) {
  require(f.characteristic() % 2 == 1, "hyperelliptic families need odd characteristic");
  require(f.tabulated(), "source field exceeds the tabulation cap");
  const int deg = poly::degree(poly_f);
  require(deg >= 2 && deg % 2 == 0, "f must have even degree 2g >= 2 (odd-degree model f(x)(x - z))");
  require(poly::degree(poly::gcd(f, poly_f, poly::derivative(f, poly_f))) == 0, "f is not squarefree");
  require(poly::roots(f, poly_f).size() == static_cast<std::size_t>(deg), "f does not split over the source field");
}

}  // namespace

u64 hyperelliptic_point_count(const Field& source, const Poly& f, Elem z) {
  require(source.characteristic() % 2 == 1, "point counts need odd characteristic");
  const auto sign = quadratic_signs(source);
  i64 s = 0;
  for (u64 x = 0; x < source.order(); ++x) {
    const Elem v = source.mul(poly::eval(source, f, static_cast<Elem>(x)), source.sub(static_cast<Elem>(x), z));
    s += sign[v];
  }
  return static_cast<u64>(static_cast<i64>(source.order()) + 1 + s);
}

TraceFunction hyperelliptic_family(const Field& source, const Poly& f, const ResidueContext& ctx, bool normalized) {
  Poly poly_f = f;
  poly::trim(poly_f);
  check_hyperelliptic(source, poly_f);
  const Field& r = ctx.field();
  const auto roots = poly::roots(source, poly_f);
  const auto sums = hyperelliptic_char_sums(source, poly_f);
  const Elem scale = normalized ? r.inv(gauss_sqrt(source, ctx)) : r.one();
  std::vector<Elem> values(source.order(), 0);
  for (u64 z = 0; z < source.order(); ++z) {
    if (std::binary_search(roots.begin(), roots.end(), static_cast<Elem>(z))) continue;
    values[z] = r.mul(scale, r.from_int(-sums[z]));
  }
  const u64 genus = static_cast<u64>(poly::degree(poly_f)) / 2;
  nlohmann::json params = {{"genus", genus}, {"f", RationalFunction{poly_f, {1}}.to_json(source)["numerator"]}};
  return TraceFunction::from_table(TraceKind::hyperelliptic, source, ctx, std::move(values), roots,
                                   2 * genus + roots.size(), GroupSpec(GroupKind::Sp, 2 * genus, r), normalized,
                                   std::move(params), genus, RationalFunction{poly_f, {1}});
}

std::vector<std::complex<double>> kloosterman_complex(const Field& source, u64 n) {
  require(n >= 1, "Kloosterman rank must be positive");
  require(source.tabulated(), "source field exceeds the tabulation cap");
  const std::size_t group = source.order() - 1;
  const double p = static_cast<double>(source.characteristic());
  std::vector<std::complex<double>> base(group);
  for (std::size_t i = 0; i < group; ++i) {
    base[i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(source.trace(source.exp(i))) / p);
  }
  std::vector<std::complex<double>> current = base;
  std::vector<std::complex<double>> next(group);
  for (u64 k = 2; k <= n; ++k) {
    for (std::size_t s = 0; s < group; ++s) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i <= s; ++i) acc += current[i] * base[s - i];
      for (std::size_t i = s + 1; i < group; ++i) acc += current[i] * base[s + group - i];
      next[s] = acc;
    }
    std::swap(current, next);
  }
  std::vector<std::complex<double>> out(source.order(), 0.0);
  for (std::size_t s = 0; s < group; ++s) out[source.exp(s)] = current[s];
  return out;
}

std::vector<std::complex<double>> complex_embedding(const TraceFunction& t) {
  const Field& f = t.domain();
  const double sqrt_q = std::sqrt(static_cast<double>(f.order()));
  std::vector<std::complex<double>> out(f.order(), 0.0);
  switch (t.kind()) {
    case TraceKind::kummer: {
      const MultiplicativeCharacter chi(f, t.rank_parameter(), t.context());
      const RationalFunction& rf = t.rational_function();
      for (u64 x = 0; x < f.order(); ++x) {
        if (t.is_singular(static_cast<Elem>(x))) continue;
        const Elem value = f.div(poly::eval(f, rf.numerator, static_cast<Elem>(x)),
                                 poly::eval(f, rf.denominator, static_cast<Elem>(x)));
        out[x] = chi.complex_value(value);
      }
      break;
    }
    case TraceKind::kloosterman: {
      const u64 n = t.rank_parameter();
      const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
      const double norm = t.normalized() ? std::pow(sqrt_q, static_cast<double>(n - 1)) : 1.0;
      out = kloosterman_complex(f, n);
      for (auto& v : out) v *= sign / norm;
      out[0] = t.normalized() ? std::pow(-sqrt_q, static_cast<double>(n - 1))
                              : sign * std::pow(static_cast<double>(f.order()), static_cast<double>(n - 1));
      break;
    }
    case TraceKind::hyperelliptic: {
      const auto sums = hyperelliptic_char_sums(f, t.rational_function().numerator);
      const double norm = t.normalized() ? sqrt_q : 1.0;
      for (u64 z = 0; z < f.order(); ++z) {
        if (t.is_singular(static_cast<Elem>(z))) continue;
        out[z] = -static_cast<double>(sums[z]) / norm;
      }
      break;
    }
  }
  return out;
}

Elem partial_sum(const TraceFunction& t, std::span<const Elem> subset) {
  const Field& r = t.codomain();
  Elem acc = 0;
  for (Elem x : subset) {
    require(x < t.domain().order(), "subset element outside the domain");
    acc = r.add(acc, t(x));
  }
  return acc;
}

namespace {
std::string csv_field(const std::string& s) {
  return s.find(',') == std::string::npos ? s : '"' + s + '"';
}
}  // namespace

void write_csv(const TraceFunction& t, std::ostream& out) {
  const nlohmann::json header = {{"kind", to_string(t.kind())},
                                 {"params", t.params()},
                                 {"normalized", t.normalized()},
                                 {"domain", t.domain().describe()},
                                 {"ctx", t.context().to_json()}};
  out << "# " << header.dump() << '\n';
  out << "index,x,value\n";
  for (u64 x = 0; x < t.domain().order(); ++x) {
    out << x << ',' << csv_field(t.domain().format(static_cast<Elem>(x))) << ','
        << csv_field(t.codomain().format(t(static_cast<Elem>(x)))) << '\n';
  }
}

}  // namespace tracelab
