#include "tracelab/ff.hpp"

#include <charconv>
#include <sstream>

#include "tracelab/errors.hpp"

namespace tracelab {

namespace {

using ModPoly = std::vector<u64>;

void trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ModPoly poly_mod(ModPoly a, const ModPoly& f, u64 p) {
  trim(a);
  const std::size_t n = f.size() - 1;
  const u64 lead_inv = powmod(f.back(), p - 2, p);
  while (a.size() > n) {
    const u64 c = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - 1 - n;
    for (std::size_t i = 0; i <= n; ++i) {
      a[shift + i] = (a[shift + i] + p - mulmod(c, f[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

ModPoly poly_mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& f, u64 p) {
  if (a.empty() || b.empty()) return {};
  ModPoly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = (prod[i + j] + mulmod(a[i], b[j], p)) % p;
    }
  }
  return poly_mod(std::move(prod), f, p);
}

ModPoly poly_powmod(ModPoly base, u64 exp, const ModPoly& f, u64 p) {
  ModPoly result{1};
  base = poly_mod(std::move(base), f, p);
  while (exp > 0) {
    if (exp & 1) result = poly_mulmod(result, base, f, p);
    base = poly_mulmod(base, base, f, p);
    exp >>= 1;
  }
  return poly_mod(std::move(result), f, p);
}

ModPoly poly_gcd(ModPoly a, ModPoly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    ModPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

ModPoly frobenius_iterate(const ModPoly& f, u64 p, int times) {
  ModPoly h{0, 1};
  for (int i = 0; i < times; ++i) h = poly_powmod(h, p, f, p);
  return h;
}

ModPoly minus_x(ModPoly h, u64 p) {
  if (h.size() < 2) h.resize(2, 0);
  h[1] = (h[1] + p - 1) % p;
  trim(h);
  return h;
}

}  // namespace

bool is_irreducible(u64 p, std::span<const u64> monic) {
  require(monic.size() >= 2 && monic.back() == 1, "modulus must be monic of degree >= 1");
  const int n = static_cast<int>(monic.size()) - 1;
  if (n == 1) return true;
  const ModPoly f(monic.begin(), monic.end());
  if (!minus_x(frobenius_iterate(f, p, n), p).empty()) return false;
  for (u64 r : prime_factors(static_cast<u64>(n))) {
    ModPoly g = poly_gcd(f, minus_x(frobenius_iterate(f, p, n / static_cast<int>(r)), p), p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<u64> find_irreducible(u64 p, int e, const FieldLimits& limits) {
  require(is_prime(p), "characteristic " + std::to_string(p) + " is not prime");
  require(e >= 1, "degree must be at least 1");
  const u64 count = checked_pow(p, static_cast<unsigned>(e), limits.max_order);
  std::vector<u64> poly(static_cast<std::size_t>(e) + 1, 0);
  poly.back() = 1;
  for (u64 index = 0; index < count; ++index) {
    u64 rest = index;
    for (int i = 0; i < e; ++i) {
      poly[static_cast<std::size_t>(i)] = rest % p;
      rest /= p;
    }
    if (is_irreducible(p, poly)) return poly;
  }
  throw Error("no irreducible polynomial found");
}

namespace detail {

struct FieldImpl {
  u64 p = 0;
  int e = 0;
  u64 q = 0;
  std::vector<u64> modulus;
  std::vector<u64> pow_p;
  std::vector<u64> trace_basis;
  std::vector<u64> order_factors;
  Elem generator = 0;
  bool tabulated = false;
  std::vector<Elem> exp_table;
  std::vector<std::uint32_t> log_table;

  std::vector<u64> to_coeffs(Elem a) const {
    std::vector<u64> c(static_cast<std::size_t>(e));
    u64 rest = a;
    for (int i = 0; i < e; ++i) {
      c[static_cast<std::size_t>(i)] = rest % p;
      rest /= p;
    }
    return c;
  }

  Elem from_coeffs(const std::vector<u64>& c) const {
    u64 index = 0;
    for (std::size_t i = c.size(); i-- > 0;) index = index * p + c[i];
    return static_cast<Elem>(index);
  }

  Elem raw_mul(Elem a, Elem b) const {
    if (e == 1) return static_cast<Elem>(u64{a} * b % p);
    auto prod = poly_mulmod(to_coeffs(a), to_coeffs(b), modulus, p);
    prod.resize(static_cast<std::size_t>(e), 0);
    return from_coeffs(prod);
  }

  Elem raw_pow(Elem a, u64 k) const {
    Elem result = 1;
    while (k > 0) {
      if (k & 1) result = raw_mul(result, a);
      a = raw_mul(a, a);
      k >>= 1;
    }
    return result;
  }

  Elem raw_add(Elem a, Elem b) const {
    if (e == 1) {
      const u64 s = u64{a} + b;
      return static_cast<Elem>(s >= p ? s - p : s);
    }
    u64 result = 0;
    u64 a_rest = a;
    u64 b_rest = b;
    for (int i = 0; i < e; ++i) {
      u64 s = a_rest % p + b_rest % p;
      if (s >= p) s -= p;
      result += s * pow_p[static_cast<std::size_t>(i)];
      a_rest /= p;
      b_rest /= p;
    }
    return static_cast<Elem>(result);
  }

  bool has_full_order(Elem a) const {
    if (a == 0) return false;
    for (u64 r : order_factors) {
      if (raw_pow(a, (q - 1) / r) == 1) return false;
    }
    return true;
  }
};

}  // namespace detail

Field Field::make(u64 p, int e, const FieldLimits& limits) {
  return with_modulus(p, find_irreducible(p, e, limits), limits);
}

Field Field::with_modulus(u64 p, std::vector<u64> modulus, const FieldLimits& limits) {
  require(is_prime(p), "characteristic " + std::to_string(p) + " is not prime");
  require(p < (u64{1} << 32), "characteristic too large");
  require(modulus.size() >= 2 && modulus.back() == 1, "modulus must be monic of degree >= 1");
  for (u64 c : modulus) require(c < p, "modulus coefficients must lie in [0, p)");
  require(is_irreducible(p, modulus), "modulus is not irreducible");

  auto impl = std::make_shared<detail::FieldImpl>();
  impl->p = p;
  impl->e = static_cast<int>(modulus.size()) - 1;
  impl->q = checked_pow(p, static_cast<unsigned>(impl->e), limits.max_order);
  impl->modulus = std::move(modulus);
  for (int i = 0; i <= impl->e; ++i) impl->pow_p.push_back(checked_pow(p, static_cast<unsigned>(i)));
  impl->order_factors = prime_factors(impl->q - 1);

  for (int i = 0; i < impl->e; ++i) {
    Elem xi = impl->raw_pow(static_cast<Elem>(p % impl->q), static_cast<u64>(i));
    if (impl->e == 1) xi = 1;
    Elem conj = xi;
    Elem sum = 0;
    for (int j = 0; j < impl->e; ++j) {
      sum = impl->raw_add(sum, conj);
      conj = impl->raw_pow(conj, p);
    }
    impl->trace_basis.push_back(impl->to_coeffs(sum)[0]);
  }

  if (impl->q == 2) {
    impl->generator = 1;
  } else {
    for (u64 a = 1; a < impl->q; ++a) {
      if (impl->has_full_order(static_cast<Elem>(a))) {
        impl->generator = static_cast<Elem>(a);
        break;
      }
    }
  }

  if (impl->q <= limits.max_table_order) {
    impl->tabulated = true;
    impl->exp_table.resize(impl->q - 1);
    impl->log_table.assign(impl->q, 0);
    Elem power = 1;
    for (u64 k = 0; k + 1 < impl->q; ++k) {
      impl->exp_table[k] = power;
      impl->log_table[power] = static_cast<std::uint32_t>(k);
      power = impl->raw_mul(power, impl->generator);
    }
  }
  return Field(std::move(impl));
}

Field Field::parse(std::string_view text, const FieldLimits& limits) {
  const auto caret = text.find('^');
  const auto colon = text.find(':');
  require(caret != std::string_view::npos && colon != std::string_view::npos && caret < colon,
          "field must look like p^e:c0,...,ce");
  auto to_u64 = [](std::string_view s) {
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), "bad integer '" + std::string(s) + "'");
    return v;
  };
  const u64 p = to_u64(text.substr(0, caret));
  const u64 e = to_u64(text.substr(caret + 1, colon - caret - 1));
  std::vector<u64> modulus;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    modulus.push_back(to_u64(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  require(modulus.size() == e + 1, "modulus length does not match degree");
  return with_modulus(p, std::move(modulus), limits);
}

u64 Field::characteristic() const { return impl_->p; }
int Field::degree() const { return impl_->e; }
u64 Field::order() const { return impl_->q; }
const std::vector<u64>& Field::modulus() const { return impl_->modulus; }
bool Field::tabulated() const { return impl_->tabulated; }

void Field::check(Elem a) const {
  if (a >= impl_->q) throw PreconditionError("element index out of range for " + describe());
}

Elem Field::from_int(i64 value) const {
  const i64 p = static_cast<i64>(impl_->p);
  return static_cast<Elem>(((value % p) + p) % p);
}

Elem Field::from_coeffs(std::span<const u64> coeffs) const {
  require(coeffs.size() <= static_cast<std::size_t>(impl_->e), "too many coefficients");
  std::vector<u64> c(static_cast<std::size_t>(impl_->e), 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i] % impl_->p;
  return impl_->from_coeffs(c);
}

std::vector<u64> Field::coeffs(Elem a) const {
  check(a);
  return impl_->to_coeffs(a);
}

u64 Field::coeff(Elem a, int i) const { return (a / impl_->pow_p[static_cast<std::size_t>(i)]) % impl_->p; }

u64 Field::to_prime(Elem a) const {
  require(a < impl_->p, "element " + format(a) + " is not in the prime field");
  return a;
}

Elem Field::add(Elem a, Elem b) const { return impl_->raw_add(a, b); }

Elem Field::neg(Elem a) const {
  const u64 p = impl_->p;
  if (impl_->e == 1) return a == 0 ? 0 : static_cast<Elem>(p - a);
  u64 result = 0;
  u64 rest = a;
  for (int i = 0; i < impl_->e; ++i) {
    const u64 d = rest % p;
    result += (d == 0 ? 0 : p - d) * impl_->pow_p[static_cast<std::size_t>(i)];
    rest /= p;
  }
  return static_cast<Elem>(result);
}

Elem Field::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem Field::scale(Elem a, u64 k) const {
  const u64 p = impl_->p;
  k %= p;
  if (impl_->e == 1) return static_cast<Elem>(mulmod(a, k, p));
  u64 result = 0;
  u64 rest = a;
  for (int i = 0; i < impl_->e; ++i) {
    result += mulmod(rest % p, k, p) * impl_->pow_p[static_cast<std::size_t>(i)];
    rest /= p;
  }
  return static_cast<Elem>(result);
}

Elem Field::mul(Elem a, Elem b) const {
  if (a == 0 || b == 0) return 0;
  if (impl_->e == 1) return static_cast<Elem>(u64{a} * b % impl_->p);
  if (impl_->tabulated) {
    u64 k = u64{impl_->log_table[a]} + impl_->log_table[b];
    if (k >= impl_->q - 1) k -= impl_->q - 1;
    return impl_->exp_table[k];
  }
  return impl_->raw_mul(a, b);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw DivisionByZero("inverse of zero in " + describe());
  if (impl_->tabulated) {
    const u64 k = impl_->log_table[a];
    return impl_->exp_table[k == 0 ? 0 : impl_->q - 1 - k];
  }
  return impl_->raw_pow(a, impl_->q - 2);
}

Elem Field::div(Elem a, Elem b) const { return mul(a, inv(b)); }

Elem Field::pow(Elem a, i64 k) const {
  if (k < 0) return pow(inv(a), -k);
  if (k == 0) return 1;
  if (a == 0) return 0;
  const u64 group = impl_->q - 1;
  if (impl_->tabulated) {
    const u64 exponent = mulmod(impl_->log_table[a], static_cast<u64>(k) % group, group);
    return impl_->exp_table[exponent];
  }
  return impl_->raw_pow(a, static_cast<u64>(k) % group);
}

u64 Field::trace(Elem a) const {
  const u64 p = impl_->p;
  u64 sum = 0;
  u64 rest = a;
  for (int i = 0; i < impl_->e; ++i) {
    sum += (rest % p) * impl_->trace_basis[static_cast<std::size_t>(i)];
    sum %= p;
    rest /= p;
  }
  return sum;
}

Elem Field::generator() const { return impl_->generator; }

u64 Field::multiplicative_order(Elem a) const {
  if (a == 0) throw PreconditionError("zero has no multiplicative order");
  u64 order = impl_->q - 1;
  for (u64 r : impl_->order_factors) {
    while (order % r == 0 && impl_->raw_pow(a, order / r) == 1) order /= r;
  }
  return order;
}

u64 Field::log(Elem a) const {
  if (a == 0) throw PreconditionError("discrete log of zero");
  if (!impl_->tabulated) throw BudgetError("field " + describe() + " exceeds the tabulation cap");
  check(a);
  return impl_->log_table[a];
}

Elem Field::exp(u64 k) const {
  k %= impl_->q - 1;
  if (impl_->tabulated) return impl_->exp_table[k];
  return impl_->raw_pow(impl_->generator, k);
}

std::string Field::format(Elem a) const {
  const auto c = coeffs(a);
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(c[i]);
  }
  return out;
}

Elem Field::parse_element(std::string_view text) const {
  std::vector<u64> c;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view token = text.substr(0, comma);
    i64 v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    require(ec == std::errc() && ptr == token.data() + token.size(),
            "bad element coefficient '" + std::string(token) + "'");
    const i64 p = static_cast<i64>(impl_->p);
    c.push_back(static_cast<u64>(((v % p) + p) % p));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  require(c.size() <= static_cast<std::size_t>(impl_->e), "element has more than e coefficients");
  return from_coeffs(c);
}

std::string Field::describe() const {
  std::ostringstream out;
  out << impl_->p << '^' << impl_->e << ':';
  for (std::size_t i = 0; i < impl_->modulus.size(); ++i) {
    if (i > 0) out << ',';
    out << impl_->modulus[i];
  }
  return out.str();
}

bool operator==(const Field& a, const Field& b) {
  return a.impl_ == b.impl_ || (a.impl_->p == b.impl_->p && a.impl_->modulus == b.impl_->modulus);
}

FieldElement::FieldElement(Field field, Elem value) : field_(std::move(field)), value_(value) {
  require(value < field_.order(), "element index out of range");
}

namespace {
const Field& common_field(const FieldElement& a, const FieldElement& b) {
  if (!(a.field() == b.field())) {
    throw MismatchError("field mismatch: " + a.field().describe() + " vs " + b.field().describe());
  }
  return a.field();
}
}  // namespace

FieldElement FieldElement::inv() const { return {field_, field_.inv(value_)}; }
FieldElement FieldElement::pow(i64 k) const { return {field_, field_.pow(value_, k)}; }

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  const Field& f = common_field(a, b);
  return {f, f.add(a.value(), b.value())};
}
FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  const Field& f = common_field(a, b);
  return {f, f.sub(a.value(), b.value())};
}
FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  const Field& f = common_field(a, b);
  return {f, f.mul(a.value(), b.value())};
}
FieldElement operator/(const FieldElement& a, const FieldElement& b) {
  const Field& f = common_field(a, b);
  return {f, f.div(a.value(), b.value())};
}
FieldElement operator-(const FieldElement& a) { return {a.field(), a.field().neg(a.value())}; }
bool operator==(const FieldElement& a, const FieldElement& b) {
  return a.field() == b.field() && a.value() == b.value();
}

}  // namespace tracelab
