#include "tracelab/cyclo.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tracelab/errors.hpp"

namespace tracelab {

namespace {

std::vector<i64> compute_cyclotomic(u64 d) {
  // x^d - 1 divided by Phi_k for every proper divisor k.
  std::vector<i64> num(d + 1, 0);
  num[0] = -1;
  num[d] = 1;
  for (u64 k = 1; k < d; ++k) {
    if (d % k != 0) continue;
    const std::vector<i64> den = cyclotomic_polynomial(k);
    std::vector<i64> quot(num.size() - den.size() + 1, 0);
    for (std::size_t shift = quot.size(); shift-- > 0;) {
      const i64 c = num[shift + den.size() - 1];
      quot[shift] = c;
      for (std::size_t j = 0; j < den.size(); ++j) num[shift + j] -= c * den[j];
    }
    num = std::move(quot);
  }
  return num;
}

const std::vector<i64>& cached_cyclotomic(u64 d) {
  static std::mutex mutex;
  static std::map<u64, std::vector<i64>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(d); it != cache.end()) return it->second;
  }
  std::vector<i64> value = compute_cyclotomic(d);
  std::lock_guard lock(mutex);
  return cache.emplace(d, std::move(value)).first->second;
}

u64 positive_mod(i64 k, u64 d) {
  const i64 m = static_cast<i64>(d);
  return static_cast<u64>(((k % m) + m) % m);
}

}  // namespace

std::vector<i64> cyclotomic_polynomial(u64 d) {
  require(d >= 1, "cyclotomic order must be positive");
  return cached_cyclotomic(d);
}

CycloElement::CycloElement(u64 d) : d_(d) {
  require(d >= 1, "cyclotomic order must be positive");
  coeffs_.assign(euler_phi(d), 0);
}

CycloElement CycloElement::integer(u64 d, const BigInt& value) {
  CycloElement out(d);
  out.coeffs_[0] = value;
  return out;
}

CycloElement CycloElement::zeta_power(u64 d, i64 k) {
  require(d >= 1, "cyclotomic order must be positive");
  std::vector<BigInt> powers(d, 0);
  powers[positive_mod(k, d)] = 1;
  return from_powers(d, std::move(powers));
}

CycloElement CycloElement::from_powers(u64 d, std::vector<BigInt> powers) {
  const std::vector<i64>& phi = cached_cyclotomic(d);
  const std::size_t deg = phi.size() - 1;
  for (std::size_t i = powers.size(); i-- > deg;) {
    if (powers[i] == 0) continue;
    const BigInt c = powers[i];
    const std::size_t shift = i - deg;
    for (std::size_t j = 0; j <= deg; ++j) powers[shift + j] -= c * phi[j];
  }
  powers.resize(deg);
  CycloElement out(d);
  out.coeffs_ = std::move(powers);
  return out;
}

void CycloElement::check_same(const CycloElement& other) const {
  if (d_ != other.d_) {
    throw MismatchError("cyclotomic order mismatch: " + std::to_string(d_) + " vs " + std::to_string(other.d_));
  }
}

bool CycloElement::is_integer() const {
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0) return false;
  }
  return true;
}

CycloElement CycloElement::conj() const {
  std::vector<BigInt> powers(d_, 0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) powers[(d_ - i) % d_] += coeffs_[i];
  return from_powers(d_, std::move(powers));
}

CycloElement CycloElement::pow(unsigned k) const {
  CycloElement result = integer(d_, 1);
  CycloElement base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

std::string CycloElement::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i > 0) out << ',';
    out << coeffs_[i];
  }
  out << ']';
  return out.str();
}

CycloElement& CycloElement::operator+=(const CycloElement& other) {
  check_same(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

CycloElement& CycloElement::operator-=(const CycloElement& other) {
  check_same(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

CycloElement operator*(const CycloElement& a, const CycloElement& b) {
  a.check_same(b);
  std::vector<BigInt> prod(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) prod[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return CycloElement::from_powers(a.d_, std::move(prod));
}

CycloElement cyclo_oracle_value(u64 d, std::span<const ZetaTerm> terms, u64 phi_budget) {
  require(d >= 1, "cyclotomic order must be positive");
  if (euler_phi(d) > phi_budget) {
    throw BudgetError("phi(" + std::to_string(d) + ") exceeds the cyclotomic budget " + std::to_string(phi_budget));
  }
  std::vector<BigInt> powers(d, 0);
  for (const ZetaTerm& term : terms) powers[positive_mod(term.exponent, d)] += term.coeff;
  return CycloElement::from_powers(d, std::move(powers));
}

u64 residue_degree(u64 d, u64 ell) {
  require(d >= 1, "root-of-unity order must be positive");
  require(gcd(ell, d) == 1, "ell = " + std::to_string(ell) + " divides d = " + std::to_string(d) + " (ramified)");
  if (d == 1) return 1;
  return *multiplicative_order(ell % d, d);
}

ResidueContext ResidueContext::build(u64 d, u64 ell, u64 conjugate, const FieldLimits& limits) {
  require(is_prime(ell), "ell = " + std::to_string(ell) + " is not prime");
  const u64 m = residue_degree(d, ell);
  require(gcd(conjugate % d, d) == 1 || d == 1, "conjugate exponent must be coprime to d");
  Field field = Field::make(ell, static_cast<int>(m), limits);
  const u64 cofactor = (field.order() - 1) / d;
  const Elem zeta = field.pow(field.generator(), static_cast<i64>(mulmod(conjugate % d, cofactor, field.order() - 1)));
  return ResidueContext(d, ell, conjugate % d == 0 ? 1 : conjugate % d, std::move(field), zeta);
}

std::optional<Elem> ResidueContext::root_of_unity(u64 r) const {
  if (r == 0 || d_ % r != 0) return std::nullopt;
  return field_.pow(zeta_, static_cast<i64>(d_ / r));
}

nlohmann::json ResidueContext::to_json() const {
  return {{"d", d_},
          {"ell", ell_},
          {"m", m()},
          {"modulus", field_.describe()},
          {"zeta_d", field_.format(zeta_)},
          {"generator", field_.format(field_.generator())},
          {"conjugate", conjugate_}};
}

bool operator==(const ResidueContext& a, const ResidueContext& b) {
  return a.d_ == b.d_ && a.ell_ == b.ell_ && a.field_ == b.field_ && a.zeta_ == b.zeta_;
}

Elem reduce(const CycloElement& x, const ResidueContext& ctx) {
  if (x.order() != ctx.d()) {
    throw MismatchError("cyclotomic order " + std::to_string(x.order()) + " does not match context d = " +
                        std::to_string(ctx.d()));
  }
  const Field& f = ctx.field();
  const BigInt ell = ctx.ell();
  Elem acc = 0;
  Elem power = f.one();
  for (const BigInt& c : x.coefficients()) {
    BigInt r = c % ell;
    if (r < 0) r += ell;
    acc = f.add(acc, f.scale(power, r.convert_to<u64>()));
    power = f.mul(power, ctx.zeta());
  }
  return acc;
}

AdditiveCharacter::AdditiveCharacter(Field source, ResidueContext ctx)
    : source_(std::move(source)), ctx_(std::move(ctx)) {
  const u64 p = source_.characteristic();
  const auto zeta_p = ctx_.root_of_unity(p);
  require(zeta_p.has_value(), "p = " + std::to_string(p) + " does not divide d = " + std::to_string(ctx_.d()) +
                                  "; no additive character available");
  Elem power = ctx_.field().one();
  for (u64 j = 0; j < p; ++j) {
    powers_.push_back(power);
    power = ctx_.field().mul(power, *zeta_p);
  }
}

namespace {

/// e(k / n), exact at multiples of a quarter turn.
std::complex<double> root_of_unity_value(u64 k, u64 n) {
  k %= n;
  if (4 * k % n == 0) {
    constexpr std::complex<double> quarter[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return quarter[4 * k / n];
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace

std::complex<double> AdditiveCharacter::complex_value(Elem x) const {
  return root_of_unity_value(source_.trace(x), source_.characteristic());
}

MultiplicativeCharacter::MultiplicativeCharacter(Field source, u64 order, ResidueContext ctx)
    : source_(std::move(source)), order_(order), ctx_(std::move(ctx)) {
  require(order >= 1, "character order must be positive");
  require((source_.order() - 1) % order == 0,
          "d = " + std::to_string(order) + " does not divide q-1 = " + std::to_string(source_.order() - 1));
  const auto zeta = ctx_.root_of_unity(order);
  require(zeta.has_value(), "context d = " + std::to_string(ctx_.d()) + " is not divisible by the character order " +
                                std::to_string(order));
  require(source_.tabulated(), "source field exceeds the tabulation cap needed for discrete logs");
  Elem power = ctx_.field().one();
  for (u64 j = 0; j < order; ++j) {
    powers_.push_back(power);
    power = ctx_.field().mul(power, *zeta);
  }
}

std::optional<u64> MultiplicativeCharacter::exponent(Elem x) const {
  if (x == 0) return std::nullopt;
  return source_.log(x) % order_;
}

Elem MultiplicativeCharacter::operator()(Elem x) const {
  if (x == 0) return 0;
  return powers_[source_.log(x) % order_];
}

std::complex<double> MultiplicativeCharacter::complex_value(Elem x) const {
  const auto k = exponent(x);
  if (!k) return 0.0;
  return root_of_unity_value(*k, order_);
}

Elem quadratic_gauss_sum(u64 p, const ResidueContext& ctx) {
  const auto zeta_p = ctx.root_of_unity(p);
  require(zeta_p.has_value(), "context d is not divisible by p = " + std::to_string(p));
  const Field& f = ctx.field();
  Elem sum = 0;
  for (u64 x = 0; x < p; ++x) sum = f.add(sum, f.pow(*zeta_p, static_cast<i64>(x * x % p)));
  return sum;
}

Elem gauss_sqrt_p(u64 p, const ResidueContext& ctx) {
  require(p % 2 == 1, "square roots via Gauss sums need odd characteristic");
  const Elem g = quadratic_gauss_sum(p, ctx);
  if (p % 4 == 1) return g;
  const auto zeta4 = ctx.root_of_unity(4);
  require(zeta4.has_value(), "p = " + std::to_string(p) + " is 3 mod 4 and the context lacks a 4th root of unity");
  return ctx.field().div(g, *zeta4);
}

Elem gauss_sqrt(const Field& source, const ResidueContext& ctx) {
  const Field& f = ctx.field();
  const Elem root = f.pow(gauss_sqrt_p(source.characteristic(), ctx), source.degree());
  const Elem q_image = f.from_int(static_cast<i64>(source.order() % ctx.ell()));
  if (f.mul(root, root) != q_image) throw Error("internal: sqrt(q) does not square to q");
  return root;
}

}  // namespace tracelab
