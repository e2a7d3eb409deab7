/**
 * @file cyclo.hpp
 * @brief Exact cyclotomic integers, residue fields of Z[zeta_d], and characters.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "tracelab/ff.hpp"

namespace tracelab {

using BigInt = boost::multiprecision::cpp_int;

/// Coefficients of the d-th cyclotomic polynomial, constant term first.
std::vector<i64> cyclotomic_polynomial(u64 d);

/// Element of Z[zeta_d], stored as a residue modulo Phi_d.
class CycloElement {
 public:
  explicit CycloElement(u64 d);
  static CycloElement integer(u64 d, const BigInt& value);
  static CycloElement zeta_power(u64 d, i64 k);
  /// Reduces a vector indexed by powers of zeta (any length) modulo Phi_d.
  static CycloElement from_powers(u64 d, std::vector<BigInt> powers);

  u64 order() const { return d_; }
  const std::vector<BigInt>& coefficients() const { return coeffs_; }
  bool is_integer() const;
  /// Image under zeta -> zeta^{-1}.
  CycloElement conj() const;
  CycloElement pow(unsigned k) const;
  std::string to_string() const;

  CycloElement& operator+=(const CycloElement& other);
  CycloElement& operator-=(const CycloElement& other);
  friend CycloElement operator+(CycloElement a, const CycloElement& b) { return a += b; }
  friend CycloElement operator-(CycloElement a, const CycloElement& b) { return a -= b; }
  friend CycloElement operator*(const CycloElement& a, const CycloElement& b);
  friend bool operator==(const CycloElement& a, const CycloElement& b) = default;

 private:
  void check_same(const CycloElement& other) const;

  u64 d_;
  std::vector<BigInt> coeffs_;
};

struct ZetaTerm {
  BigInt coeff;
  i64 exponent;
};

/// Exact value of sum_i c_i zeta_d^{e_i}.
CycloElement cyclo_oracle_value(u64 d, std::span<const ZetaTerm> terms, u64 phi_budget = 64);

/// Least m >= 1 with ell^m = 1 mod d; 1 when d = 1.
u64 residue_degree(u64 d, u64 ell);

/// A prime above ell in Z[zeta_d], realized as F_{ell^m} with the image of zeta_d.
class ResidueContext {
 public:
  /// zeta_d = g^{conjugate (ell^m - 1)/d} for the canonical generator g.
  static ResidueContext build(u64 d, u64 ell, u64 conjugate = 1, const FieldLimits& limits = {});

  u64 d() const { return d_; }
  u64 ell() const { return ell_; }
  u64 m() const { return static_cast<u64>(field_.degree()); }
  u64 conjugate() const { return conjugate_; }
  const Field& field() const { return field_; }
  Elem zeta() const { return zeta_; }
  /// zeta_d^{d/r}, a primitive r-th root of unity, when r divides d.
  std::optional<Elem> root_of_unity(u64 r) const;
  Elem image(i64 n) const { return field_.from_int(n); }

  nlohmann::json to_json() const;
  friend bool operator==(const ResidueContext& a, const ResidueContext& b);

 private:
  ResidueContext(u64 d, u64 ell, u64 conjugate, Field field, Elem zeta)
      : d_(d), ell_(ell), conjugate_(conjugate), field_(std::move(field)), zeta_(zeta) {}

  u64 d_;
  u64 ell_;
  u64 conjugate_;
  Field field_;
  Elem zeta_;
};

/// The reduction map Z[zeta_d] -> F_l.
Elem reduce(const CycloElement& x, const ResidueContext& ctx);

/// psi(x) = zeta_p^{tr x}, valued in the residue field.
class AdditiveCharacter {
 public:
  AdditiveCharacter(Field source, ResidueContext ctx);

  const Field& source() const { return source_; }
  const ResidueContext& context() const { return ctx_; }
  Elem operator()(Elem x) const { return powers_[source_.trace(x)]; }
  /// Exponent of zeta_p in psi(x).
  u64 exponent(Elem x) const { return source_.trace(x); }
  std::complex<double> complex_value(Elem x) const;

 private:
  Field source_;
  ResidueContext ctx_;
  std::vector<Elem> powers_;
};

/// chi(g^k) = zeta_order^k, chi(0) = 0.
class MultiplicativeCharacter {
 public:
  MultiplicativeCharacter(Field source, u64 order, ResidueContext ctx);

  const Field& source() const { return source_; }
  const ResidueContext& context() const { return ctx_; }
  u64 order() const { return order_; }
  Elem operator()(Elem x) const;
  /// Exponent of zeta_order in chi(x); nullopt at zero.
  std::optional<u64> exponent(Elem x) const;
  std::complex<double> complex_value(Elem x) const;

 private:
  Field source_;
  u64 order_;
  ResidueContext ctx_;
  std::vector<Elem> powers_;
};

/// Image of sqrt(p) from the quadratic Gauss sum over F_p.
Elem gauss_sqrt_p(u64 p, const ResidueContext& ctx);

/// Image of sqrt(q) = sqrt(p)^e; squares to the image of q.
Elem gauss_sqrt(const Field& source, const ResidueContext& ctx);

/// The quadratic Gauss sum sum_{x in F_p} psi(x^2) in the residue field.
Elem quadratic_gauss_sum(u64 p, const ResidueContext& ctx);

}  // namespace tracelab
