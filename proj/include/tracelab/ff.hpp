/**
 * @file ff.hpp
 * @brief Finite fields F_{p^e} with canonical modulus, generator and element order.
 *
 * Elements are addressed by their enumeration index sum_i c_i p^i, so index 0
 * is zero, index 1 is one, and the index of x is p. Fields are immutable
 * shared handles; copying a Field is cheap.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/numtheory.hpp"

namespace tracelab {

/// Enumeration index of a field element.
using Elem = std::uint32_t;

struct FieldLimits {
  u64 max_order = u64{1} << 31;
  u64 max_table_order = u64{1} << 22;
};

/// Lexicographically smallest monic irreducible of degree e over Z/p,
/// coefficients constant term first, ordered like element indices.
std::vector<u64> find_irreducible(u64 p, int e, const FieldLimits& limits = {});

/// Rabin irreducibility test for a monic polynomial over Z/p.
bool is_irreducible(u64 p, std::span<const u64> monic);

namespace detail {
struct FieldImpl;
}

class Field {
 public:
  /// F_{p^e} with the canonical modulus.
  static Field make(u64 p, int e, const FieldLimits& limits = {});
  static Field with_modulus(u64 p, std::vector<u64> modulus, const FieldLimits& limits = {});
  /// Parses "p^e:c0,c1,...,ce".
  static Field parse(std::string_view text, const FieldLimits& limits = {});

  u64 characteristic() const;
  int degree() const;
  u64 order() const;
  const std::vector<u64>& modulus() const;
  bool tabulated() const;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  /// Image of an integer in the prime field.
  Elem from_int(i64 value) const;
  Elem from_coeffs(std::span<const u64> coeffs) const;
  std::vector<u64> coeffs(Elem a) const;
  /// Coefficient of x^i.
  u64 coeff(Elem a, int i) const;
  /// Integer value of a prime-field element; throws if a is outside it.
  u64 to_prime(Elem a) const;

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const;
  Elem pow(Elem a, i64 k) const;
  /// Multiplication by an integer (repeated addition).
  Elem scale(Elem a, u64 k) const;

  /// Absolute trace to the prime field, as an integer in [0, p).
  u64 trace(Elem a) const;

  /// Smallest element of full multiplicative order.
  Elem generator() const;
  u64 multiplicative_order(Elem a) const;
  /// Discrete logarithm to the canonical generator; requires tabulation.
  u64 log(Elem a) const;
  /// generator^k.
  Elem exp(u64 k) const;

  std::string format(Elem a) const;
  Elem parse_element(std::string_view text) const;
  /// "p^e:c0,...,ce"
  std::string describe() const;

  friend bool operator==(const Field& a, const Field& b);

 private:
  explicit Field(std::shared_ptr<const detail::FieldImpl> impl) : impl_(std::move(impl)) {}
  void check(Elem a) const;

  std::shared_ptr<const detail::FieldImpl> impl_;
};

/// A value bound to its field; mixed-field operations throw MismatchError.
class FieldElement {
 public:
  FieldElement(Field field, Elem value);

  const Field& field() const { return field_; }
  Elem value() const { return value_; }

  FieldElement inv() const;
  FieldElement pow(i64 k) const;
  u64 trace() const { return field_.trace(value_); }
  std::string to_string() const { return field_.format(value_); }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a);
  friend bool operator==(const FieldElement& a, const FieldElement& b);

 private:
  Field field_;
  Elem value_;
};

}  // namespace tracelab
