#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tracelab/ff.hpp"

namespace tracelab {

/// Polynomial over a Field, constant term first, no trailing zeros.
using Poly = std::vector<Elem>;

namespace poly {

void trim(Poly& a);
int degree(const Poly& a);  // -1 for the zero polynomial
Poly add(const Field& f, const Poly& a, const Poly& b);
Poly sub(const Field& f, const Poly& a, const Poly& b);
Poly mul(const Field& f, const Poly& a, const Poly& b);
std::pair<Poly, Poly> divmod(const Field& f, const Poly& a, const Poly& b);
Poly monic(const Field& f, const Poly& a);
Poly gcd(const Field& f, Poly a, Poly b);
Poly derivative(const Field& f, const Poly& a);
Elem eval(const Field& f, const Poly& a, Elem x);
/// Integer coefficients reduced into the prime field.
Poly from_ints(const Field& f, std::span<const i64> coeffs);
/// Product of (X - r) over the roots.
Poly from_roots(const Field& f, std::span<const Elem> roots);

/// Monic squarefree factors with multiplicities, a = lead * prod f_i^{k_i}.
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Field& f, const Poly& a);

/// Distinct roots lying in the field, by exhaustive evaluation.
std::vector<Elem> roots(const Field& f, const Poly& a);

}  // namespace poly
}  // namespace tracelab
