#include "tracelab/poly.hpp"

#include <algorithm>

#include "tracelab/errors.hpp"

namespace tracelab::poly {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly add(const Field& f, const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f.add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  }
  trim(out);
  return out;
}

Poly sub(const Field& f, const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = f.sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0);
  }
  trim(out);
  return out;
}

Poly mul(const Field& f, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
  }
  trim(out);
  return out;
}

std::pair<Poly, Poly> divmod(const Field& f, const Poly& a, const Poly& b) {
  if (b.empty()) throw DivisionByZero("polynomial division by zero");
  Poly rem = a;
  trim(rem);
  if (rem.size() < b.size()) return {Poly{}, rem};
  Poly quot(rem.size() - b.size() + 1, 0);
  const Elem lead_inv = f.inv(b.back());
  while (rem.size() >= b.size()) {
    const Elem c = f.mul(rem.back(), lead_inv);
    const std::size_t shift = rem.size() - b.size();
    quot[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) rem[shift + i] = f.sub(rem[shift + i], f.mul(c, b[i]));
    trim(rem);
  }
  trim(quot);
  return {quot, rem};
}

Poly monic(const Field& f, const Poly& a) {
  if (a.empty()) return a;
  const Elem lead_inv = f.inv(a.back());
  Poly out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.mul(a[i], lead_inv);
  return out;
}

Poly gcd(const Field& f, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(f, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(f, a);
}

Poly derivative(const Field& f, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = f.scale(a[i], i);
  trim(out);
  return out;
}

Elem eval(const Field& f, const Poly& a, Elem x) {
  Elem acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = f.add(f.mul(acc, x), a[i]);
  return acc;
}

Poly from_ints(const Field& f, std::span<const i64> coeffs) {
  Poly out;
  for (i64 c : coeffs) out.push_back(f.from_int(c));
  trim(out);
  return out;
}

Poly from_roots(const Field& f, std::span<const Elem> roots) {
  Poly out{f.one()};
  for (Elem r : roots) out = mul(f, out, Poly{f.neg(r), f.one()});
  return out;
}

namespace {

Poly pth_root(const Field& f, const Poly& a) {
  const u64 p = f.characteristic();
  const i64 root_exponent = static_cast<i64>(f.order() / p);
  Poly out;
  for (std::size_t i = 0; i < a.size(); i += p) out.push_back(f.pow(a[i], root_exponent));
  trim(out);
  return out;
}

}  // namespace

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Field& f, const Poly& a) {
  require(!a.empty(), "squarefree decomposition of the zero polynomial");
  std::vector<std::pair<Poly, int>> out;
  Poly g = monic(f, a);
  if (degree(g) == 0) return out;
  Poly c = gcd(f, g, derivative(f, g));
  Poly w = divmod(f, g, c).first;
  int i = 1;
  while (degree(w) > 0) {
    Poly y = gcd(f, w, c);
    Poly factor = divmod(f, w, y).first;
    if (degree(factor) > 0) out.emplace_back(monic(f, factor), i);
    w = y;
    c = divmod(f, c, y).first;
    ++i;
  }
  if (degree(c) > 0) {
    const int p = static_cast<int>(f.characteristic());
    for (auto& [factor, k] : squarefree_decomposition(f, pth_root(f, c))) out.emplace_back(factor, k * p);
  }
  return out;
}

std::vector<Elem> roots(const Field& f, const Poly& a) {
  std::vector<Elem> out;
  for (u64 x = 0; x < f.order(); ++x) {
    if (eval(f, a, static_cast<Elem>(x)) == 0) out.push_back(static_cast<Elem>(x));
  }
  return out;
}

}  // namespace tracelab::poly
