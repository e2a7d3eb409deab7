#include "tracelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "tracelab/errors.hpp"
#include "tracelab/numtheory.hpp"
#include "tracelab/tracefn.hpp"

namespace tracelab {

// ---------------------------------------------------------------------------
// Group specifications

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::GL: return "GL";
    case GroupKind::SL: return "SL";
    case GroupKind::Sp: return "Sp";
    case GroupKind::SO_odd: return "SO_odd";
    case GroupKind::SO_plus: return "SO_plus";
    case GroupKind::mu: return "mu";
  }
  return "unknown";
}

GroupKind parse_group_kind(const std::string& text) {
  for (GroupKind k : {GroupKind::GL, GroupKind::SL, GroupKind::Sp, GroupKind::SO_odd, GroupKind::SO_plus, GroupKind::mu}) {
    if (to_string(k) == text) return k;
  }
  throw PreconditionError("unknown group kind '" + text + "' (expected GL, SL, Sp, SO_odd, SO_plus or mu)");
}

GroupSpec::GroupSpec(GroupKind kind_, u64 size_, Field field_) : kind(kind_), size(size_), field(std::move(field_)) {
  require(size >= 1, "group size parameter must be positive");
  const bool odd_char = field.characteristic() % 2 == 1;
  switch (kind) {
    case GroupKind::GL:
    case GroupKind::SL: break;
    case GroupKind::Sp: require(size % 2 == 0, "Sp_n needs n even"); break;
    case GroupKind::SO_odd:
      require(size % 2 == 1 && size >= 3, "SO_odd needs odd n >= 3");
      require(odd_char, "orthogonal groups need odd characteristic");
      break;
    case GroupKind::SO_plus:
      require(size % 2 == 0, "SO_plus needs n even");
      require(odd_char, "orthogonal groups need odd characteristic");
      break;
    case GroupKind::mu:
      require((field.order() - 1) % size == 0, "mu_d needs d | |F|-1");
      break;
  }
}

std::string GroupSpec::name() const {
  const std::string base = kind == GroupKind::SO_odd || kind == GroupKind::SO_plus ? "SO" : to_string(kind);
  const std::string suffix = kind == GroupKind::SO_plus ? "+" : "";
  return base + suffix + "_" + std::to_string(size) + "(F_" + std::to_string(field.order()) + ")";
}

nlohmann::json GroupSpec::to_json() const {
  return {{"kind", to_string(kind)}, {"size", size}, {"field_order", field.order()}, {"name", name()}};
}

// ---------------------------------------------------------------------------
// Matrices

Matrix identity(u64 n) {
  Matrix m{n, std::vector<Elem>(n * n, 0)};
  for (u64 i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
  const u64 n = a.n;
  Matrix c{n, std::vector<Elem>(n * n, 0)};
  for (u64 i = 0; i < n; ++i) {
    for (u64 k = 0; k < n; ++k) {
      const Elem aik = a(i, k);
      if (aik == 0) continue;
      for (u64 j = 0; j < n; ++j) c(i, j) = f.add(c(i, j), f.mul(aik, b(k, j)));
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t{a.n, a.entries};
  for (u64 i = 0; i < a.n; ++i) {
    for (u64 j = 0; j < a.n; ++j) t(i, j) = a(j, i);
  }
  return t;
}

Elem determinant(const Field& f, Matrix a) {
  const u64 n = a.n;
  Elem det = 1;
  for (u64 col = 0; col < n; ++col) {
    u64 pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      for (u64 j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      det = f.neg(det);
    }
    const Elem p = a(col, col);
    det = f.mul(det, p);
    const Elem pinv = f.inv(p);
    for (u64 i = col + 1; i < n; ++i) {
      const Elem factor = f.mul(a(i, col), pinv);
      if (factor == 0) continue;
      for (u64 j = col; j < n; ++j) a(i, j) = f.sub(a(i, j), f.mul(factor, a(col, j)));
    }
  }
  return det;
}

Elem trace(const Field& f, const Matrix& a) {
  Elem t = 0;
  for (u64 i = 0; i < a.n; ++i) t = f.add(t, a(i, i));
  return t;
}

Matrix symplectic_form(const Field& f, u64 n) {
  Matrix j{n, std::vector<Elem>(n * n, 0)};
  for (u64 i = 0; i < n; ++i) j(i, n - 1 - i) = i < n / 2 ? f.one() : f.neg(f.one());
  return j;
}

Matrix orthogonal_form(u64 n) {
  Matrix b{n, std::vector<Elem>(n * n, 0)};
  for (u64 i = 0; i < n; ++i) b(i, n - 1 - i) = 1;
  return b;
}

// ---------------------------------------------------------------------------
// Orders and enumeration

BigInt group_order(const GroupSpec& spec) {
  const BigInt Q = spec.field.order();
  const u64 n = spec.size;
  auto qpow = [&](u64 k) { return boost::multiprecision::pow(Q, static_cast<unsigned>(k)); };
  BigInt order = 1;
  switch (spec.kind) {
    case GroupKind::GL:
    case GroupKind::SL:
      for (u64 i = 0; i < n; ++i) order *= qpow(n) - qpow(i);
      if (spec.kind == GroupKind::SL) order /= Q - 1;
      return order;
    case GroupKind::Sp:
    case GroupKind::SO_odd: {
      const u64 m = spec.kind == GroupKind::Sp ? n / 2 : (n - 1) / 2;
      order = qpow(m * m);
      for (u64 i = 1; i <= m; ++i) order *= qpow(2 * i) - 1;
      return order;
    }
    case GroupKind::SO_plus: {
      const u64 m = n / 2;
      order = qpow(m * (m - 1)) * (qpow(m) - 1);
      for (u64 i = 1; i < m; ++i) order *= qpow(2 * i) - 1;
      return order;
    }
    case GroupKind::mu: return BigInt(spec.size);
  }
  return order;
}

namespace {

using Visitor = std::function<void(const Matrix&)>;

u64 matrix_key(const Matrix& m, u64 Q) {
  u64 key = 0;
  for (Elem x : m.entries) key = key * Q + x;
  return key;
}

void require_key_fits(u64 Q, u64 n) {
  const double bits = static_cast<double>(n * n) * std::log2(static_cast<double>(Q));
  if (bits >= 63.0) throw BudgetError("matrices of size " + std::to_string(n) + " over F_" + std::to_string(Q) + " are too large to enumerate");
}

u64 scan_size(u64 Q, u64 cells, const EnumerationLimits& limits) {
  return checked_pow(Q, cells, limits.max_scan);
}

void visit_linear(const GroupSpec& spec, const EnumerationLimits& limits, const Visitor& visit) {
  const Field& f = spec.field;
  const u64 Q = f.order();
  const u64 n = spec.size;
  const u64 total = scan_size(Q, n * n, limits);
  Matrix m{n, std::vector<Elem>(n * n, 0)};
  for (u64 index = 0; index < total; ++index) {
    u64 rest = index;
    for (u64 c = 0; c < n * n; ++c) {
      m.entries[c] = static_cast<Elem>(rest % Q);
      rest /= Q;
    }
    const Elem det = determinant(f, m);
    if (det == 0) continue;
    if (spec.kind == GroupKind::SL && det != 1) continue;
    visit(m);
  }
}

// x -> x + lambda <u, x> u acts on the right of M as M + (M u)(lambda u^T J).
struct Transvection {
  std::vector<Elem> u;
  std::vector<Elem> row;
};

Transvection transvection(const Field& f, const Matrix& form, std::vector<Elem> u, Elem lambda) {
  const u64 n = form.n;
  std::vector<Elem> row(n, 0);
  for (u64 j = 0; j < n; ++j) {
    for (u64 k = 0; k < n; ++k) row[j] = f.add(row[j], f.mul(u[k], form(k, j)));
    row[j] = f.mul(lambda, row[j]);
  }
  return {std::move(u), std::move(row)};
}

// Addition and multiplication tables for the small fields where enumeration is feasible.
class SmallArithmetic {
 public:
  explicit SmallArithmetic(const Field& f) : field_(f), q_(f.order()) {
    if (q_ > 256) return;
    add_.resize(q_ * q_);
    mul_.resize(q_ * q_);
    for (Elem a = 0; a < q_; ++a) {
      for (Elem b = 0; b < q_; ++b) {
        add_[a * q_ + b] = f.add(a, b);
        mul_[a * q_ + b] = f.mul(a, b);
      }
    }
  }
  Elem add(Elem a, Elem b) const { return add_.empty() ? field_.add(a, b) : add_[a * q_ + b]; }
  Elem mul(Elem a, Elem b) const { return mul_.empty() ? field_.mul(a, b) : mul_[a * q_ + b]; }

 private:
  const Field& field_;
  u64 q_;
  std::vector<Elem> add_;
  std::vector<Elem> mul_;
};

void apply(const SmallArithmetic& f, const Matrix& m, const Transvection& t, Matrix& out) {
  const u64 n = m.n;
  out.entries = m.entries;
  for (u64 i = 0; i < n; ++i) {
    Elem mu = 0;
    for (u64 k = 0; k < n; ++k) {
      if (t.u[k] != 0) mu = f.add(mu, f.mul(m(i, k), t.u[k]));
    }
    if (mu == 0) continue;
    for (u64 j = 0; j < n; ++j) {
      if (t.row[j] != 0) out(i, j) = f.add(out(i, j), f.mul(mu, t.row[j]));
    }
  }
}

// Open-addressing set of matrix keys; BFS over a million elements is dominated by membership tests.
class KeySet {
 public:
  explicit KeySet(u64 expected) {
    u64 cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    slots_.assign(cap, 0);
  }
  bool insert(u64 key) {
    const u64 stored = key + 1;
    if (2 * (size_ + 1) > slots_.size()) grow();
    const u64 mask = slots_.size() - 1;
    for (u64 i = mix(stored) & mask;; i = (i + 1) & mask) {
      if (slots_[i] == stored) return false;
      if (slots_[i] == 0) {
        slots_[i] = stored;
        ++size_;
        return true;
      }
    }
  }
  u64 size() const { return size_; }

 private:
  static u64 mix(u64 x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
  }
  void grow() {
    std::vector<u64> old = std::move(slots_);
    slots_.assign(old.size() * 2, 0);
    size_ = 0;
    for (u64 v : old) {
      if (v != 0) insert(v - 1);
    }
  }

  std::vector<u64> slots_;
  u64 size_ = 0;
};

void visit_symplectic(const GroupSpec& spec, const EnumerationLimits& limits, const Visitor& visit) {
  const Field& f = spec.field;
  const u64 n = spec.size;
  const u64 Q = f.order();
  require_key_fits(Q, n);
  const Matrix form = symplectic_form(f, n);

  std::vector<Elem> scalars;
  for (int k = 0; k < f.degree(); ++k) scalars.push_back(static_cast<Elem>(checked_pow(f.characteristic(), static_cast<u64>(k), Q)));
  std::vector<Transvection> gens;
  for (u64 i = 0; i < n; ++i) {
    for (u64 j = i; j < n; ++j) {
      std::vector<Elem> u(n, 0);
      u[i] = 1;
      if (j != i) u[j] = 1;
      for (Elem s : scalars) gens.push_back(transvection(f, form, u, s));
    }
  }

  KeySet seen(static_cast<u64>(std::min<BigInt>(group_order(spec), BigInt(limits.max_elements))));
  std::vector<Matrix> frontier{identity(n)};
  seen.insert(matrix_key(frontier.front(), Q));
  visit(frontier.front());
  const SmallArithmetic arith(f);
  Matrix prod{n, {}};
  while (!frontier.empty()) {
    std::vector<Matrix> next;
    for (const Matrix& m : frontier) {
      for (const Transvection& g : gens) {
        apply(arith, m, g, prod);
        if (!seen.insert(matrix_key(prod, Q))) continue;
        if (seen.size() > limits.max_elements) {
          throw BudgetError("symplectic enumeration exceeds " + std::to_string(limits.max_elements) + " elements");
        }
        visit(prod);
        next.push_back(prod);
      }
    }
    frontier = std::move(next);
  }
}

void visit_orthogonal(const GroupSpec& spec, const EnumerationLimits& limits, const Visitor& visit) {
  const Field& f = spec.field;
  const u64 n = spec.size;
  const u64 Q = f.order();
  const Matrix form = orthogonal_form(n);
  const u64 count = scan_size(Q, n, limits);

  // All vectors with their form value v^T B v; B pairs coordinate i with n-1-i.
  std::vector<std::vector<Elem>> vectors(count, std::vector<Elem>(n));
  for (u64 index = 0; index < count; ++index) {
    u64 rest = index;
    for (u64 c = 0; c < n; ++c) {
      vectors[index][c] = static_cast<Elem>(rest % Q);
      rest /= Q;
    }
  }
  auto pairing = [&](const std::vector<Elem>& a, const std::vector<Elem>& b) {
    Elem s = 0;
    for (u64 i = 0; i < n; ++i) s = f.add(s, f.mul(a[i], b[n - 1 - i]));
    return s;
  };

  std::vector<u64> chosen(n);
  u64 visited = 0;
  Matrix m{n, std::vector<Elem>(n * n, 0)};
  std::function<void(u64)> extend = [&](u64 col) {
    if (col == n) {
      for (u64 j = 0; j < n; ++j) {
        for (u64 i = 0; i < n; ++i) m(i, j) = vectors[chosen[j]][i];
      }
      if (determinant(f, m) != 1) return;
      if (++visited > limits.max_elements) {
        throw BudgetError("orthogonal enumeration exceeds " + std::to_string(limits.max_elements) + " elements");
      }
      visit(m);
      return;
    }
    for (u64 v = 0; v < count; ++v) {
      const auto& cand = vectors[v];
      if (pairing(cand, cand) != form(col, col)) continue;
      bool ok = true;
      for (u64 i = 0; i < col && ok; ++i) ok = pairing(vectors[chosen[i]], cand) == form(i, col);
      if (!ok) continue;
      chosen[col] = v;
      extend(col + 1);
    }
  };
  extend(0);
}

Elem root_of_order(const Field& f, u64 d) { return f.pow(f.generator(), static_cast<i64>((f.order() - 1) / d)); }

void visit_group(const GroupSpec& spec, const EnumerationLimits& limits, const Visitor& visit) {
  switch (spec.kind) {
    case GroupKind::GL:
    case GroupKind::SL: visit_linear(spec, limits, visit); return;
    case GroupKind::Sp: visit_symplectic(spec, limits, visit); return;
    case GroupKind::SO_odd:
    case GroupKind::SO_plus: visit_orthogonal(spec, limits, visit); return;
    case GroupKind::mu: {
      const Elem zeta = root_of_order(spec.field, spec.size);
      Elem v = 1;
      for (u64 i = 0; i < spec.size; ++i) {
        visit(Matrix{1, {v}});
        v = spec.field.mul(v, zeta);
      }
      return;
    }
  }
}

}  // namespace

std::vector<Matrix> enumerate_group(const GroupSpec& spec, const EnumerationLimits& limits) {
  std::vector<Matrix> out;
  visit_group(spec, limits, [&](const Matrix& m) {
    if (out.size() >= limits.max_elements) {
      throw BudgetError("group enumeration exceeds " + std::to_string(limits.max_elements) + " elements");
    }
    out.push_back(m);
  });
  return out;
}

std::vector<u64> trace_histogram(const GroupSpec& spec, const EnumerationLimits& limits) {
  std::vector<u64> hist(spec.field.order(), 0);
  u64 total = 0;
  visit_group(spec, limits, [&](const Matrix& m) {
    ++hist[trace(spec.field, m)];
    ++total;
  });
  if (BigInt(total) != group_order(spec)) {
    throw Error("enumerated " + std::to_string(total) + " elements of " + spec.name() + ", expected " +
                group_order(spec).str());
  }
  return hist;
}

// ---------------------------------------------------------------------------
// Sampling

GroupSampler::GroupSampler(GroupSpec spec, const EnumerationLimits& limits) : spec_(std::move(spec)) {
  switch (spec_.kind) {
    case GroupKind::GL:
    case GroupKind::SL: break;
    case GroupKind::mu: zeta_ = root_of_order(spec_.field, spec_.size); break;
    default: elements_ = enumerate_group(spec_, limits); break;
  }
}

Matrix GroupSampler::random_invertible(Rng& rng) const {
  const Field& f = spec_.field;
  const u64 n = spec_.size;
  Matrix m{n, std::vector<Elem>(n * n)};
  do {
    for (Elem& x : m.entries) x = static_cast<Elem>(uniform_below(rng, f.order()));
  } while (determinant(f, m) == 0);
  return m;
}

Matrix GroupSampler::sample(Rng& rng) const {
  const Field& f = spec_.field;
  switch (spec_.kind) {
    case GroupKind::GL: return random_invertible(rng);
    case GroupKind::SL: {
      Matrix m = random_invertible(rng);
      const Elem scale = f.inv(determinant(f, m));
      for (u64 j = 0; j < m.n; ++j) m(0, j) = f.mul(m(0, j), scale);
      return m;
    }
    case GroupKind::mu: return Matrix{1, {f.pow(zeta_, static_cast<i64>(uniform_below(rng, spec_.size)))}};
    default: return elements_[uniform_below(rng, elements_.size())];
  }
}

Elem GroupSampler::sample_trace(Rng& rng) const { return trace(spec_.field, sample(rng)); }

// ---------------------------------------------------------------------------
// Gaussian sums

std::complex<double> residue_character(const Field& f, Elem a, Elem x) {
  const double ell = static_cast<double>(f.characteristic());
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(f.trace(f.mul(a, x))) / ell);
}

namespace {

std::complex<double> sum_over_histogram(const Field& f, std::span<const u64> hist, Elem a) {
  std::complex<double> acc = 0.0;
  for (Elem t = 0; t < hist.size(); ++t) {
    if (hist[t] != 0) acc += static_cast<double>(hist[t]) * residue_character(f, a, t);
  }
  return acc;
}

BigInt big_pow(u64 base, u64 exp) { return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp)); }

BigInt gaussian_binomial(u64 m, u64 r, u64 L) {
  BigInt num = 1;
  BigInt den = 1;
  for (u64 j = 0; j < r; ++j) {
    num *= big_pow(L, m - j) - 1;
    den *= big_pow(L, r - j) - 1;
  }
  return num / den;
}

// Sum over j_k..j_{l-1} with lower bounds 2l-1-2k and each index at most two below the previous.
BigInt j_chain(u64 k, u64 l, i64 upper, u64 L) {
  if (k > l - 1) return 1;
  BigInt acc = 0;
  const i64 lower = static_cast<i64>(2 * l) - 1 - 2 * static_cast<i64>(k);
  for (i64 j = lower; j <= upper; ++j) acc += (big_pow(L, static_cast<u64>(j)) - 1) * j_chain(k + 1, l, j - 2, L);
  return acc;
}

// Coefficients of the Kim expansion as a polynomial in Kl_2.
std::vector<BigInt> kim_coefficients(u64 m, u64 L) {
  std::vector<BigInt> coeff(m + 1, 0);
  const BigInt lead = big_pow(L, m * m - 1);
  for (u64 r = 0; r <= m / 2; ++r) {
    BigInt outer = big_pow(L, r * (r + 1)) * gaussian_binomial(m, 2 * r, L);
    for (u64 i = 1; i <= r; ++i) outer *= big_pow(L, 2 * i - 1) - 1;
    for (u64 l = 1; l <= m / 2 - r + 1; ++l) {
      const u64 exponent = m - 2 * r + 2 - 2 * l;
      const BigInt inner = big_pow(L, l) * j_chain(1, l, static_cast<i64>(m - 2 * r) - 1, L);
      coeff[exponent] += lead * outer * inner;
    }
  }
  return coeff;
}

std::complex<double> evaluate_kim(u64 m, u64 L, std::complex<double> kl2) {
  const auto coeff = kim_coefficients(m, L);
  std::complex<double> acc = 0.0;
  for (std::size_t e = coeff.size(); e-- > 0;) acc = acc * kl2 + coeff[e].convert_to<double>();
  return acc;
}

bool closed_form_available(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupKind::Sp: return symplectic_closed_form_enabled(spec.size / 2);
    case GroupKind::SO_odd: return symplectic_closed_form_enabled((spec.size - 1) / 2);
    case GroupKind::SO_plus: return symplectic_closed_form_enabled(spec.size / 2);
    default: return true;
  }
}

// Closed-form sums for every a, reusing one Kloosterman table.
std::vector<std::complex<double>> closed_sums(const GroupSpec& spec) {
  const Field& f = spec.field;
  const u64 Q = f.order();
  const u64 n = spec.size;
  std::vector<std::complex<double>> out(Q);
  out[0] = group_order(spec).convert_to<double>();
  switch (spec.kind) {
    case GroupKind::GL: {
      const double value = (n % 2 == 0 ? 1.0 : -1.0) * std::pow(static_cast<double>(Q), static_cast<double>(n * (n - 1) / 2));
      for (u64 a = 1; a < Q; ++a) out[a] = value;
      return out;
    }
    case GroupKind::SL: {
      const auto kl = kloosterman_complex(f, n);
      const double scale = std::pow(static_cast<double>(Q), static_cast<double>(n * (n - 1) / 2));
      for (u64 a = 1; a < Q; ++a) out[a] = scale * kl[f.pow(static_cast<Elem>(a), static_cast<i64>(n))];
      return out;
    }
    case GroupKind::Sp:
    case GroupKind::SO_odd:
    case GroupKind::SO_plus: {
      const u64 m = spec.kind == GroupKind::SO_odd ? (n - 1) / 2 : n / 2;
      const auto kl = kloosterman_complex(f, 2);
      const auto coeff = kim_coefficients(m, Q);
      for (u64 a = 1; a < Q; ++a) {
        const std::complex<double> k2 = kl[f.mul(static_cast<Elem>(a), static_cast<Elem>(a))];
        std::complex<double> sp = 0.0;
        for (std::size_t e = coeff.size(); e-- > 0;) sp = sp * k2 + coeff[e].convert_to<double>();
        if (spec.kind == GroupKind::SO_odd) sp *= residue_character(f, static_cast<Elem>(a), 1);
        if (spec.kind == GroupKind::SO_plus) sp /= std::pow(static_cast<double>(Q), static_cast<double>(m));
        out[a] = sp;
      }
      return out;
    }
    case GroupKind::mu: {
      const Elem zeta = root_of_order(f, n);
      for (u64 a = 1; a < Q; ++a) {
        std::complex<double> acc = 0.0;
        Elem v = 1;
        for (u64 i = 0; i < n; ++i) {
          acc += residue_character(f, static_cast<Elem>(a), v);
          v = f.mul(v, zeta);
        }
        out[a] = acc;
      }
      return out;
    }
  }
  return out;
}

}  // namespace

std::complex<double> gaussian_sum_bruteforce(const GroupSpec& spec, Elem a, const EnumerationLimits& limits) {
  const auto hist = trace_histogram(spec, limits);
  return sum_over_histogram(spec.field, hist, a);
}

std::complex<double> kim_symplectic_sum(u64 m, u64 field_order, std::complex<double> kl2) {
  require(m >= 1, "Sp_{2m} needs m >= 1");
  return evaluate_kim(m, field_order, kl2);
}

// Checked against enumeration of Sp_4 over F_2, F_3, F_4 and Sp_6(F_2).
bool symplectic_closed_form_enabled(u64 m) { return m >= 1; }

std::optional<std::complex<double>> gaussian_sum_closed(const GroupSpec& spec, Elem a) {
  require(a != 0 && a < spec.field.order(), "Gaussian sums need a nonzero element of the residue field");
  if (!closed_form_available(spec)) return std::nullopt;
  return closed_sums(spec)[a];
}

GaussianSums gaussian_sums(const GroupSpec& spec, const EnumerationLimits& limits) {
  if (closed_form_available(spec)) return {closed_sums(spec), "closed"};
  const auto hist = trace_histogram(spec, limits);
  GaussianSums out{std::vector<std::complex<double>>(spec.field.order()), "brute"};
  for (Elem a = 0; a < spec.field.order(); ++a) out.values[a] = sum_over_histogram(spec.field, hist, a);
  return out;
}

// ---------------------------------------------------------------------------
// Walk laws

double WalkLaw::mass() const {
  double acc = 0.0;
  for (double p : probabilities) acc += p;
  return acc;
}

double WalkLaw::probability_of(std::span<const Elem> subset) const {
  double acc = 0.0;
  for (Elem a : subset) {
    require(a < probabilities.size(), "subset element outside the residue field");
    acc += probabilities[a];
  }
  return acc;
}

namespace {

void require_steps(u64 steps) { require(steps >= 1, "walk length L must be at least 1"); }

WalkLaw from_exact_counts(u64 steps, std::vector<BigInt> numerators, BigInt denominator, std::string source) {
  WalkLaw law;
  law.steps = steps;
  law.source = std::move(source);
  law.probabilities.resize(numerators.size());
  const BigRational den(denominator);
  for (std::size_t a = 0; a < numerators.size(); ++a) {
    law.probabilities[a] = (BigRational(numerators[a]) / den).convert_to<double>();
  }
  law.numerators = std::move(numerators);
  law.denominator = std::move(denominator);
  return law;
}

CycloElement character_sum_exact(const Field& f, std::span<const u64> hist, Elem b) {
  const u64 ell = f.characteristic();
  std::vector<BigInt> powers(ell, 0);
  for (Elem t = 0; t < hist.size(); ++t) {
    if (hist[t] != 0) powers[f.trace(f.mul(b, t))] += hist[t];
  }
  return CycloElement::from_powers(ell, std::move(powers));
}

CycloElement rotate(const CycloElement& x, u64 shift) {
  const u64 d = x.order();
  if (shift % d == 0) return x;
  return x * CycloElement::zeta_power(d, static_cast<i64>(shift % d));
}

BigInt integer_value(const CycloElement& x, const std::string& what) {
  if (!x.is_integer()) throw Error(what + " is not a rational integer: " + x.to_string());
  return x.coefficients().empty() ? BigInt(0) : x.coefficients().front();
}

}  // namespace

WalkLaw walk_law_exact(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits) {
  require_steps(steps);
  const Field& f = spec.field;
  const u64 Q = f.order();
  const auto sums = gaussian_sums(spec, limits);
  const double order = group_order(spec).convert_to<double>();
  std::vector<std::complex<double>> moments(Q);
  for (u64 b = 0; b < Q; ++b) moments[b] = std::pow(sums.values[b] / order, static_cast<double>(steps));
  moments[0] = 1.0;

  WalkLaw law;
  law.steps = steps;
  law.source = sums.source;
  law.probabilities.resize(Q);
  for (u64 a = 0; a < Q; ++a) {
    const Elem minus_a = f.neg(static_cast<Elem>(a));
    std::complex<double> acc = 0.0;
    for (u64 b = 0; b < Q; ++b) acc += residue_character(f, static_cast<Elem>(b), minus_a) * moments[b];
    acc /= static_cast<double>(Q);
    law.max_imaginary = std::max(law.max_imaginary, std::abs(acc.imag()));
    double p = acc.real();
    if (p < 0.0) {
      if (p < -1e-12) throw Error("walk law has a negative probability " + std::to_string(p));
      p = 0.0;
    }
    law.probabilities[a] = p;
  }
  if (law.max_imaginary > 1e-9) throw Error("walk law is not real: imaginary part " + std::to_string(law.max_imaginary));
  if (std::abs(law.mass() - 1.0) > 1e-9) throw Error("walk law mass " + std::to_string(law.mass()) + " differs from 1");
  return law;
}

WalkLaw walk_law_fourier_rational(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits) {
  require_steps(steps);
  const Field& f = spec.field;
  const u64 Q = f.order();
  const u64 ell = f.characteristic();
  const auto hist = trace_histogram(spec, limits);
  const BigInt order_pow = boost::multiprecision::pow(group_order(spec), static_cast<unsigned>(steps));

  std::vector<CycloElement> moments;
  moments.reserve(Q);
  for (Elem b = 0; b < Q; ++b) moments.push_back(character_sum_exact(f, hist, b).pow(static_cast<unsigned>(steps)));

  std::vector<BigInt> numerators(Q);
  for (Elem a = 0; a < Q; ++a) {
    CycloElement acc(ell);
    for (Elem b = 0; b < Q; ++b) acc += rotate(moments[b], f.trace(f.mul(b, f.neg(a))));
    numerators[a] = integer_value(acc, "Fourier walk numerator");
  }
  return from_exact_counts(steps, std::move(numerators), order_pow * Q, "fourier-exact");
}

WalkLaw walk_law_enumerated(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits) {
  require_steps(steps);
  const Field& f = spec.field;
  const u64 Q = f.order();
  const auto hist = trace_histogram(spec, limits);
  std::vector<BigInt> law(hist.begin(), hist.end());
  for (u64 step = 1; step < steps; ++step) {
    std::vector<BigInt> next(Q, 0);
    for (Elem s = 0; s < Q; ++s) {
      if (law[s] == 0) continue;
      for (Elem t = 0; t < Q; ++t) {
        if (hist[t] != 0) next[f.add(s, t)] += law[s] * hist[t];
      }
    }
    law = std::move(next);
  }
  return from_exact_counts(steps, std::move(law), boost::multiprecision::pow(group_order(spec), static_cast<unsigned>(steps)),
                           "enumerated");
}

WalkLaw walk_law_mc(const GroupSpec& spec, u64 steps, u64 trials, Rng& rng, const EnumerationLimits& limits) {
  require_steps(steps);
  require(trials >= 1, "Monte Carlo needs at least one trial");
  const Field& f = spec.field;
  const GroupSampler sampler(spec, limits);
  std::vector<BigInt> counts(f.order(), 0);
  std::vector<u64> raw(f.order(), 0);
  for (u64 trial = 0; trial < trials; ++trial) {
    Elem s = 0;
    for (u64 i = 0; i < steps; ++i) s = f.add(s, sampler.sample_trace(rng));
    ++raw[s];
  }
  for (std::size_t a = 0; a < raw.size(); ++a) counts[a] = raw[a];
  return from_exact_counts(steps, std::move(counts), BigInt(trials), "monte-carlo");
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "total variation needs laws on the same field");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / 2.0;
}

// ---------------------------------------------------------------------------
// Constants and scales

GroupConstants constants(const GroupSpec& spec) {
  const i64 n = static_cast<i64>(spec.size);
  GroupConstants c;
  switch (spec.kind) {
    case GroupKind::GL:
      c.alpha = Fraction(n * (n - 1), 2);
      c.dim = static_cast<u64>(n * n);
      c.rank = static_cast<u64>(n);
      break;
    case GroupKind::SL:
      c.alpha = Fraction(n * n - 1, 2);
      c.dim = static_cast<u64>(n * n - 1);
      c.rank = static_cast<u64>(n - 1);
      break;
    case GroupKind::Sp:
      c.alpha = Fraction(n * (n + 2), 8);
      c.dim = static_cast<u64>(n * (n + 1) / 2);
      c.rank = static_cast<u64>(n / 2);
      break;
    case GroupKind::SO_odd:
      c.alpha = Fraction(n * n - 1, 8);
      c.dim = static_cast<u64>(n * (n - 1) / 2);
      c.rank = static_cast<u64>((n - 1) / 2);
      break;
    case GroupKind::SO_plus:
      c.alpha = Fraction(n * (n - 2), 8);
      c.dim = static_cast<u64>(n * (n - 1) / 2);
      c.rank = static_cast<u64>(n / 2);
      break;
    case GroupKind::mu: throw PreconditionError("mu_d has no tabulated constants; use mu_alpha_empirical");
  }
  c.beta_plus = Fraction(static_cast<i64>(c.dim + c.rank), 2);
  c.beta_minus = Fraction(static_cast<i64>(c.dim - c.rank), 2);
  return c;
}

MuAlpha mu_alpha_empirical(const Field& residue, u64 d) {
  const u64 Q = residue.order();
  require(d >= 1 && (Q - 1) % d == 0, "mu_d needs d | |F|-1");
  require(Q >= 2, "residue field too small");
  const Elem zeta = root_of_order(residue, d);
  std::vector<Elem> roots(d);
  roots[0] = 1;
  for (u64 i = 1; i < d; ++i) roots[i] = residue.mul(roots[i - 1], zeta);

  MuAlpha out;
  out.max_abs = -1.0;
  for (Elem b = 1; b < Q; ++b) {
    std::complex<double> acc = 0.0;
    for (Elem v : roots) acc += residue_character(residue, b, v);
    const double mag = std::abs(acc) / static_cast<double>(d);
    if (mag > out.max_abs + 1e-12) {
      out.max_abs = mag;
      out.argmax = b;
    }
  }
  out.alpha = out.max_abs <= 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::log(out.max_abs) / std::log(static_cast<double>(Q));
  return out;
}

std::optional<double> explicit_alpha(double delta, bool prime_residue_field) {
  std::optional<double> best;
  auto offer = [&](double v) { best = best ? std::max(*best, v) : v; };
  if (delta > 0.5) offer(delta - 0.5);
  if (prime_residue_field && delta > 1.0 / 3.0 && delta <= 1.0) {
    if (delta <= 0.5) {
      offer((3.0 * delta - 1.0) / 8.0);
    } else if (delta <= 2.0 / 3.0) {
      offer((5.0 * delta - 2.0) / 8.0);
    } else {
      offer(delta - 2.0 / 3.0);
    }
  }
  return best;
}

double error_scale(const GroupSpec& spec, u64 steps) {
  require_steps(steps);
  if (spec.kind == GroupKind::mu) {
    const double d = static_cast<double>(spec.size);
    return std::pow(d, static_cast<double>(is_prime(spec.size) ? steps : steps + 1));
  }
  const auto c = constants(spec);
  const double exponent = static_cast<double>(steps) * boost::rational_cast<double>(c.beta_plus) +
                          2.0 * boost::rational_cast<double>(c.beta_minus);
  return std::pow(static_cast<double>(spec.field.order()), exponent);
}

// ---------------------------------------------------------------------------
// Model statistics of families

ModelFamilyPrediction model_family_stats(const GroupSpec& spec, const FamilyStats& stats, const EnumerationLimits& limits) {
  require(stats.family_size >= 1, "family statistics are empty");
  const u64 Q = spec.field.order();
  const auto sums = gaussian_sums(spec, limits);
  const double order = group_order(spec).convert_to<double>();
  const double K = static_cast<double>(stats.family_size);

  std::complex<double> pair_sum = 0.0;
  for (u64 b = 1; b < Q; ++b) {
    const std::complex<double> mu = sums.values[b] / order;
    for (const auto& [sizes, count] : stats.set_differences) {
      pair_sum += static_cast<double>(count) * std::pow(mu, static_cast<double>(sizes.first)) *
                  std::pow(std::conj(mu), static_cast<double>(sizes.second));
    }
  }
  ModelFamilyPrediction out;
  const double Qd = static_cast<double>(Q);
  out.model_variance = ((Qd - 1.0) / Qd + pair_sum.real() / (K * Qd)) / K;
  out.alpha = spec.kind == GroupKind::mu ? mu_alpha_empirical(spec.field, spec.size).alpha
                                         : boost::rational_cast<double>(constants(spec).alpha);
  out.expected_density_error = stats.G(out.alpha, Qd);
  return out;
}

BigRational model_variance_exact(const GroupSpec& spec, const FamilyStats& stats, const EnumerationLimits& limits) {
  require(stats.family_size >= 1, "family statistics are empty");
  const Field& f = spec.field;
  const u64 Q = f.order();
  const auto hist = trace_histogram(spec, limits);
  const BigInt order = group_order(spec);

  std::vector<CycloElement> sums;
  for (Elem b = 1; b < Q; ++b) sums.push_back(character_sum_exact(f, hist, b));

  BigRational pair_sum = 0;
  for (const auto& [sizes, count] : stats.set_differences) {
    CycloElement acc(f.characteristic());
    for (const auto& s : sums) acc += s.pow(static_cast<unsigned>(sizes.first)) * s.conj().pow(static_cast<unsigned>(sizes.second));
    const BigInt total = integer_value(acc, "model pair sum");
    pair_sum += BigRational(total * count) /
                BigRational(boost::multiprecision::pow(order, static_cast<unsigned>(sizes.first + sizes.second)));
  }
  const BigRational K(static_cast<u64>(stats.family_size));
  const BigRational Qr(Q);
  return ((Qr - 1) / Qr + pair_sum / (K * Qr)) / K;
}

}  // namespace tracelab
