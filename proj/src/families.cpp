#include "tracelab/families.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <unordered_set>

#include "tracelab/errors.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::intervals: return "intervals";
    case FamilyKind::boxes: return "boxes";
    case FamilyKind::shifted_subset: return "shifted_subset";
    case FamilyKind::product: return "product";
    case FamilyKind::custom: return "custom";
  }
  return "unknown";
}

namespace {

struct MemberHash {
  std::size_t operator()(const std::vector<Elem>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (Elem x : v) h = (h ^ x) * 1099511628211ULL;
    return h ^ v.size();
  }
};

}  // namespace

SumFamily::SumFamily(Field domain, FamilyKind kind, std::vector<std::vector<Elem>> members, nlohmann::json params)
    : domain_(std::move(domain)), kind_(kind), members_(std::move(members)), params_(std::move(params)) {
  require(!members_.empty(), "a family needs at least one member");
  std::unordered_set<std::vector<Elem>, MemberHash> seen;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    auto& m = members_[k];
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (Elem x : m) require(x < domain_.order(), "family member leaves the domain");
    if (!seen.insert(m).second) {
      throw PreconditionError("family is not injective: member " + std::to_string(k) + " repeats an earlier member");
    }
  }
}

Elem from_coordinates(const Field& f, std::span<const u64> coords) {
  require(coords.size() == static_cast<std::size_t>(f.degree()), "coordinate count must equal the field degree");
  std::vector<u64> c(coords.begin(), coords.end());
  for (u64& v : c) v %= f.characteristic();
  return f.from_coeffs(c);
}

std::vector<u64> coordinates(const Field& f, Elem x) { return f.coeffs(x); }

u64 bounding_box_size(const Field& f, std::span<const Elem> subset) {
  if (subset.empty()) return 0;
  std::vector<u64> lo = f.coeffs(subset.front());
  std::vector<u64> hi = lo;
  for (Elem x : subset) {
    const auto c = f.coeffs(x);
    for (std::size_t i = 0; i < c.size(); ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  }
  u64 size = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) size *= hi[i] - lo[i] + 1;
  return size;
}

SumFamily make_intervals(const Field& f, std::span<const u64> sizes) {
  require(f.degree() == 1, "interval families need a prime field (e = 1)");
  const u64 p = f.characteristic();
  std::vector<std::vector<Elem>> members;
  for (u64 k : sizes) {
    require(k >= 1 && k <= p, "interval size must lie in [1, p]");
    std::vector<Elem> m;
    for (u64 i = 1; i <= k; ++i) m.push_back(static_cast<Elem>(i % p));
    members.push_back(std::move(m));
  }
  return SumFamily(f, FamilyKind::intervals, std::move(members),
                   {{"sizes", std::vector<u64>(sizes.begin(), sizes.end())}});
}

namespace {

/// All coordinate vectors in prod_i {1..k_i}.
void enumerate_box(const Field& f, const std::vector<u64>& corner, std::vector<Elem>& out) {
  const std::size_t e = corner.size();
  std::vector<u64> c(e, 1);
  while (true) {
    out.push_back(from_coordinates(f, c));
    std::size_t i = 0;
    while (i < e && c[i] == corner[i]) c[i++] = 1;
    if (i == e) break;
    ++c[i];
  }
}

}  // namespace

SumFamily make_boxes(const Field& f, std::span<const std::vector<u64>> corners) {
  const u64 p = f.characteristic();
  std::vector<std::vector<Elem>> members;
  for (const auto& corner : corners) {
    require(corner.size() == static_cast<std::size_t>(f.degree()), "box corner must have e coordinates");
    for (u64 k : corner) require(k >= 1 && k <= p, "box side must lie in [1, p]");
    std::vector<Elem> m;
    enumerate_box(f, corner, m);
    members.push_back(std::move(m));
  }
  return SumFamily(f, FamilyKind::boxes, std::move(members),
                   {{"corners", std::vector<std::vector<u64>>(corners.begin(), corners.end())}});
}

SumFamily make_shifted_subset(const Field& f, std::span<const Elem> subset, std::span<const Elem> shifts) {
  require(!subset.empty(), "shifted-subset families need a nonempty E");
  std::vector<std::vector<Elem>> members;
  for (Elem x : shifts) {
    std::vector<Elem> m;
    for (Elem y : subset) m.push_back(f.add(y, x));
    members.push_back(std::move(m));
  }
  nlohmann::json params;
  for (Elem y : subset) params["E"].push_back(f.format(y));
  for (Elem x : shifts) params["shifts"].push_back(f.format(x));
  SumFamily fam(f, FamilyKind::shifted_subset, std::move(members), std::move(params));
  fam.bounding_box_ = bounding_box_size(f, subset);
  return fam;
}

SumFamily make_product(const Field& f, std::span<const SumFamily> factors) {
  require(factors.size() == static_cast<std::size_t>(f.degree()), "need exactly e factor families");
  for (const auto& fac : factors) {
    require(fac.domain().degree() == 1 && fac.domain().characteristic() == f.characteristic(),
            "factor families must live on the prime field");
  }
  const std::size_t e = factors.size();
  std::vector<std::vector<Elem>> members;
  std::vector<std::size_t> index(e, 0);
  while (true) {
    std::vector<Elem> m;
    std::vector<u64> c(e);
    std::vector<std::size_t> pos(e, 0);
    bool empty = false;
    for (std::size_t i = 0; i < e; ++i) empty = empty || factors[i].member(index[i]).empty();
    while (!empty) {
      for (std::size_t i = 0; i < e; ++i) c[i] = factors[i].member(index[i])[pos[i]];
      m.push_back(from_coordinates(f, c));
      std::size_t i = 0;
      while (i < e && pos[i] + 1 == factors[i].member(index[i]).size()) pos[i++] = 0;
      if (i == e) break;
      ++pos[i];
    }
    members.push_back(std::move(m));
    std::size_t i = 0;
    while (i < e && index[i] + 1 == factors[i].size()) index[i++] = 0;
    if (i == e) break;
    ++index[i];
  }
  nlohmann::json params = nlohmann::json::array();
  for (const auto& fac : factors) params.push_back(fac.to_json());
  return SumFamily(f, FamilyKind::product, std::move(members), {{"factors", params}});
}

double FamilyStats::G(double alpha, double n) const {
  double acc = 0.0;
  for (const auto& [d, count] : size_counts) acc += static_cast<double>(count) * std::pow(n, -alpha * static_cast<double>(d));
  return acc / static_cast<double>(family_size);
}

double FamilyStats::H(double alpha, double n) const {
  double acc = 0.0;
  for (const auto& [d, count] : difference_counts) {
    acc += static_cast<double>(count) * std::pow(n, -alpha * static_cast<double>(d));
  }
  return acc / static_cast<double>(family_size);
}

FamilyStats stats(const SumFamily& fam, unsigned workers, u64 budget) {
  const auto& members = fam.members();
  const std::size_t count = members.size();
  FamilyStats out;
  out.family_size = count;
  out.bounding_box = fam.bounding_box();

  std::vector<bool> seen(fam.domain().order(), false);
  for (const auto& m : members) {
    out.max_member = std::max<u64>(out.max_member, m.size());
    ++out.size_counts[m.size()];
    for (Elem x : m) {
      if (!seen[x]) ++out.union_size;
      seen[x] = true;
    }
  }
  const double work = 0.5 * static_cast<double>(count) * static_cast<double>(count) * static_cast<double>(out.max_member + 1);
  if (work > static_cast<double>(budget)) throw BudgetError("pairwise family statistics exceed the budget");

  std::vector<std::map<std::pair<u64, u64>, u64>> partial(std::max(1u, workers));
  parallel_chunks(count, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    auto& local = partial[w];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        const auto& a = members[i];
        const auto& b = members[j];
        u64 only_a = 0;
        u64 only_b = 0;
        std::size_t x = 0;
        std::size_t y = 0;
        while (x < a.size() && y < b.size()) {
          if (a[x] == b[y]) {
            ++x;
            ++y;
          } else if (a[x] < b[y]) {
            ++only_a;
            ++x;
          } else {
            ++only_b;
            ++y;
          }
        }
        only_a += a.size() - x;
        only_b += b.size() - y;
        ++local[{only_a, only_b}];
        ++local[{only_b, only_a}];
      }
    }
  });
  for (const auto& local : partial) {
    for (const auto& [key, n] : local) out.set_differences[key] += n;
  }
  for (const auto& [key, n] : out.set_differences) {
    const u64 d = key.first + key.second;
    out.difference_counts[d] += n;
    if (out.min_difference == 0 || d < out.min_difference) out.min_difference = d;
  }
  return out;
}

double DensityTable::max_deviation() const {
  const double uniform = 1.0 / static_cast<double>(counts.size());
  double worst = 0.0;
  for (u64 c : counts) worst = std::max(worst, std::abs(static_cast<double>(c) / static_cast<double>(total) - uniform));
  return worst;
}

DensityTable density(const TraceFunction& t, const SumFamily& fam) {
  if (!(t.domain() == fam.domain())) throw MismatchError("family and trace function live on different fields");
  DensityTable out;
  out.counts.assign(t.codomain().order(), 0);
  out.total = fam.size();
  for (const auto& m : fam.members()) ++out.counts[partial_sum(t, m)];
  return out;
}

VarianceResult averaged_variance(const TraceFunction& t, const SumFamily& fam, bool restrict_to_lisse, unsigned workers,
                                 u64 budget) {
  if (!(t.domain() == fam.domain())) throw MismatchError("family and trace function live on different fields");
  const Field& f = t.domain();
  const Field& r = t.codomain();
  const u64 q = f.order();
  const u64 big_q = r.order();
  const u64 k_size = fam.size();

  u64 total_members = 0;
  for (const auto& m : fam.members()) total_members += m.size();
  if (static_cast<double>(q) * static_cast<double>(total_members + k_size) > static_cast<double>(budget)) {
    throw BudgetError("averaged variance exceeds the budget (q * sum |I(k)|)");
  }

  std::vector<Elem> shifts;
  {
    std::set<Elem> support;
    for (const auto& m : fam.members()) support.insert(m.begin(), m.end());
    for (u64 x = 0; x < q; ++x) {
      bool keep = true;
      if (restrict_to_lisse) {
        for (Elem y : support) {
          if (t.is_singular(f.add(y, static_cast<Elem>(x)))) {
            keep = false;
            break;
          }
        }
      }
      if (keep) shifts.push_back(static_cast<Elem>(x));
    }
  }
  require(!shifts.empty(), "no admissible shifts remain");

  const unsigned w_count = std::max(1u, workers);
  std::vector<std::vector<u64>> partial_counts(w_count, std::vector<u64>(big_q, 0));
  std::vector<BigInt> partial_squares(w_count, 0);
  parallel_chunks(shifts.size(), w_count, [&](unsigned w, std::size_t begin, std::size_t end) {
    std::vector<u64> counts(big_q, 0);
    u128 squares = 0;
    for (std::size_t s = begin; s < end; ++s) {
      const Elem x = shifts[s];
      std::fill(counts.begin(), counts.end(), 0);
      for (const auto& m : fam.members()) {
        Elem acc = 0;
        for (Elem y : m) acc = r.add(acc, t(f.add(y, x)));
        ++counts[acc];
      }
      for (u64 a = 0; a < big_q; ++a) {
        squares += static_cast<u128>(counts[a]) * counts[a];
        partial_counts[w][a] += counts[a];
      }
    }
    partial_squares[w] = BigInt(static_cast<u64>(squares >> 64)) << 64;
    partial_squares[w] += static_cast<u64>(squares);
  });

  VarianceResult out;
  out.shift_count = shifts.size();
  out.family_size = k_size;
  out.averaged_counts.assign(big_q, 0);
  BigInt sum_squares = 0;
  for (unsigned w = 0; w < w_count; ++w) {
    sum_squares += partial_squares[w];
    for (u64 a = 0; a < big_q; ++a) out.averaged_counts[a] += partial_counts[w][a];
  }
  const BigInt bq = big_q;
  const BigInt k = k_size;
  const BigInt u = out.shift_count;
  // sum_a (Q c_a - K)^2 = Q^2 sum_a c_a^2 - Q K^2 for each shift.
  out.numerator = bq * bq * sum_squares - u * bq * k * k;
  out.denominator = u * k * k * bq * bq;
  out.value = out.numerator.convert_to<double>() / out.denominator.convert_to<double>();

  bool holds = true;
  double worst = 0.0;
  for (u64 a = 0; a < big_q; ++a) {
    const BigInt diff = bq * BigInt(out.averaged_counts[a]) - u * k;
    holds = holds && diff * diff <= out.numerator * u;
    worst = std::max(worst, std::abs(diff.convert_to<double>()) / (u * k * bq).convert_to<double>());
  }
  out.cauchy_schwarz_holds = holds;
  out.max_averaged_deviation = worst;
  return out;
}

std::pair<u64, u64> choose_averaging_size(u64 target, u64 p, int e, double delta) {
  require(target >= 1, "target size must be positive");
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  const double base = delta * static_cast<double>(p);
  require(base > 1.0, "delta * p must exceed 1");
  const double log_i = std::log(static_cast<double>(target));
  const double log_b = std::log(base);
  require(log_i <= static_cast<double>(e - 1) * log_b * (1.0 + 1e-12) || target <= base,
          "log I exceeds (e - 1) log(delta p)");
  u64 a = 1;
  while (static_cast<double>(a) * log_b < log_i * (1.0 - 1e-12)) ++a;
  auto power_at_most = [&](u64 r) {
    long double acc = 1.0L;
    for (u64 i = 0; i < a; ++i) acc *= static_cast<long double>(r);
    return acc <= static_cast<long double>(target);
  };
  u64 root = static_cast<u64>(std::floor(std::pow(static_cast<double>(target), 1.0 / static_cast<double>(a))));
  while (root > 1 && !power_at_most(root)) --root;
  while (power_at_most(root + 1)) ++root;
  return {root, a};
}

std::map<u64, u64> shift_overlap_counts(const Field& f, std::span<const Elem> subset, std::span<const Elem> shifts) {
  std::set<Elem> differences;
  for (Elem y1 : shifts) {
    for (Elem y2 : shifts) {
      if (y1 != y2) differences.insert(f.sub(y1, y2));
    }
  }
  std::vector<bool> in_subset(f.order(), false);
  for (Elem x : subset) in_subset[x] = true;
  std::map<u64, u64> out;
  for (Elem y : differences) {
    u64 overlap = 0;
    for (Elem x : subset) overlap += in_subset[f.add(x, y)] ? 1 : 0;
    ++out[overlap];
  }
  return out;
}

}  // namespace tracelab
