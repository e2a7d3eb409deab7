/**
 * @file families.hpp
 * @brief Families of sums k -> I(k) in F_q, their statistics, densities and averaged variance.
 *
 * Coordinates identify F_q with {1..p}^e through the coefficient basis, coordinate i
 * being the coefficient of x^{i-1} and p standing for 0.
 */
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tracelab/cyclo.hpp"
#include "tracelab/tracefn.hpp"

namespace tracelab {

enum class FamilyKind { intervals, boxes, shifted_subset, product, custom };

std::string to_string(FamilyKind kind);

class SumFamily {
 public:
  /// Members are sorted and deduplicated; duplicate members raise PreconditionError.
  SumFamily(Field domain, FamilyKind kind, std::vector<std::vector<Elem>> members, nlohmann::json params);

  const Field& domain() const { return domain_; }
  FamilyKind kind() const { return kind_; }
  std::size_t size() const { return members_.size(); }
  std::span<const Elem> member(std::size_t k) const { return members_[k]; }
  const std::vector<std::vector<Elem>>& members() const { return members_; }
  const nlohmann::json& params() const { return params_; }
  /// |B_E| for shifted-subset families.
  std::optional<u64> bounding_box() const { return bounding_box_; }
  nlohmann::json to_json() const { return {{"kind", to_string(kind_)}, {"params", params_}}; }

 private:
  friend SumFamily make_shifted_subset(const Field&, std::span<const Elem>, std::span<const Elem>);

  Field domain_;
  FamilyKind kind_;
  std::vector<std::vector<Elem>> members_;
  nlohmann::json params_;
  std::optional<u64> bounding_box_;
};

/// Element with coordinates in {1..p}^e (values taken mod p).
Elem from_coordinates(const Field& f, std::span<const u64> coords);
/// Coordinates in [0, p).
std::vector<u64> coordinates(const Field& f, Elem x);
/// Size of the coordinate bounding box of E, coordinates taken in [0, p).
u64 bounding_box_size(const Field& f, std::span<const Elem> subset);

/// member(k) = {1..k}; requires a prime field.
SumFamily make_intervals(const Field& f, std::span<const u64> sizes);
/// member(k_1..k_e) = prod {1..k_i}.
SumFamily make_boxes(const Field& f, std::span<const std::vector<u64>> corners);
/// member(x) = E + x.
SumFamily make_shifted_subset(const Field& f, std::span<const Elem> subset, std::span<const Elem> shifts);
/// member(k_1..k_e) = prod I_i(k_i), factors over F_p, one per coordinate.
SumFamily make_product(const Field& f, std::span<const SumFamily> factors);

struct FamilyStats {
  std::size_t family_size = 0;
  u64 union_size = 0;      // M
  u64 max_member = 0;      // m
  u64 min_difference = 0;  // A; 0 for a single member
  std::map<u64, u64> size_counts;        // g
  std::map<u64, u64> difference_counts;  // h, ordered pairs
  /// (|I(k1) \ I(k2)|, |I(k2) \ I(k1)|) over ordered pairs k1 != k2.
  std::map<std::pair<u64, u64>, u64> set_differences;
  std::optional<u64> bounding_box;

  double G(double alpha, double n) const;
  double H(double alpha, double n) const;
};

FamilyStats stats(const SumFamily& fam, unsigned workers = 1, u64 budget = u64{4} << 30);

struct DensityTable {
  std::vector<u64> counts;  // indexed by residue-field element
  u64 total = 0;

  double density(Elem a) const { return static_cast<double>(counts[a]) / static_cast<double>(total); }
  double max_deviation() const;
};

/// Phi(t, I, a) for every a, as exact counts over |K|.
DensityTable density(const TraceFunction& t, const SumFamily& fam);

struct VarianceResult {
  /// V = numerator / denominator exactly.
  BigInt numerator;
  BigInt denominator;
  double value = 0.0;
  u64 shift_count = 0;
  u64 family_size = 0;
  /// sum over shifts of the per-shift counts; Phi(t, I', a) = averaged_counts[a] / (shift_count * family_size).
  std::vector<u64> averaged_counts;
  double max_averaged_deviation = 0.0;
  /// max_a |Phi(t, I', a) - 1/Q| <= sqrt(V), decided in exact integers.
  bool cauchy_schwarz_holds = false;
};

/// V(t, I) = sum_a (1/|U|) sum_{x in U} (Phi(t, I + x, a) - 1/Q)^2 with U = F_q, or the shifts
/// keeping every I(k) + x away from singular points when restrict_to_lisse is set.
VarianceResult averaged_variance(const TraceFunction& t, const SumFamily& fam, bool restrict_to_lisse = false,
                                 unsigned workers = 1, u64 budget = u64{4} << 30);

/// (I_1, a) with a = ceil(log I / log(delta p)) and I_1 = floor(I^{1/a}).
std::pair<u64, u64> choose_averaging_size(u64 target, u64 p, int e, double delta);

/// d -> |{y in B : |E cap (E + y)| = d}| with B the set of differences of distinct shifts.
std::map<u64, u64> shift_overlap_counts(const Field& f, std::span<const Elem> subset, std::span<const Elem> shifts);

}  // namespace tracelab
