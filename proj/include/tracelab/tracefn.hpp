/**
 * @file tracefn.hpp
 * @brief Tabulated trace functions F_q -> F_l: Kummer, hyper-Kloosterman, hyperelliptic.
 */
#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelab/cyclo.hpp"
#include "tracelab/group.hpp"
#include "tracelab/poly.hpp"

namespace tracelab {

enum class TraceKind { kummer, kloosterman, hyperelliptic };

std::string to_string(TraceKind kind);

/// f = numerator / denominator over the source field, coprime.
struct RationalFunction {
  Poly numerator;
  Poly denominator{1};

  int degree() const;
  nlohmann::json to_json(const Field& f) const;
};

class TraceFunction {
 public:
  TraceKind kind() const { return kind_; }
  const Field& domain() const { return domain_; }
  const ResidueContext& context() const { return ctx_; }
  const Field& codomain() const { return ctx_.field(); }
  const std::vector<Elem>& values() const { return values_; }
  Elem operator()(Elem x) const { return values_[x]; }
  /// Finite singular points; infinity is always singular for the supported kinds.
  const std::vector<Elem>& singular_points() const { return singular_; }
  bool is_singular(Elem x) const;
  u64 conductor_bound() const { return conductor_; }
  const GroupSpec& group() const { return group_; }
  bool normalized() const { return normalized_; }
  const nlohmann::json& params() const { return params_; }

  /// Kloosterman rank n; Kummer character order d; hyperelliptic genus g.
  u64 rank_parameter() const { return rank_parameter_; }
  const RationalFunction& rational_function() const { return f_; }

  static TraceFunction from_table(TraceKind kind, Field domain, ResidueContext ctx, std::vector<Elem> values,
                                  std::vector<Elem> singular, u64 conductor, GroupSpec group, bool normalized,
                                  nlohmann::json params, u64 rank_parameter, RationalFunction f = {});

 private:
  TraceFunction(TraceKind kind, Field domain, ResidueContext ctx, GroupSpec group)
      : kind_(kind), domain_(std::move(domain)), ctx_(std::move(ctx)), group_(std::move(group)) {}

  TraceKind kind_;
  Field domain_;
  ResidueContext ctx_;
  std::vector<Elem> values_;
  std::vector<Elem> singular_;
  u64 conductor_ = 0;
  GroupSpec group_;
  bool normalized_ = false;
  nlohmann::json params_;
  u64 rank_parameter_ = 0;
  RationalFunction f_;
};

/// t(x) = chi(f(x)), zero at zeros and poles of f.
TraceFunction kummer(const MultiplicativeCharacter& chi, const RationalFunction& f);

/// Hyper-Kloosterman sums of rank n by iterated multiplicative convolution in F_l.
TraceFunction kloosterman(u64 n, const Field& source, const ResidueContext& ctx, bool normalized);

/// t(z) = -sum_x chi_2(f(x)(x - z)), divided by sqrt(q) when normalized; zero on the roots of f.
TraceFunction hyperelliptic_family(const Field& source, const Poly& f, const ResidueContext& ctx, bool normalized);

/// Points of y^2 = f(x)(x - z) over F_q, including the point at infinity.
u64 hyperelliptic_point_count(const Field& source, const Poly& f, Elem z);

/// Same formulas evaluated in complex double arithmetic, with sqrt(q) > 0.
std::vector<std::complex<double>> complex_embedding(const TraceFunction& t);

/// Unsigned, unnormalized Kl_n(x) = sum_{x_1...x_n = x} e(tr(x_1+...+x_n)/p) for every x != 0
/// (index 0 holds 0).
std::vector<std::complex<double>> kloosterman_complex(const Field& source, u64 n);

/// S(t, E) = sum_{x in E} t(x).
Elem partial_sum(const TraceFunction& t, std::span<const Elem> subset);

/// CSV with columns index, x, value; the first line is a '#' comment holding kind, params and context.
void write_csv(const TraceFunction& t, std::ostream& out);

}  // namespace tracelab
