/**
 * @file model.hpp
 * @brief Finite monodromy groups, Gaussian sums over them, and random walks of traces.
 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracelab/families.hpp"
#include "tracelab/group.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

using BigRational = boost::multiprecision::cpp_rational;
using Fraction = boost::rational<i64>;

/// Square matrix over the residue field, row-major.
struct Matrix {
  u64 n = 0;
  std::vector<Elem> entries;

  Elem operator()(u64 i, u64 j) const { return entries[i * n + j]; }
  Elem& operator()(u64 i, u64 j) { return entries[i * n + j]; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

Matrix identity(u64 n);
Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Elem determinant(const Field& f, Matrix a);
Elem trace(const Field& f, const Matrix& a);

/// The antidiagonal alternating form diag-reversed (1, ..., 1, -1, ..., -1).
Matrix symplectic_form(const Field& f, u64 n);
/// The antidiagonal symmetric form of all ones.
Matrix orthogonal_form(u64 n);

BigInt group_order(const GroupSpec& spec);

struct EnumerationLimits {
  u64 max_elements = 1'000'000;
  /// Cap on matrices scanned when filtering all of M_n(F_l).
  u64 max_scan = 50'000'000;
};

std::vector<Matrix> enumerate_group(const GroupSpec& spec, const EnumerationLimits& limits = {});

/// Number of group elements with each trace, indexed by residue-field element.
std::vector<u64> trace_histogram(const GroupSpec& spec, const EnumerationLimits& limits = {});

/// Uniform sampler; enumerates the group once when the kind needs it.
class GroupSampler {
 public:
  explicit GroupSampler(GroupSpec spec, const EnumerationLimits& limits = {});
  Matrix sample(Rng& rng) const;
  Elem sample_trace(Rng& rng) const;
  const GroupSpec& spec() const { return spec_; }

 private:
  Matrix random_invertible(Rng& rng) const;

  GroupSpec spec_;
  std::vector<Matrix> elements_;
  Elem zeta_ = 0;
};

/// psi_a(x) = e(tr(a x) / ell) on the residue field.
std::complex<double> residue_character(const Field& f, Elem a, Elem x);

std::complex<double> gaussian_sum_bruteforce(const GroupSpec& spec, Elem a, const EnumerationLimits& limits = {});

/// Closed form; nullopt when no verified formula applies.
std::optional<std::complex<double>> gaussian_sum_closed(const GroupSpec& spec, Elem a);

/// Kim's Sp_{2m} expansion for the given Kl_2(a^2) value, as printed.
std::complex<double> kim_symplectic_sum(u64 m, u64 field_order, std::complex<double> kl2);

/// Whether the Sp_{2m} closed form is trusted for this m.
bool symplectic_closed_form_enabled(u64 m);

/// Gaussian sums for every b (index 0 holds |G|), closed forms when available.
struct GaussianSums {
  std::vector<std::complex<double>> values;
  std::string source;
};
GaussianSums gaussian_sums(const GroupSpec& spec, const EnumerationLimits& limits = {});

struct WalkLaw {
  u64 steps = 1;
  std::vector<double> probabilities;
  /// Exact law numerators / denominator when produced exactly.
  std::optional<std::vector<BigInt>> numerators;
  BigInt denominator = 1;
  std::string source;
  double max_imaginary = 0.0;

  double mass() const;
  double probability_of(std::span<const Elem> subset) const;
};

/// Character-sum formula for the law of Z_1 + ... + Z_L in double precision.
WalkLaw walk_law_exact(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits = {});
/// Same formula evaluated exactly in Z[zeta_ell] from the trace histogram.
WalkLaw walk_law_fourier_rational(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits = {});
/// Exhaustive L-fold convolution of the trace histogram.
WalkLaw walk_law_enumerated(const GroupSpec& spec, u64 steps, const EnumerationLimits& limits = {});
WalkLaw walk_law_mc(const GroupSpec& spec, u64 steps, u64 trials, Rng& rng, const EnumerationLimits& limits = {});

double total_variation(std::span<const double> a, std::span<const double> b);

struct GroupConstants {
  Fraction alpha;
  Fraction beta_plus;
  Fraction beta_minus;
  u64 dim = 0;
  u64 rank = 0;
};
GroupConstants constants(const GroupSpec& spec);

struct MuAlpha {
  double alpha = 0.0;
  double max_abs = 0.0;
  Elem argmax = 0;
};
/// -log(max_{b != 0} |(1/d) sum_{v in mu_d} psi_b(v)|) / log Q.
MuAlpha mu_alpha_empirical(const Field& residue, u64 d);

/// Largest of the explicit admissible alpha(delta) values, if any applies.
std::optional<double> explicit_alpha(double delta, bool prime_residue_field);

/// E(G, L, F_l).
double error_scale(const GroupSpec& spec, u64 steps);

struct ModelFamilyPrediction {
  double expected_density_error = 0.0;
  double model_variance = 0.0;
  double alpha = 0.0;
};
ModelFamilyPrediction model_family_stats(const GroupSpec& spec, const FamilyStats& stats,
                                         const EnumerationLimits& limits = {});

/// Model variance evaluated exactly in Z[zeta_ell] from the trace histogram.
BigRational model_variance_exact(const GroupSpec& spec, const FamilyStats& stats,
                                 const EnumerationLimits& limits = {});

}  // namespace tracelab
