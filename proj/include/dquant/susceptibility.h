#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dquant {

using complex = std::complex<double>;

struct UnitSystem {
  double eps0 = 1.0;
  double mu0 = 1.0;
  double hbar = 1.0;
  double c = 1.0;

  static UnitSystem natural();
  static UnitSystem si();

  /// Throws InputError unless every constant is strictly positive.
  void validate() const;
};

enum class TensorRole { chi, eta, gamma };

std::string to_string(TensorRole role);

/// Dense rank-(order+1) Cartesian tensor. Index 0 is the output component,
/// indices 1..order contract with field factors. Storage is row-major.
class SusceptibilityTensor {
 public:
  SusceptibilityTensor(int order, TensorRole role, int dim, std::vector<complex> entries);

  static SusceptibilityTensor zero(int order, TensorRole role, int dim);
  static SusceptibilityTensor scalar(int order, TensorRole role, double value);

  int order() const { return order_; }
  int rank() const { return order_ + 1; }
  int dim() const { return dim_; }
  TensorRole role() const { return role_; }
  std::span<const complex> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  complex operator()(std::span<const int> index) const { return entries_[flat_index(index)]; }
  complex operator[](std::size_t flat) const { return entries_[flat]; }

  std::size_t flat_index(std::span<const int> index) const;
  std::vector<int> unflatten(std::size_t flat) const;

  bool is_zero(double tol = 0.0) const;
  bool is_real(double tol = 1e-12) const;
  double max_abs() const;

  SusceptibilityTensor with_role(TensorRole role) const;
  SusceptibilityTensor scaled(complex factor) const;

  /// Copies a dim-1 tensor into dim 3 with the single entry on `axis`.
  SusceptibilityTensor embedded(int axis) const;

 private:
  int order_;
  TensorRole role_;
  int dim_;
  std::vector<complex> entries_;
};

/// Nonlinear medium described by its E-series susceptibilities chi(1..N).
struct MediumSpec {
  UnitSystem units;
  int dim = 1;
  std::vector<SusceptibilityTensor> chi;  // chi[n-1] has order n

  MediumSpec(UnitSystem units, int dim, std::vector<SusceptibilityTensor> chi);

  /// Highest order with a nonzero tensor; at least 1.
  int highest_order() const;
  const SusceptibilityTensor& chi_of(int order) const;
  /// chi(order) when present, zero tensor otherwise.
  SusceptibilityTensor chi_or_zero(int order) const;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  std::string str() const;
};

enum class Approach { e_based, d_based };

struct SymmetryCheck {
  bool symmetric = true;
  double max_deviation = 0.0;
};

SusceptibilityTensor invert_linear(const SusceptibilityTensor& chi1, const UnitSystem& units);

SusceptibilityTensor eta2_from_chi2(const SusceptibilityTensor& chi2,
                                    const SusceptibilityTensor& eta1, const UnitSystem& units);

/// Order-by-order inversion of D(E) into E(D) = sum eta(n) D^n, n = 1..max_order.
/// Higher orders pick up cascaded products of lower ones; the input indices of
/// each eta(n) are symmetrized.
std::vector<SusceptibilityTensor> invert_series(const MediumSpec& medium, int max_order);

SusceptibilityTensor gamma_from_eta(const SusceptibilityTensor& eta, const UnitSystem& units);
SusceptibilityTensor eta_from_gamma(const SusceptibilityTensor& gamma, const UnitSystem& units);

/// Energy-density prefactors for orders 1..N: n/(n+1) for the E-series
/// (first entry 1/2) and 1/(n+1) for the D-series.
std::vector<Rational> energy_prefactors(Approach approach, int highest_order);

SymmetryCheck check_permutation_symmetry(const SusceptibilityTensor& t, double tol = 1e-12);

/// Average over all permutations of the input indices (output index fixed).
SusceptibilityTensor symmetrize_inputs(const SusceptibilityTensor& t);

/// Evaluates the tensor as a multilinear map on a single field vector:
/// out_i = T_{i j1..jn} v_j1 ... v_jn.
std::vector<complex> apply_power(const SusceptibilityTensor& t, std::span<const complex> v);

// JSON ingestion: {"units": "natural"|"si", "dim": 1|3, "chi": {"1": [...], ...}}
MediumSpec parse_medium_json(const std::string& text);
MediumSpec load_medium(const std::string& path);

}  // namespace dquant
