#pragma once

#include <array>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dquant/boson_algebra.h"
#include "dquant/field_model.h"
#include "dquant/susceptibility.h"

namespace dquant {

enum class Provenance { d_based, e_based_wrong, e_based_corrected, interaction_picture };

std::string to_string(Provenance p);

struct HamiltonianSpec {
  BosonicPolynomial linear;
  BosonicPolynomial nonlinear;
  Provenance provenance = Provenance::d_based;
  int order = 1;
  std::size_t dropped_terms = 0;

  BosonicPolynomial total() const { return linear + nonlinear; }
};

/// Three distinct mode families A + B -> C with one box mode each.
struct ModeTriple {
  std::array<int, 3> families{};
  std::array<ModeLabel, 3> modes{};
  std::array<double, 3> k{};
  std::array<double, 3> omega{};
  double length = 1.0;  // interaction length L

  double phase_mismatch() const { return k[2] - k[1] - k[0]; }
  double frequency_mismatch() const { return omega[0] + omega[1] - omega[2]; }
};

ModeTriple make_triple(const ModeSet& ms, ModeLabel a, ModeLabel b, ModeLabel c, double length);

struct MatchingBudget {
  double max_phase = 10.0 * std::numbers::pi;  // bound on |dk| L / 2 and |Delta| t_max
  double t_max = 1.0;
};

/// Throws InputError when the triple is outside the detuning budget.
void check_matching(const ModeTriple& triple, const MatchingBudget& budget = {});

struct InteractionParams {
  complex theta{0.0, 0.0};
  double delta_k = 0.0;
  double delta = 0.0;
  double phi = 1.0;
};

/// Polynomial restricted to a sector, with the count of monomials removed.
struct SectorPolynomial {
  BosonicPolynomial polynomial;
  std::size_t dropped_terms = 0;
};

struct SectorOptions {
  /// Keep only a†_A a†_B a_C + H.c.; otherwise return the full expansion.
  bool resonant_only = true;
};

/// sum_J hbar omega_J a†_J a_J (zero-point energy dropped).
BosonicPolynomial build_linear(const ModeSet& ms, const UnitSystem& units);

/// area * integral (B^2 / 2 mu0 + eta1 D^2 / 2) with the expanded fields,
/// normal ordered, constant dropped.
BosonicPolynomial linear_energy_form(const ModeSet& ms, const SusceptibilityTensor& eta1,
                                     const UnitSystem& units);

/// (1/3) integral eta2 D^3 over the interaction region.
SectorPolynomial build_nonlinear_D(const ModeSet& ms, const SusceptibilityTensor& eta2,
                                   const ModeTriple& triple, const UnitSystem& units,
                                   const SectorOptions& options = {});

/// (2/3) eps0 integral chi2 E~^3 with the linear-only field E~ = eta1 D.
SectorPolynomial build_nonlinear_E_wrong(const ModeSet& ms, const SusceptibilityTensor& chi2,
                                         const SusceptibilityTensor& eta1, const ModeTriple& triple,
                                         const UnitSystem& units, const SectorOptions& options = {});

/// Cubic-in-D part of eps0 (1 + chi1) E^2 / 2 with E = eta1 D + eta2 D^2.
SectorPolynomial quadratic_E_correction(const SusceptibilityTensor& eta1, const SusceptibilityTensor& eta2,
                                        const ModeSet& ms, const ModeTriple& triple, const UnitSystem& units,
                                        const SectorOptions& options = {});

/// Closed-form ratio (E-based with linear E) / (D-based) of the order-n
/// interaction for a pure chi(n) medium: -n.
Rational prefactor_ratio(int n);

struct ConstructedRatio {
  double ratio = 0.0;
  /// Largest relative deviation of any single monomial's ratio from `ratio`.
  double spread = 0.0;
  std::size_t monomials = 0;
  /// Coefficients of the largest monomial of the D-series Hamiltonian.
  complex reference_correct{0.0, 0.0};
  complex reference_wrong{0.0, 0.0};
};

/// Builds both order-n Hamiltonians symbolically for a scalar pure chi(n)
/// medium on a small box basis and divides them coefficient by coefficient.
ConstructedRatio constructed_prefactor_ratio(int n, double chi_n = 0.3, double chi1 = 1.25);

/// chi contracted with eta1 on every index; maps chi(n) E~^(n+1) to a D-series tensor.
SusceptibilityTensor contract_with_linear(const SusceptibilityTensor& chi, const SusceptibilityTensor& eta1);

/// sinc(x) with sinc(0) = 1 and exact zeros at nonzero multiples of pi.
double phase_matching(double x);

struct PhaseMatchingPoint {
  double delta_k = 0.0;
  double phi = 0.0;
  double phi2 = 0.0;
};

std::vector<PhaseMatchingPoint> phase_matching_curve(double length, std::span<const double> delta_k);

struct Interaction {
  InteractionParams params;
  BosonicPolynomial hamiltonian;  // theta Phi a†_A a†_B a_C + H.c. at t = 0
};

/// theta = 2 L sqrt(prod_J hbar omega_J / 4 pi) * integral eta2 d_A* d_B* d_C.
Interaction build_interaction(const ModeTriple& triple, std::span<const ModeProfile, 3> profiles,
                              const SusceptibilityTensor& eta2, const UnitSystem& units,
                              const MatchingBudget& budget = {});

/// The linear part and one nonlinear construction over the triple's modes.
HamiltonianSpec assemble_hamiltonian(const ModeSet& ms, const MediumSpec& medium, const ModeTriple& triple,
                                     Provenance provenance);

}  // namespace dquant
