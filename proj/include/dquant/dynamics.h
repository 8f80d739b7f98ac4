#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dquant/boson_algebra.h"
#include "dquant/fock_space.h"
#include "dquant/hamiltonian.h"

namespace dquant {

enum class PumpTreatment { classical, quantum };

struct EvolutionConfig {
  int n_max = 16;  // per-mode Fock cutoff
  double t = 1.0;
  int steps = 1;
  PumpTreatment pump = PumpTreatment::classical;
  complex beta{1.0, 0.0};  // classical pump amplitude, or coherent amplitude of the quantum pump
  int pump_cutoff = 12;    // Fock cutoff of the pump mode when it is quantum
  double hbar = 1.0;

  /// Throws InputError on n_max < 2, steps < 1 or a negative/non-finite time.
  void validate() const;
};

struct EvolutionResult {
  Eigen::VectorXcd state;
  std::vector<Eigen::VectorXcd> trajectory;  // states at t * j / steps, j = 1..steps
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  double edge_population = 0.0;  // max population with any occupation above cutoff - 2
  bool truncation_unsafe = false;
  bool dense = true;  // matrix exponential (true) or adaptive Taylor propagation
};

/// Matrix exponentials are used up to this dimension.
inline constexpr std::size_t dense_dimension_limit = 4000;
inline constexpr double truncation_threshold = 1e-6;

/// psi(t) = exp(-i H t / hbar) psi0. Throws NotHermitian for non-Hermitian H and
/// InputError for a non-normalized or mis-sized initial state.
EvolutionResult evolve(const BosonicPolynomial& h, const FockSpace& space, const Eigen::VectorXcd& psi0, double t,
                       double hbar = 1.0, int steps = 1);

/// <psi| a†_m a_m |psi>.
double mean_number(const FockSpace& space, const Eigen::VectorXcd& psi, ModeLabel m);

/// Normalized coherent state of one mode truncated at the cutoff, as a full
/// product state with every other mode in vacuum.
Eigen::VectorXcd coherent_state(const FockSpace& space, ModeLabel m, complex alpha);

// Fixed labels for the effective A + B -> C problems.
inline constexpr ModeLabel mode_a{0};
inline constexpr ModeLabel mode_b{1};
inline constexpr ModeLabel mode_c{2};

/// theta Phi a†_A a†_B a_C + H.c.
BosonicPolynomial three_wave_hamiltonian(const InteractionParams& params);
/// g = |theta| |beta| Phi / hbar.
double effective_coupling(const InteractionParams& params, complex beta, double hbar);

struct SqueezingResult {
  double r = 0.0;  // fitted from <n_A> = sinh^2(r)
  double g = 0.0;
  double mean_n_a = 0.0;
  double mean_n_b = 0.0;
  double pair_mismatch = 0.0;  // max |<n_A> - <n_B>| over the trajectory
  double fit_residual = 0.0;
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  bool truncation_unsafe = false;
};

/// Parametric down-conversion with the pump on C. The classical treatment
/// replaces a_C by beta; a nonzero Delta is handled in the frame rotating
/// with it, H = (c a†_A a†_B + H.c.) + hbar Delta n_A. r is the slope of
/// asinh(sqrt(<n_A>)) over the trajectory times t.
SqueezingResult spdc_squeezing(const InteractionParams& params, const EvolutionConfig& cfg);

struct ConversionResult {
  double probability = 0.0;  // <n_C> at time t, starting from |1>_A |0>_C
  double g = 0.0;
  double conservation_error = 0.0;  // max |<n_A> + <n_C> - 1|
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  bool truncation_unsafe = false;
};

/// Frequency conversion A -> C with a classical pump on B: beamsplitter
/// coupling c a†_A a_C + H.c. with c = theta Phi conj(beta).
ConversionResult frequency_conversion(const InteractionParams& params, const EvolutionConfig& cfg);

template <class T>
struct SchemePair {
  T correct;
  T wrong;
};

/// Runs the observable with theta (D-based) and with the E-linear coupling
/// prefactor_ratio(order) * theta.
SchemePair<SqueezingResult> spdc_squeezing_schemes(const InteractionParams& params, const EvolutionConfig& cfg,
                                                   int order = 2);
SchemePair<ConversionResult> frequency_conversion_schemes(const InteractionParams& params,
                                                          const EvolutionConfig& cfg, int order = 2);

enum class Observable { squeezing, conversion, coefficient };

std::string to_string(Observable o);
/// Throws InputError for unknown names.
Observable parse_observable(const std::string& name);

struct ComparisonReport {
  Observable observable = Observable::coefficient;
  int order = 2;
  double value_correct = 0.0;
  double value_wrong = 0.0;
  double ratio = 0.0;
  double expected_ratio = 0.0;
  double tolerance = 0.0;  // relative
  bool pass = false;
};

struct ComparisonOptions {
  double theta = 0.04;        // base coupling, natural units
  double theta_scale = 1.0;   // theta -> scale * theta with t adjusted to keep g t fixed
  double squeezing_gt = 0.04;
  double conversion_gt = 0.01;
  int n_max = 16;
};

/// Expected ratios: coefficient -n, squeezing n, small-t conversion n^2.
ComparisonReport compare_schemes(Observable observable, int order, const ComparisonOptions& options = {});

std::string to_json(const ComparisonReport& r);

struct SweepPoint {
  double t = 0.0;
  double value = 0.0;
  std::string scheme;
};

/// Number of concurrent evolutions: DQUANT_THREADS when set to a positive
/// integer, hardware concurrency otherwise.
unsigned sweep_threads();

/// Evaluates squeezing r or conversion probability at every time for both
/// schemes; points are independent and run concurrently. Sorted by t, then scheme.
std::vector<SweepPoint> sweep(Observable observable, const InteractionParams& params, const EvolutionConfig& cfg,
                              std::span<const double> times, int order = 2);

/// Columns t, observable, scheme.
std::string sweep_to_csv(std::span<const SweepPoint> points);

}  // namespace dquant
