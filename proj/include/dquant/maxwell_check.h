#pragma once

#include <string>
#include <vector>

#include "dquant/field_model.h"
#include "dquant/susceptibility.h"

namespace dquant {

enum class Scheme { d_based, e_linear_wrong };

std::string to_string(Scheme s);

/// ik applied to every Fourier component of a scalar field.
ScalarField spectral_curl(const ScalarField& f, double weight);
/// ik z x F per component: (curl F)_x = -ik F_y, (curl F)_y = ik F_x.
FieldOperator spectral_curl(const FieldOperator& f);

struct WavevectorResidual {
  int m = 0;
  double k = 0.0;
  double faraday = 0.0;           // || dB/dt + curl E ||
  double faraday_relative = 0.0;  // divided by the larger of the two norms
  double ampere = 0.0;            // || dD/dt - curl B / mu0 ||
  double ampere_relative = 0.0;
  bool pass = false;
};

struct FaradayReport {
  Scheme scheme = Scheme::d_based;
  int order = 1;
  std::vector<WavevectorResidual> components;  // retained wavevectors, ascending m
  double max_residual = 0.0;                   // max relative Faraday residual
  double max_ampere_residual = 0.0;
  double leakage_norm = 0.0;
  int degree_dbdt = -1;
  int degree_curl_e = -1;
  double tolerance = 1e-10;
  bool pass = false;
};

struct VerifyOptions {
  double tolerance = 1e-10;
};

/// Builds the scheme's Hamiltonian from the expanded fields, takes
/// dB/dt = [B, H] / (i hbar) per retained Fourier component and compares it
/// with -curl E, where E is the scheme's electric field. Also checks
/// dD/dt = curl B / mu0. Requires uniform modes with +-m pairs whose
/// dispersion matches the medium's linear response.
FaradayReport verify_faraday(const ModeSet& ms, const MediumSpec& medium, Scheme scheme,
                             const VerifyOptions& options = {});

std::string to_json(const FaradayReport& r);
/// Plain-text pass/fail table, one row per wavevector.
std::string to_table(const FaradayReport& r);

struct DegreeContradiction {
  int order = 1;
  int degree_commutator = 0;  // degree of [poly_1, poly_(N+1)]
  int degree_curl = 0;        // degree of curl(poly_1)
  bool contradiction = false;
};

/// Evaluated symbolically on one mode: [i(a† - a), (a + a†)^(N+1)] against a + a†.
DegreeContradiction degree_contradiction_report(int order);

std::string to_json(const DegreeContradiction& r);

}  // namespace dquant
