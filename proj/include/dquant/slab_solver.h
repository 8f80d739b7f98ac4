#pragma once

#include <span>
#include <string>
#include <vector>

#include "dquant/field_model.h"
#include "dquant/susceptibility.h"

namespace dquant {

/// Layer of a planar stack along x. The first and last layers are the
/// semi-infinite claddings; their thickness is ignored.
struct SlabLayer {
  double thickness = 0.0;
  double index = 1.0;
};

struct SlabOptions {
  int scan_points = 4000;
  /// Largest phase advance (rad) between neighbouring profile samples.
  double max_phase_step = 2.5e-4;
  /// Cladding extent in units of the local decay length.
  double cladding_decay_lengths = 14.0;
  /// Relative frequency step for the group-velocity finite difference.
  double group_step = 1e-4;
};

struct SlabMode {
  int order = 0;  // 0 = fundamental
  double n_eff = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  double v_p = 0.0;
  double v_g = 0.0;
  /// Factor applied to the unit-amplitude field to meet the normalization.
  double amplitude = 1.0;
  ModeProfile profile;
};

/// Dispersion residual for TE modes: start with a decaying field in the left
/// cladding, carry (psi, psi') through the stack with 2x2 transfer matrices and
/// return psi' + gamma_R psi at the right interface, scaled by |(psi, psi'/k0)|.
double slab_dispersion_residual(std::span<const SlabLayer> layers, double omega, double n_eff,
                                const UnitSystem& units);

/// Guided TE modes at angular frequency omega, strongest-confined first.
/// Profiles are normalized; an unguided stack gives an empty list.
std::vector<SlabMode> solve_slab_modes(std::span<const SlabLayer> layers, double omega,
                                       const UnitSystem& units, const SlabOptions& options = {});

/// Samples the unit-amplitude TE field for a known n_eff (no normalization).
ModeProfile sample_slab_profile(std::span<const SlabLayer> layers, double omega, double n_eff,
                                const UnitSystem& units, const SlabOptions& options = {});

/// {"layers": [{"d": thickness, "n": index}, ...]}
std::vector<SlabLayer> parse_slab_json(const std::string& text);

}  // namespace dquant
