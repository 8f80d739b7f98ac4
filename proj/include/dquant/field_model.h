#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dquant/boson_algebra.h"
#include "dquant/susceptibility.h"

namespace dquant {

/// Transverse profile of one mode. A uniform cross-section has an empty grid,
/// a single sample per component and `extent` equal to its area; a slab profile
/// is sampled along x and `extent` is the length along y.
struct ModeProfile {
  std::vector<double> grid;
  double extent = 1.0;
  std::array<std::vector<complex>, 3> d;  // empty component = identically zero
  std::array<std::vector<complex>, 3> b;
  std::vector<double> index;
  double vp_over_vg = 1.0;

  bool uniform() const { return grid.empty(); }
  std::size_t samples() const { return uniform() ? 1 : grid.size(); }
  /// Single Cartesian axis carrying d, or -1 if zero or mixed.
  int polarization_axis() const;
};

/// Trapezoid rule over the profile grid (zero-width intervals at interfaces
/// contribute nothing), or the closed form for a uniform cross-section.
double normalization_integral(const ModeProfile& p, const UnitSystem& units);
/// Rescales d and b so the normalization integral equals one.
ModeProfile normalized(ModeProfile p, const UnitSystem& units);

struct Mode {
  ModeLabel label;
  int family = 0;
  int m = 0;
  double k = 0.0;
  double omega = 0.0;
  double v_g = 0.0;
  double v_p = 0.0;
  ModeProfile profile;
};

/// Opaque id combining the family and box index.
ModeLabel mode_label(int family, int m);

/// Box-quantized modes on a periodic length L_box: k = 2 pi m / L_box.
class ModeSet {
 public:
  ModeSet(double box_length, std::vector<Mode> modes, std::vector<int> excluded_m = {});

  double box_length() const { return box_length_; }
  /// Discretization weight w = 2 pi / L_box (dk -> w sum_m).
  double weight() const;
  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  const std::vector<int>& excluded_m() const { return excluded_m_; }

  const Mode& find(ModeLabel label) const;
  const Mode* find(int family, int m) const;
  std::vector<ModeLabel> labels() const;
  /// Every mode at +m has a partner of the same family at -m.
  bool has_symmetric_pairs() const;
  ModeSet merged(const ModeSet& other) const;

 private:
  double box_length_;
  std::vector<Mode> modes_;
  std::vector<int> excluded_m_;
};

struct UniformModeOptions {
  int family = 0;
  int axis = 0;  // D polarization; propagation is along z
  double area = 1.0;
};

/// Plane-wave modes of a homogeneous medium, omega = c |k| / n. The m = 0
/// entry has zero frequency and is listed in excluded_m() rather than built.
ModeSet make_uniform_medium_modes(double n_index, double box_length, std::span<const int> m_values,
                                  const UnitSystem& units, const UniformModeOptions& options = {});
ModeSet make_uniform_medium_modes(double n_index, double box_length, int m_min, int m_max,
                                  const UnitSystem& units, const UniformModeOptions& options = {});

struct DispersionTable {
  int family = 0;
  std::vector<double> k;
  std::vector<double> omega;
  std::vector<double> v_g;
  std::vector<double> v_p;
};

DispersionTable dispersion_table(const ModeSet& ms, int family);

enum class FieldKind { D, B, E };

std::string to_string(FieldKind kind);

/// Fourier components of one Cartesian field component, keyed by box index m.
/// Each coefficient multiplies u_m(z) = (2 pi)^(-1/2) exp(i k_m z).
using ScalarField = std::map<int, BosonicPolynomial>;

/// Pointwise operator product; the basis functions multiply as
/// u_m u_n = (2 pi)^(-1/2) u_{m+n}.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField& accumulate(ScalarField& into, const ScalarField& add, complex factor = 1.0);

struct FieldOperator {
  FieldKind kind = FieldKind::D;
  double weight = 1.0;  // w = 2 pi / L_box
  double area = 1.0;    // transverse area used for volume integrals
  std::array<ScalarField, 3> components;

  int degree() const;
  std::set<int> wavenumbers() const;
  double box_length() const;
  double wavevector(int m) const { return weight * m; }
  /// Component at -m equals the adjoint of the component at +m.
  bool satisfies_hermiticity(double tol = 1e-12) const;
  double coefficient_norm() const;
};

struct ExpandedFields {
  FieldOperator d;
  FieldOperator b;
};

/// D and B as degree-1 polynomials in the mode operators, using a(k) -> w^(-1/2) a_m.
/// Profiles are evaluated at `transverse_sample`.
ExpandedFields expand_fields(const ModeSet& ms, const UnitSystem& units, std::size_t transverse_sample = 0);

struct ElectricField {
  FieldOperator retained;
  FieldOperator leaked;
  double leakage_norm = 0.0;
};

/// E = sum_n eta(n) D^n as a Fourier-space convolution. Components at indices
/// outside `retained` are collected in `leaked`.
ElectricField electric_field_from_D(const FieldOperator& d, std::span<const SusceptibilityTensor> etas,
                                    int max_order, const std::set<int>& retained);

/// Full (unsplit) field T(D, ..., D) for a tensor of rank order+1, as a vector field.
FieldOperator contract_power(const SusceptibilityTensor& t, const FieldOperator& d, FieldKind kind);

/// area * integral over the box of sum_i a_i b_i.
BosonicPolynomial integrate_dot(const FieldOperator& a, const FieldOperator& b);

/// Tensors of dimension 1 act along the single polarization axis of the field.
SusceptibilityTensor promote_for_field(const SusceptibilityTensor& t, const FieldOperator& f);

std::string mode_set_to_json(const ModeSet& ms);

}  // namespace dquant
