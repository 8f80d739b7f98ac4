#include "dquant/slab_solver.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dquant/error.h"

namespace dquant {

namespace {

struct State {
  double psi;
  double dpsi;
};

// Carries (psi, psi') across a homogeneous layer of thickness h.
State propagate(State s, double k0, double n, double n_eff, double h) {
  const double q2 = k0 * k0 * (n * n - n_eff * n_eff);
  if (q2 > 0.0) {
    const double q = std::sqrt(q2);
    const double c = std::cos(q * h), sn = std::sin(q * h);
    return {c * s.psi + sn / q * s.dpsi, -q * sn * s.psi + c * s.dpsi};
  }
  if (q2 < 0.0) {
    const double g = std::sqrt(-q2);
    const double c = std::cosh(g * h), sn = std::sinh(g * h);
    return {c * s.psi + sn / g * s.dpsi, g * sn * s.psi + c * s.dpsi};
  }
  return {s.psi + h * s.dpsi, s.dpsi};
}

double decay(double k0, double n, double n_eff) { return k0 * std::sqrt(n_eff * n_eff - n * n); }

void validate(std::span<const SlabLayer> layers) {
  if (layers.size() < 3) throw InputError("slab stack needs at least three layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!(layers[i].index > 0.0)) throw InputError("layer indices must be positive");
    if (i > 0 && i + 1 < layers.size() && !(layers[i].thickness > 0.0))
      throw InputError("inner layers need positive thickness");
  }
}

double find_root(std::span<const SlabLayer> layers, double omega, const UnitSystem& units, double lo,
                 double hi) {
  double flo = slab_dispersion_residual(layers, omega, lo, units);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = slab_dispersion_residual(layers, omega, mid, units);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> guided_indices(std::span<const SlabLayer> layers, double omega, const UnitSystem& units,
                                   int scan_points) {
  const double n_clad = std::max(layers.front().index, layers.back().index);
  double n_core = 0.0;
  for (const auto& l : layers) n_core = std::max(n_core, l.index);
  std::vector<double> roots;
  if (!(n_core > n_clad)) return roots;

  const double span = n_core - n_clad;
  const double lo = n_clad + 1e-12 * span, hi = n_core - 1e-12 * span;
  double prev_x = hi;
  double prev_f = slab_dispersion_residual(layers, omega, prev_x, units);
  for (int i = 1; i <= scan_points; ++i) {
    const double x = hi - (hi - lo) * static_cast<double>(i) / scan_points;
    const double f = slab_dispersion_residual(layers, omega, x, units);
    if (f == 0.0) {
      roots.push_back(x);
    } else if ((f < 0) != (prev_f < 0) && prev_f != 0.0) {
      roots.push_back(find_root(layers, omega, units, x, prev_x));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

double slab_dispersion_residual(std::span<const SlabLayer> layers, double omega, double n_eff,
                                const UnitSystem& units) {
  const double k0 = omega / units.c;
  State s{1.0, decay(k0, layers.front().index, n_eff)};
  for (std::size_t i = 1; i + 1 < layers.size(); ++i) {
    s = propagate(s, k0, layers[i].index, n_eff, layers[i].thickness);
    const double scale = std::hypot(s.psi, s.dpsi / k0);
    s.psi /= scale;
    s.dpsi /= scale;
  }
  const double gr = decay(k0, layers.back().index, n_eff);
  return (s.dpsi + gr * s.psi) / k0;
}

ModeProfile sample_slab_profile(std::span<const SlabLayer> layers, double omega, double n_eff,
                                const UnitSystem& units, const SlabOptions& options) {
  validate(layers);
  const double k0 = omega / units.c;
  const double beta = n_eff * k0;
  const double gl = decay(k0, layers.front().index, n_eff);
  const double gr = decay(k0, layers.back().index, n_eff);

  ModeProfile p;
  p.extent = 1.0;
  std::vector<double> psi, dpsi;
  auto push = [&](double x, double n, State s) {
    p.grid.push_back(x);
    p.index.push_back(n);
    psi.push_back(s.psi);
    dpsi.push_back(s.dpsi);
  };
  auto points_for = [&](double phase) {
    return std::max(16, static_cast<int>(std::ceil(phase / options.max_phase_step)));
  };

  // Left cladding: psi = exp(gl (x - x0)), x0 = 0 at the first interface.
  {
    const double ext = options.cladding_decay_lengths / gl;
    const int np = points_for(options.cladding_decay_lengths);
    for (int i = 0; i <= np; ++i) {
      const double x = -ext + ext * static_cast<double>(i) / np;
      const double e = std::exp(gl * x);
      push(x, layers.front().index, {e, gl * e});
    }
  }
  double x0 = 0.0;
  State s{1.0, gl};
  for (std::size_t l = 1; l + 1 < layers.size(); ++l) {
    const double h = layers[l].thickness;
    const double n = layers[l].index;
    const double q = k0 * std::sqrt(std::abs(n * n - n_eff * n_eff));
    const int np = points_for(q * h);
    for (int i = 0; i <= np; ++i) {
      const double dx = h * static_cast<double>(i) / np;
      push(x0 + dx, n, propagate(s, k0, n, n_eff, dx));
    }
    s = propagate(s, k0, n, n_eff, h);
    x0 += h;
  }
  {
    const double ext = options.cladding_decay_lengths / gr;
    const int np = points_for(options.cladding_decay_lengths);
    for (int i = 0; i <= np; ++i) {
      const double dx = ext * static_cast<double>(i) / np;
      const double e = std::exp(-gr * dx);
      push(x0 + dx, layers.back().index, {s.psi * e, -gr * s.psi * e});
    }
  }

  // TE: E along y, d = eps0 n^2 E; B = curl E / (i omega) = -(beta/omega) psi x - i psi'/omega z.
  const std::size_t ns = p.grid.size();
  p.d[1].resize(ns);
  p.b[0].resize(ns);
  p.b[2].resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const double n = p.index[i];
    p.d[1][i] = units.eps0 * n * n * psi[i];
    p.b[0][i] = -(beta / omega) * psi[i];
    p.b[2][i] = complex(0.0, -dpsi[i] / omega);
  }
  return p;
}

std::vector<SlabMode> solve_slab_modes(std::span<const SlabLayer> layers, double omega,
                                       const UnitSystem& units, const SlabOptions& options) {
  validate(layers);
  units.validate();
  if (!(omega > 0.0)) throw InputError("frequency must be positive");

  const std::vector<double> roots = guided_indices(layers, omega, units, options.scan_points);
  const std::vector<double> up = guided_indices(layers, omega * (1.0 + options.group_step), units, options.scan_points);
  const std::vector<double> down = guided_indices(layers, omega * (1.0 - options.group_step), units, options.scan_points);

  std::vector<SlabMode> modes;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    SlabMode m;
    m.order = static_cast<int>(i);
    m.n_eff = roots[i];
    m.omega = omega;
    m.beta = m.n_eff * omega / units.c;
    m.v_p = units.c / m.n_eff;
    // Group index n_g = n_eff + omega dn_eff/domega by central difference; a
    // mode missing at a shifted frequency falls back to a one-sided step.
    double dn_domega = 0.0;
    const double h = options.group_step * omega;
    if (i < up.size() && i < down.size())
      dn_domega = (up[i] - down[i]) / (2.0 * h);
    else if (i < up.size())
      dn_domega = (up[i] - m.n_eff) / h;
    else if (i < down.size())
      dn_domega = (m.n_eff - down[i]) / h;
    m.v_g = units.c / (m.n_eff + omega * dn_domega);

    ModeProfile p = sample_slab_profile(layers, omega, m.n_eff, units, options);
    p.vp_over_vg = m.v_p / m.v_g;
    const double raw = normalization_integral(p, units);
    m.amplitude = 1.0 / std::sqrt(raw);
    m.profile = normalized(std::move(p), units);
    modes.push_back(std::move(m));
  }
  return modes;
}

std::vector<SlabLayer> parse_slab_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed slab JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array())
    throw InputError("slab JSON needs a \"layers\" array");
  std::vector<SlabLayer> layers;
  for (const auto& l : doc["layers"]) {
    if (!l.is_object() || !l.contains("n")) throw InputError("each layer needs \"n\"");
    layers.push_back({l.value("d", 0.0), l["n"].get<double>()});
  }
  validate(layers);
  return layers;
}

}  // namespace dquant
