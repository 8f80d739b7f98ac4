#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library beyond plain data types.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

/// D(E) = eps0 [(1 + chi1) E + chi2 E^2 + ...] for scalar susceptibilities chi[0] = chi1.
inline double displacement(const std::vector<double>& chi, double eps0, double e) {
  double d = e, p = e;
  for (std::size_t n = 0; n < chi.size(); ++n) {
    d += chi[n] * p;
    p *= e;
  }
  return eps0 * d;
}

/// Newton solve of D(E) = d starting from the linear guess.
inline double solve_field(const std::vector<double>& chi, double eps0, double d) {
  double e = d / (eps0 * (1.0 + chi[0]));
  for (int it = 0; it < 100; ++it) {
    double slope = 1.0, p = 1.0;
    for (std::size_t n = 0; n < chi.size(); ++n) {
      slope += static_cast<double>(n + 1) * chi[n] * p;
      p *= e;
    }
    const double step = (displacement(chi, eps0, e) - d) / (eps0 * slope);
    e -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(e))) break;
  }
  return e;
}

/// Least-squares fit of E(D) on Chebyshev nodes in [-h, h]; returns the
/// coefficients of D^1 .. D^max_order.
inline std::vector<double> fitted_inverse_series(const std::vector<double>& chi, double eps0, double h = 0.02,
                                                 int degree = 10, int samples = 64) {
  Eigen::MatrixXd a(samples, degree + 1);
  Eigen::VectorXd y(samples);
  for (int i = 0; i < samples; ++i) {
    const double u = std::cos(std::numbers::pi * (i + 0.5) / samples);
    const double d = h * u;
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      a(i, j) = p;
      p *= u;
    }
    y[i] = solve_field(chi, eps0, d);
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  std::vector<double> out;
  for (int j = 1; j <= degree; ++j) out.push_back(c[j] / std::pow(h, j));
  return out;
}

/// Truncated power-series composition: coefficients of D^1..D^n in D(E(D))
/// where E(D) = sum eta[k] D^(k+1).
inline std::vector<double> compose_displacement(const std::vector<double>& chi, double eps0,
                                                const std::vector<double>& eta) {
  const std::size_t n = eta.size();
  auto mul = [n](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; i + j <= n; ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  std::vector<double> e(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) e[k + 1] = eta[k];
  std::vector<double> d(n + 1, 0.0), power = e;
  for (std::size_t i = 0; i <= n; ++i) d[i] += e[i];
  for (std::size_t m = 0; m < chi.size(); ++m) {
    for (std::size_t i = 0; i <= n; ++i) d[i] += chi[m] * power[i];
    power = mul(power, e);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(eps0 * d[i]);
  return out;
}

/// Composite Simpson rule with `intervals` (even) panels.
inline cd simpson(const std::function<cd(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  cd s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// (1/L) integral_{-L/2}^{L/2} exp(i dk z) dz by quadrature.
inline cd phase_matching_quadrature(double dk, double length, int intervals = 20000) {
  return simpson([&](double z) { return std::exp(cd(0.0, dk * z)); }, -length / 2, length / 2, intervals) / length;
}

/// Fundamental TE mode of a symmetric slab: solves tan(q d / 2) = g / q for
/// n_eff by bisection, q = k0 sqrt(n_core^2 - n_eff^2), g = k0 sqrt(n_eff^2 - n_clad^2).
inline double symmetric_slab_fundamental(double n_clad, double n_core, double thickness, double k0) {
  auto f = [&](double ne) {
    const double q = k0 * std::sqrt(n_core * n_core - ne * ne);
    const double g = k0 * std::sqrt(ne * ne - n_clad * n_clad);
    return std::tan(q * thickness / 2) - g / q;
  };
  // The fundamental branch has q d / 2 in (0, pi/2): n_eff between the branch
  // edge and n_core.
  const double q_edge = std::numbers::pi / thickness;
  double lo = std::sqrt(std::max(n_clad * n_clad, n_core * n_core - (q_edge / k0) * (q_edge / k0))) + 1e-15;
  double hi = n_core - 1e-15;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// eps0 integral n^2 psi^2 dx in closed form for psi = exp(g x) (x < 0),
/// cos(q x) + (g/q) sin(q x) in the core (0 < x < d), psi(d) exp(-g (x - d)) beyond.
inline double slab_energy_integral(double n_clad, double n_core, double thickness, double k0, double n_eff,
                                   double eps0) {
  const double q = k0 * std::sqrt(n_core * n_core - n_eff * n_eff);
  const double g = k0 * std::sqrt(n_eff * n_eff - n_clad * n_clad);
  const double d = thickness;
  const double r = g / q;
  const double cos2 = d / 2 + std::sin(2 * q * d) / (4 * q);
  const double sin2 = d / 2 - std::sin(2 * q * d) / (4 * q);
  const double cross = (1 - std::cos(2 * q * d)) / (2 * q);
  const double core = cos2 + r * r * sin2 + r * cross;
  const double psi_d = std::cos(q * d) + r * std::sin(q * d);
  const double clad = 1.0 / (2 * g) + psi_d * psi_d / (2 * g);
  return eps0 * (n_core * n_core * core + n_clad * n_clad * clad);
}

/// Dense single-mode ladder matrix with cutoff n_max.
inline Eigen::MatrixXcd annihilator(int n_max) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

/// Kronecker product with the first factor most significant.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Two-mode squeezed vacuum: <n_A> = sinh^2(g t).
inline double two_mode_squeezing_population(double gt) { return std::sinh(gt) * std::sinh(gt); }

/// Single-excitation beamsplitter transfer: P = sin^2(g t).
inline double conversion_probability(double gt) { return std::sin(gt) * std::sin(gt); }

}  // namespace oracle
