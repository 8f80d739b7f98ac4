#include "dquant/maxwell_check.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dquant/error.h"
#include "dquant/report_io.h"

namespace dquant {

namespace {

BosonicPolynomial component_at(const ScalarField& f, int m) {
  auto it = f.find(m);
  return it == f.end() ? BosonicPolynomial{} : it->second;
}

double field_norm_at(const std::array<BosonicPolynomial, 3>& v) {
  double s = 0.0;
  for (const auto& p : v) s += p.norm() * p.norm();
  return std::sqrt(s);
}

void require_consistent(const ModeSet& ms, const std::vector<SusceptibilityTensor>& etas, const UnitSystem& units) {
  if (ms.empty()) throw InputError("inconsistent mode set: no modes");
  if (!ms.has_symmetric_pairs()) throw InputError("inconsistent mode set: every +m mode needs its -m partner");
  const SusceptibilityTensor& eta1 = etas.front();
  for (const auto& mode : ms.modes()) {
    if (!mode.profile.uniform()) throw InputError("inconsistent mode set: Maxwell check needs uniform-medium modes");
    const int axis = mode.profile.polarization_axis();
    if (axis < 0) throw InputError("inconsistent mode set: mode without a single polarization");
    const int a = eta1.dim() == 1 ? 0 : axis;
    const complex e = eta1[static_cast<std::size_t>(a * eta1.dim() + a)];
    if (!(e.real() > 0.0)) throw InputError("inconsistent mode set/medium pairing: non-positive eta(1)");
    const double n = std::sqrt(1.0 / (units.eps0 * e.real()));
    const double omega = units.c * std::abs(mode.k) / n;
    if (std::abs(omega - mode.omega) > 1e-9 * omega || std::abs(mode.profile.index.front() - n) > 1e-9 * n)
      throw InputError("inconsistent mode set/medium pairing: dispersion does not follow eta(1)");
  }
}

void add_into(BosonicPolynomial& h, const BosonicPolynomial& term, double factor) { h += term * factor; }

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::d_based ? "D-based" : "E-linear-wrong"; }

ScalarField spectral_curl(const ScalarField& f, double weight) {
  ScalarField out;
  for (const auto& [m, p] : f) {
    if (m == 0 || p.is_zero()) continue;
    out[m] = p * complex(0.0, weight * m);
  }
  return out;
}

FieldOperator spectral_curl(const FieldOperator& f) {
  FieldOperator out;
  out.kind = f.kind;
  out.weight = f.weight;
  out.area = f.area;
  out.components[0] = spectral_curl(f.components[1], f.weight);
  for (auto& [m, p] : out.components[0]) p *= -1.0;
  out.components[1] = spectral_curl(f.components[0], f.weight);
  return out;
}

FaradayReport verify_faraday(const ModeSet& ms, const MediumSpec& medium, Scheme scheme, const VerifyOptions& options) {
  const UnitSystem& units = medium.units;
  const int order = medium.highest_order();
  const auto etas = invert_series(medium, order);
  require_consistent(ms, etas, units);

  const ExpandedFields f = expand_fields(ms, units);
  std::set<int> retained = f.d.wavenumbers();

  BosonicPolynomial h = integrate_dot(f.b, f.b) * (1.0 / (2.0 * units.mu0));
  FieldOperator e_field;
  double leakage = 0.0;
  if (scheme == Scheme::d_based) {
    for (int n = 1; n <= order; ++n) {
      const auto& eta = etas[static_cast<std::size_t>(n - 1)];
      if (eta.is_zero()) continue;
      add_into(h, integrate_dot(f.d, contract_power(eta, f.d, FieldKind::E)), 1.0 / (n + 1));
    }
    const ElectricField e = electric_field_from_D(f.d, etas, order, retained);
    e_field = e.retained;
    leakage = e.leakage_norm;
  } else {
    // Linear part in D, higher orders through the linear-only field E~ = eta1 D.
    const FieldOperator e_lin = contract_power(etas[0], f.d, FieldKind::E);
    add_into(h, integrate_dot(f.d, e_lin), 0.5);
    for (int n = 2; n <= order; ++n) {
      const auto& chi = medium.chi_of(n);
      if (chi.is_zero()) continue;
      const double pref = units.eps0 * static_cast<double>(n) / (n + 1);
      add_into(h, integrate_dot(e_lin, contract_power(chi, e_lin, FieldKind::E)), pref);
    }
    e_field = e_lin;
  }

  const FieldOperator curl_e = spectral_curl(e_field);
  const FieldOperator curl_b = spectral_curl(f.b);

  FaradayReport report;
  report.scheme = scheme;
  report.order = order;
  report.tolerance = options.tolerance;
  report.leakage_norm = leakage;
  int deg_dbdt = -1, deg_curl = -1;
  for (int m : retained) {
    std::array<BosonicPolynomial, 3> dbdt, minus_curl, far_diff, dddt, curl_b_mu, amp_diff;
    for (std::size_t i = 0; i < 3; ++i) {
      dbdt[i] = heisenberg_derivative(component_at(f.b.components[i], m), h, units.hbar);
      minus_curl[i] = component_at(curl_e.components[i], m) * -1.0;
      far_diff[i] = dbdt[i] - minus_curl[i];
      dddt[i] = heisenberg_derivative(component_at(f.d.components[i], m), h, units.hbar);
      curl_b_mu[i] = component_at(curl_b.components[i], m) * (1.0 / units.mu0);
      amp_diff[i] = dddt[i] - curl_b_mu[i];
      deg_dbdt = std::max(deg_dbdt, dbdt[i].degree());
      deg_curl = std::max(deg_curl, minus_curl[i].degree());
    }
    WavevectorResidual r;
    r.m = m;
    r.k = f.d.wavevector(m);
    r.faraday = field_norm_at(far_diff);
    const double fs = std::max(field_norm_at(dbdt), field_norm_at(minus_curl));
    r.faraday_relative = fs > 0.0 ? r.faraday / fs : 0.0;
    r.ampere = field_norm_at(amp_diff);
    const double as = std::max(field_norm_at(dddt), field_norm_at(curl_b_mu));
    r.ampere_relative = as > 0.0 ? r.ampere / as : 0.0;
    r.pass = r.faraday_relative < options.tolerance && r.ampere_relative < options.tolerance;
    report.max_residual = std::max(report.max_residual, r.faraday_relative);
    report.max_ampere_residual = std::max(report.max_ampere_residual, r.ampere_relative);
    report.components.push_back(r);
  }
  report.degree_dbdt = deg_dbdt;
  report.degree_curl_e = deg_curl;
  report.pass = report.max_residual < options.tolerance && report.max_ampere_residual < options.tolerance &&
                deg_dbdt == deg_curl;
  return report;
}

std::string to_json(const FaradayReport& r) {
  nlohmann::json doc;
  doc["scheme"] = to_string(r.scheme);
  doc["order"] = r.order;
  doc["max_residual"] = r.max_residual;
  doc["max_ampere_residual"] = r.max_ampere_residual;
  doc["leakage_norm"] = r.leakage_norm;
  doc["degree_dbdt"] = r.degree_dbdt;
  doc["degree_curl_e"] = r.degree_curl_e;
  doc["tolerance"] = r.tolerance;
  doc["pass"] = r.pass;
  auto rows = nlohmann::json::array();
  for (const auto& c : r.components) {
    rows.push_back({{"m", c.m},
                    {"k", c.k},
                    {"faraday", c.faraday},
                    {"faraday_relative", c.faraday_relative},
                    {"ampere", c.ampere},
                    {"ampere_relative", c.ampere_relative},
                    {"pass", c.pass}});
  }
  doc["components"] = rows;
  return dump_json(doc);
}

std::string to_table(const FaradayReport& r) {
  std::ostringstream os;
  os << to_string(r.scheme) << " (N=" << r.order << ")\n";
  os << "m\tk\tfaraday\tampere\tstatus\n";
  for (const auto& c : r.components)
    os << c.m << '\t' << format_double(c.k) << '\t' << format_double(c.faraday_relative) << '\t'
       << format_double(c.ampere_relative) << '\t' << (c.pass ? "PASS" : "FAIL") << '\n';
  os << "degree dB/dt = " << r.degree_dbdt << ", degree curl E = " << r.degree_curl_e
     << ", leakage = " << format_double(r.leakage_norm) << ", overall " << (r.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

DegreeContradiction degree_contradiction_report(int order) {
  if (order < 1) throw InputError("order must be >= 1");
  // B-like quadrature i(a† - a) against a Hamiltonian of degree N+1 in the
  // conjugate quadrature a + a†; the curl of a linear field stays linear.
  const ModeLabel a{0};
  const BosonicPolynomial x = BosonicPolynomial::annihilation(a) + BosonicPolynomial::creation(a);
  const BosonicPolynomial p = (BosonicPolynomial::creation(a) - BosonicPolynomial::annihilation(a)) * complex(0.0, 1.0);
  BosonicPolynomial h = x;
  for (int i = 0; i < order; ++i) h = h * x;
  DegreeContradiction r;
  r.order = order;
  r.degree_commutator = degree(commutator(p, h));
  r.degree_curl = degree(x * complex(0.0, 1.0));
  r.contradiction = r.degree_commutator != r.degree_curl;
  return r;
}

std::string to_json(const DegreeContradiction& r) {
  nlohmann::json doc;
  doc["order"] = r.order;
  doc["degree_commutator"] = r.degree_commutator;
  doc["degree_curl"] = r.degree_curl;
  doc["contradiction"] = r.contradiction;
  return dump_json(doc);
}

}  // namespace dquant
