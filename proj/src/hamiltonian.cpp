#include "dquant/hamiltonian.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "dquant/error.h"

namespace dquant {

namespace {

// One ladder-operator piece of the expanded D field:
// amplitude * profile(x, y) * u_m(z) * op, with profile conjugated for a†.
struct FieldTerm {
  Ladder op;
  double amplitude = 0.0;
  int m = 0;
  double k = 0.0;
  const ModeProfile* profile = nullptr;
  bool conjugate = false;
};

struct ProfileFactor {
  const ModeProfile* profile;
  bool conjugate;
};

struct ZRegion {
  double box_length;
  double length;
  bool whole_box() const { return std::abs(length - box_length) <= 1e-12 * box_length; }
};

std::vector<FieldTerm> d_terms(const ModeSet& ms, std::span<const ModeLabel> labels, const UnitSystem& units) {
  std::vector<FieldTerm> terms;
  const double w = ms.weight();
  for (ModeLabel label : labels) {
    const Mode& mode = ms.find(label);
    const double amp = std::sqrt(units.hbar * mode.omega / 2.0) * std::sqrt(w);
    terms.push_back({{label, false}, amp, mode.m, mode.k, &mode.profile, false});
    terms.push_back({{label, true}, amp, -mode.m, -mode.k, &mode.profile, true});
  }
  return terms;
}

int common_axis(std::span<const ProfileFactor> factors) {
  int axis = -2;
  for (const auto& f : factors) {
    const int a = f.profile->polarization_axis();
    if (a < 0) continue;
    if (axis == -2)
      axis = a;
    else if (axis != a)
      throw InputError("scalar susceptibility needs modes with one common polarization");
  }
  return axis < 0 ? 0 : axis;
}

double trapezoid(const std::vector<double>& grid, const std::vector<complex>& f, complex& out) {
  complex s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    if (h <= 0.0) continue;
    s += 0.5 * h * (f[i] + f[i + 1]);
  }
  out = s;
  return 0.0;
}

// integral dxdy T_{i0..ip} prod_t p_t^{i_t}(x, y), with p_t conjugated where flagged.
complex transverse_overlap(const SusceptibilityTensor& t3, std::span<const ProfileFactor> factors) {
  const ModeProfile& first = *factors.front().profile;
  const bool uniform = first.uniform();
  const std::size_t ns = first.samples();
  for (const auto& f : factors) {
    if (f.profile->uniform() != uniform || f.profile->samples() != ns)
      throw InputError("mode profiles must share one transverse grid");
  }

  complex total = 0.0;
  const std::size_t p = factors.size();
  std::vector<int> idx(p);
  std::vector<complex> product(ns);
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == p) {
      const complex coeff = t3(idx);
      if (coeff == complex(0.0)) return;
      std::fill(product.begin(), product.end(), complex(1.0));
      for (std::size_t t = 0; t < p; ++t) {
        const auto& comp = factors[t].profile->d[static_cast<std::size_t>(idx[t])];
        for (std::size_t s = 0; s < ns; ++s)
          product[s] *= factors[t].conjugate ? std::conj(comp[s]) : comp[s];
      }
      complex integral;
      if (uniform)
        integral = product[0] * first.extent;
      else {
        trapezoid(first.grid, product, integral);
        integral *= first.extent;
      }
      total += coeff * integral;
      return;
    }
    for (int i = 0; i < 3; ++i) {
      if (factors[depth].profile->d[static_cast<std::size_t>(i)].empty()) continue;
      idx[depth] = i;
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return total;
}

SusceptibilityTensor promote(const SusceptibilityTensor& t, std::span<const ProfileFactor> factors) {
  return t.dim() == 3 ? t : t.embedded(common_axis(factors));
}

// prefactor * integral dV T(D, ..., D) with D built from `terms`, normal ordered.
BosonicPolynomial expand_power(std::span<const FieldTerm> terms, const SusceptibilityTensor& tensor,
                               double prefactor, const ZRegion& region) {
  const std::size_t p = static_cast<std::size_t>(tensor.rank());
  std::vector<ProfileFactor> all;
  for (const auto& t : terms) all.push_back({t.profile, t.conjugate});
  const SusceptibilityTensor t3 = promote(tensor, all);

  const double z_norm = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(p));
  BosonicPolynomial out;
  std::vector<std::size_t> choice(p, 0);
  std::vector<ProfileFactor> factors(p);
  while (true) {
    int sum_m = 0;
    double sum_k = 0.0, amp = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      const auto& t = terms[choice[i]];
      sum_m += t.m;
      sum_k += t.k;
      amp *= t.amplitude;
    }
    double z = 0.0;
    if (region.whole_box())
      z = sum_m == 0 ? region.box_length : 0.0;
    else
      z = region.length * phase_matching(sum_k * region.length / 2.0);

    if (z != 0.0) {
      for (std::size_t i = 0; i < p; ++i) factors[i] = {terms[choice[i]].profile, terms[choice[i]].conjugate};
      const complex overlap = transverse_overlap(t3, factors);
      if (overlap != complex(0.0)) {
        OperatorString word;
        word.coeff = prefactor * amp * z * z_norm * overlap;
        for (std::size_t i = 0; i < p; ++i) word.ops.push_back(terms[choice[i]].op);
        out += normal_order(word);
      }
    }

    std::size_t i = 0;
    for (; i < p; ++i) {
      if (++choice[i] < terms.size()) break;
      choice[i] = 0;
    }
    if (i == p) break;
  }
  return out;
}

Eigen::MatrixXcd matrix_of(const SusceptibilityTensor& t) {
  const int d = t.dim();
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = t[static_cast<std::size_t>(i * d + j)];
  return m;
}

void require_symmetric(const SusceptibilityTensor& t, const char* what) {
  if (!check_permutation_symmetry(t).symmetric)
    throw InputError(std::string(what) + " lacks full permutation symmetry; the 3! counting does not apply");
}

void require_distinct(const ModeTriple& triple) {
  const auto& f = triple.families;
  if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
    throw InputError("degenerate mode families are not supported; A, B and C must differ");
}

ZRegion region_for(const ModeSet& ms, const ModeTriple& triple) {
  if (!(triple.length > 0.0) || triple.length > ms.box_length() * (1.0 + 1e-12))
    throw InputError("interaction length must lie in (0, L_box]");
  return {ms.box_length(), triple.length};
}

SectorPolynomial restrict_sector(BosonicPolynomial p, const ModeTriple& triple, const SectorOptions& options) {
  SectorPolynomial out;
  if (options.resonant_only) {
    const Monomial forward({{triple.modes[0].id, 1, 0}, {triple.modes[1].id, 1, 0}, {triple.modes[2].id, 0, 1}});
    const Monomial backward = forward.adjoint();
    out.dropped_terms = p.filter([&](const Monomial& m) { return m == forward || m == backward; });
  }
  out.polynomial = std::move(p);
  return out;
}

double rational_value(Rational r) { return r.value(); }

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::d_based: return "D-based";
    case Provenance::e_based_wrong: return "E-based-wrong";
    case Provenance::e_based_corrected: return "E-based-corrected";
    case Provenance::interaction_picture: return "interaction-picture";
  }
  return "?";
}

ModeTriple make_triple(const ModeSet& ms, ModeLabel a, ModeLabel b, ModeLabel c, double length) {
  ModeTriple t;
  const std::array<ModeLabel, 3> labels{a, b, c};
  for (std::size_t i = 0; i < 3; ++i) {
    const Mode& m = ms.find(labels[i]);
    t.families[i] = m.family;
    t.modes[i] = m.label;
    t.k[i] = m.k;
    t.omega[i] = m.omega;
  }
  t.length = length;
  return t;
}

void check_matching(const ModeTriple& triple, const MatchingBudget& budget) {
  if (std::abs(triple.phase_mismatch()) * triple.length / 2.0 >= budget.max_phase)
    throw InputError("mode triple violates the phase-matching budget");
  if (std::abs(triple.frequency_mismatch()) * budget.t_max >= budget.max_phase)
    throw InputError("mode triple violates the energy-matching budget");
}

BosonicPolynomial build_linear(const ModeSet& ms, const UnitSystem& units) {
  BosonicPolynomial h;
  for (const auto& m : ms.modes()) h += BosonicPolynomial::number(m.label) * (units.hbar * m.omega);
  return h;
}

BosonicPolynomial linear_energy_form(const ModeSet& ms, const SusceptibilityTensor& eta1, const UnitSystem& units) {
  const ExpandedFields f = expand_fields(ms, units);
  const FieldOperator e = contract_power(eta1, f.d, FieldKind::E);
  BosonicPolynomial h = integrate_dot(f.b, f.b) * (1.0 / (2.0 * units.mu0));
  h += integrate_dot(f.d, e) * 0.5;
  h.filter([](const Monomial& m) { return !m.is_identity(); });
  return h;
}

SusceptibilityTensor contract_with_linear(const SusceptibilityTensor& chi, const SusceptibilityTensor& eta1) {
  if (eta1.order() != 1) throw std::invalid_argument("expected eta(1)");
  if (chi.dim() != eta1.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = chi.dim();
  const int r = chi.rank();
  // Contract one index at a time: T <- T x_k eta1.
  std::vector<complex> cur(chi.entries().begin(), chi.entries().end());
  for (int axis = 0; axis < r; ++axis) {
    std::vector<complex> next(cur.size());
    for (std::size_t flat = 0; flat < cur.size(); ++flat) {
      const std::vector<int> idx = chi.unflatten(flat);
      complex s = 0.0;
      std::vector<int> src = idx;
      for (int i = 0; i < d; ++i) {
        src[static_cast<std::size_t>(axis)] = i;
        s += cur[chi.flat_index(src)] * eta1[static_cast<std::size_t>(i * d + idx[static_cast<std::size_t>(axis)])];
      }
      next[flat] = s;
    }
    cur = std::move(next);
  }
  return SusceptibilityTensor(chi.order(), TensorRole::eta, d, std::move(cur));
}

SectorPolynomial build_nonlinear_D(const ModeSet& ms, const SusceptibilityTensor& eta2, const ModeTriple& triple,
                                   const UnitSystem& units, const SectorOptions& options) {
  if (eta2.order() != 2) throw std::invalid_argument("build_nonlinear_D expects eta(2)");
  require_symmetric(eta2, "eta(2)");
  require_distinct(triple);
  const ZRegion region = region_for(ms, triple);
  const auto terms = d_terms(ms, triple.modes, units);
  const double prefactor = rational_value(energy_prefactors(Approach::d_based, 2)[1]);
  return restrict_sector(expand_power(terms, eta2, prefactor, region), triple, options);
}

SectorPolynomial build_nonlinear_E_wrong(const ModeSet& ms, const SusceptibilityTensor& chi2,
                                         const SusceptibilityTensor& eta1, const ModeTriple& triple,
                                         const UnitSystem& units, const SectorOptions& options) {
  if (chi2.order() != 2) throw std::invalid_argument("build_nonlinear_E_wrong expects chi(2)");
  require_symmetric(chi2, "chi(2)");
  require_distinct(triple);
  const ZRegion region = region_for(ms, triple);
  const auto terms = d_terms(ms, triple.modes, units);
  const double prefactor = units.eps0 * rational_value(energy_prefactors(Approach::e_based, 2)[1]);
  return restrict_sector(expand_power(terms, contract_with_linear(chi2, eta1), prefactor, region), triple, options);
}

SectorPolynomial quadratic_E_correction(const SusceptibilityTensor& eta1, const SusceptibilityTensor& eta2,
                                        const ModeSet& ms, const ModeTriple& triple, const UnitSystem& units,
                                        const SectorOptions& options) {
  if (eta1.order() != 1 || eta2.order() != 2) throw std::invalid_argument("expected eta(1) and eta(2)");
  if (eta1.dim() != eta2.dim()) throw std::invalid_argument("dimension mismatch");
  require_symmetric(eta2, "eta(2)");
  require_distinct(triple);
  const ZRegion region = region_for(ms, triple);

  // eps0 (1 + chi1) = eta1^-1; the D^3 cross term of (1/2) E.M.E is
  // (eta1 D) . M (eta2 D D), i.e. the tensor S_ljk = eta1_al M_ab eta2_bjk.
  const int d = eta1.dim();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(matrix_of(eta1));
  if (!lu.isInvertible()) throw NonInvertibleResponse();
  const Eigen::MatrixXcd m = lu.inverse();
  const Eigen::MatrixXcd e1 = matrix_of(eta1);
  const Eigen::MatrixXcd left = e1.transpose() * m;  // (l, b)
  std::vector<complex> s(static_cast<std::size_t>(d * d * d));
  for (int l = 0; l < d; ++l)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        complex acc = 0.0;
        for (int b = 0; b < d; ++b) acc += left(l, b) * eta2[static_cast<std::size_t>((b * d + j) * d + k)];
        s[static_cast<std::size_t>((l * d + j) * d + k)] = acc;
      }
  const SusceptibilityTensor cross(2, TensorRole::eta, d, std::move(s));
  const auto terms = d_terms(ms, triple.modes, units);
  return restrict_sector(expand_power(terms, cross, 1.0, region), triple, options);
}

Rational prefactor_ratio(int n) {
  if (n < 2) throw std::invalid_argument("prefactor_ratio needs order n >= 2");
  // E-series prefactor n/(n+1) applied to eps0 chi(n) E~^(n+1) = -eta(n) D^(n+1),
  // against the D-series prefactor 1/(n+1).
  const auto e = energy_prefactors(Approach::e_based, n);
  const auto dp = energy_prefactors(Approach::d_based, n);
  return Rational(-1) * (e.back() / dp.back());
}

ConstructedRatio constructed_prefactor_ratio(int n, double chi_n, double chi1) {
  if (n < 2) throw std::invalid_argument("constructed_prefactor_ratio needs order n >= 2");
  const UnitSystem units = UnitSystem::natural();
  std::vector<SusceptibilityTensor> chi;
  chi.push_back(SusceptibilityTensor::scalar(1, TensorRole::chi, chi1));
  for (int k = 2; k < n; ++k) chi.push_back(SusceptibilityTensor::zero(k, TensorRole::chi, 1));
  chi.push_back(SusceptibilityTensor::scalar(n, TensorRole::chi, chi_n));
  const MediumSpec medium(units, 1, chi);
  const auto etas = invert_series(medium, n);

  const double box = 2.0 * std::numbers::pi;
  const ModeSet ms = make_uniform_medium_modes(std::sqrt(1.0 + chi1), box, 1, 2, units);
  const auto labels = ms.labels();
  const auto terms = d_terms(ms, labels, units);
  const ZRegion region{box, box};

  const auto e_pref = energy_prefactors(Approach::e_based, n);
  const auto d_pref = energy_prefactors(Approach::d_based, n);
  const BosonicPolynomial correct =
      expand_power(terms, etas[static_cast<std::size_t>(n - 1)], d_pref.back().value(), region);
  const BosonicPolynomial wrong =
      expand_power(terms, contract_with_linear(medium.chi_of(n), etas[0]), units.eps0 * e_pref.back().value(), region);

  ConstructedRatio out;
  double best = 0.0;
  for (const auto& [m, c] : correct.terms()) {
    if (std::abs(c) > best) {
      best = std::abs(c);
      out.ratio = (wrong.coefficient(m) / c).real();
      out.reference_correct = c;
      out.reference_wrong = wrong.coefficient(m);
    }
  }
  for (const auto& [m, c] : correct.terms()) {
    const complex r = wrong.coefficient(m) / c;
    out.spread = std::max(out.spread, std::abs(r - out.ratio) / std::abs(out.ratio));
  }
  for (const auto& [m, c] : wrong.terms())
    if (correct.coefficient(m) == complex(0.0)) out.spread = std::numeric_limits<double>::infinity();
  out.monomials = correct.size();
  return out;
}

double phase_matching(double x) {
  if (x == 0.0) return 1.0;
  const double turns = x / std::numbers::pi;
  if (turns == std::nearbyint(turns)) return 0.0;
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

std::vector<PhaseMatchingPoint> phase_matching_curve(double length, std::span<const double> delta_k) {
  if (!(length > 0.0)) throw InputError("interaction length must be positive");
  std::vector<PhaseMatchingPoint> out;
  out.reserve(delta_k.size());
  for (double dk : delta_k) {
    const double phi = phase_matching(dk * length / 2.0);
    out.push_back({dk, phi, phi * phi});
  }
  return out;
}

Interaction build_interaction(const ModeTriple& triple, std::span<const ModeProfile, 3> profiles,
                              const SusceptibilityTensor& eta2, const UnitSystem& units,
                              const MatchingBudget& budget) {
  if (eta2.order() != 2) throw std::invalid_argument("build_interaction expects eta(2)");
  require_distinct(triple);
  check_matching(triple, budget);

  const std::array<ProfileFactor, 3> factors{{{&profiles[0], true}, {&profiles[1], true}, {&profiles[2], false}}};
  const complex overlap = transverse_overlap(promote(eta2, factors), factors);
  double energy = 1.0;
  for (double w : triple.omega) energy *= units.hbar * w / (4.0 * std::numbers::pi);

  Interaction out;
  out.params.theta = 2.0 * triple.length * std::sqrt(energy) * overlap;
  out.params.delta_k = triple.phase_mismatch();
  out.params.delta = triple.frequency_mismatch();
  out.params.phi = phase_matching(out.params.delta_k * triple.length / 2.0);

  const Monomial forward({{triple.modes[0].id, 1, 0}, {triple.modes[1].id, 1, 0}, {triple.modes[2].id, 0, 1}});
  const complex c = out.params.theta * out.params.phi;
  out.hamiltonian = BosonicPolynomial::term(c, forward);
  out.hamiltonian += BosonicPolynomial::term(std::conj(c), forward.adjoint());
  return out;
}

HamiltonianSpec assemble_hamiltonian(const ModeSet& ms, const MediumSpec& medium, const ModeTriple& triple,
                                     Provenance provenance) {
  const auto etas = invert_series(medium, 2);
  HamiltonianSpec h;
  h.linear = build_linear(ms, medium.units);
  h.order = medium.highest_order();
  h.provenance = provenance;
  const SusceptibilityTensor chi2 = medium.chi_or_zero(2);
  switch (provenance) {
    case Provenance::d_based: {
      auto s = build_nonlinear_D(ms, etas[1], triple, medium.units);
      h.nonlinear = std::move(s.polynomial);
      h.dropped_terms = s.dropped_terms;
      break;
    }
    case Provenance::e_based_wrong: {
      auto s = build_nonlinear_E_wrong(ms, chi2, etas[0], triple, medium.units);
      h.nonlinear = std::move(s.polynomial);
      h.dropped_terms = s.dropped_terms;
      break;
    }
    case Provenance::e_based_corrected: {
      auto s = build_nonlinear_E_wrong(ms, chi2, etas[0], triple, medium.units);
      auto c = quadratic_E_correction(etas[0], etas[1], ms, triple, medium.units);
      h.nonlinear = s.polynomial + c.polynomial;
      h.dropped_terms = s.dropped_terms + c.dropped_terms;
      break;
    }
    case Provenance::interaction_picture: {
      std::array<ModeProfile, 3> profiles;
      for (std::size_t i = 0; i < 3; ++i) profiles[i] = ms.find(triple.modes[i]).profile;
      h.nonlinear = build_interaction(triple, profiles, etas[1], medium.units).hamiltonian;
      h.linear = BosonicPolynomial{};
      break;
    }
  }
  return h;
}

}  // namespace dquant
