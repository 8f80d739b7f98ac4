#include "dquant/field_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "dquant/error.h"
#include "dquant/report_io.h"

namespace dquant {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

bool same_field_shape(const FieldOperator& a, const FieldOperator& b) {
  return std::abs(a.weight - b.weight) <= 1e-12 * a.weight;
}

}  // namespace

int ModeProfile::polarization_axis() const {
  int axis = -1;
  for (int i = 0; i < 3; ++i) {
    const auto& c = d[static_cast<std::size_t>(i)];
    const bool nonzero = std::any_of(c.begin(), c.end(), [](complex z) { return z != complex(0.0); });
    if (!nonzero) continue;
    if (axis != -1) return -1;
    axis = i;
  }
  return axis;
}

double normalization_integral(const ModeProfile& p, const UnitSystem& units) {
  auto density = [&](std::size_t s) {
    double sum = 0.0;
    for (const auto& comp : p.d)
      if (!comp.empty()) sum += std::norm(comp[s]);
    const double n = p.index.at(s);
    return sum / (units.eps0 * n * n);
  };
  double integral = 0.0;
  if (p.uniform()) {
    integral = density(0) * p.extent;
  } else {
    for (std::size_t s = 0; s + 1 < p.grid.size(); ++s) {
      const double h = p.grid[s + 1] - p.grid[s];
      if (h <= 0.0) continue;
      integral += 0.5 * h * (density(s) + density(s + 1));
    }
    integral *= p.extent;
  }
  return integral * p.vp_over_vg;
}

ModeProfile normalized(ModeProfile p, const UnitSystem& units) {
  const double norm = normalization_integral(p, units);
  if (!(norm > 0.0)) throw InputError("cannot normalize a zero mode profile");
  const double s = 1.0 / std::sqrt(norm);
  for (auto& comp : p.d)
    for (auto& z : comp) z *= s;
  for (auto& comp : p.b)
    for (auto& z : comp) z *= s;
  return p;
}

ModeLabel mode_label(int family, int m) { return ModeLabel{family * 1'000'000 + 500'000 + m}; }

ModeSet::ModeSet(double box_length, std::vector<Mode> modes, std::vector<int> excluded_m)
    : box_length_(box_length), modes_(std::move(modes)), excluded_m_(std::move(excluded_m)) {
  if (!(box_length_ > 0.0)) throw InputError("box length must be positive");
  for (std::size_t i = 0; i < modes_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (modes_[i].label == modes_[j].label) throw InputError("duplicate mode label");
}

double ModeSet::weight() const { return 2.0 * std::numbers::pi / box_length_; }

const Mode& ModeSet::find(ModeLabel label) const {
  for (const auto& m : modes_)
    if (m.label == label) return m;
  throw std::invalid_argument("unknown mode label " + std::to_string(label.id));
}

const Mode* ModeSet::find(int family, int m) const {
  for (const auto& mode : modes_)
    if (mode.family == family && mode.m == m) return &mode;
  return nullptr;
}

std::vector<ModeLabel> ModeSet::labels() const {
  std::vector<ModeLabel> out;
  for (const auto& m : modes_) out.push_back(m.label);
  return out;
}

bool ModeSet::has_symmetric_pairs() const {
  return std::all_of(modes_.begin(), modes_.end(),
                     [this](const Mode& m) { return find(m.family, -m.m) != nullptr; });
}

ModeSet ModeSet::merged(const ModeSet& other) const {
  if (std::abs(box_length_ - other.box_length_) > 1e-12 * box_length_)
    throw InputError("cannot merge mode sets with different box lengths");
  std::vector<Mode> all = modes_;
  all.insert(all.end(), other.modes_.begin(), other.modes_.end());
  std::vector<int> excluded = excluded_m_;
  excluded.insert(excluded.end(), other.excluded_m_.begin(), other.excluded_m_.end());
  return ModeSet(box_length_, std::move(all), std::move(excluded));
}

ModeSet make_uniform_medium_modes(double n_index, double box_length, std::span<const int> m_values,
                                  const UnitSystem& units, const UniformModeOptions& options) {
  units.validate();
  if (!(n_index >= 1.0)) throw InputError("refractive index must be >= 1");
  if (!(box_length > 0.0)) throw InputError("box length must be positive");
  if (options.axis < 0 || options.axis > 1) throw InputError("transverse polarization axis must be x or y");
  if (!(options.area > 0.0)) throw InputError("cross-section area must be positive");

  const double w = 2.0 * std::numbers::pi / box_length;
  std::vector<Mode> modes;
  std::vector<int> excluded;
  for (int m : m_values) {
    if (m == 0) {
      excluded.push_back(m);
      continue;
    }
    Mode mode;
    mode.label = mode_label(options.family, m);
    mode.family = options.family;
    mode.m = m;
    mode.k = w * m;
    mode.omega = units.c * std::abs(mode.k) / n_index;
    mode.v_p = units.c / n_index;
    mode.v_g = units.c / n_index;

    ModeProfile& p = mode.profile;
    p.extent = options.area;
    p.index = {n_index};
    p.vp_over_vg = 1.0;
    const complex d0(std::sqrt(units.eps0 * n_index * n_index / options.area), 0.0);
    p.d[static_cast<std::size_t>(options.axis)] = {d0};
    // B = (mu0 omega / k) z x D.
    const double f = units.mu0 * mode.omega / mode.k;
    if (options.axis == 0)
      p.b[1] = {f * d0};
    else
      p.b[0] = {-f * d0};
    modes.push_back(std::move(mode));
  }
  return ModeSet(box_length, std::move(modes), std::move(excluded));
}

ModeSet make_uniform_medium_modes(double n_index, double box_length, int m_min, int m_max,
                                  const UnitSystem& units, const UniformModeOptions& options) {
  std::vector<int> ms;
  for (int m = m_min; m <= m_max; ++m) ms.push_back(m);
  return make_uniform_medium_modes(n_index, box_length, ms, units, options);
}

DispersionTable dispersion_table(const ModeSet& ms, int family) {
  DispersionTable t;
  t.family = family;
  for (const auto& m : ms.modes()) {
    if (m.family != family) continue;
    t.k.push_back(m.k);
    t.omega.push_back(m.omega);
    t.v_g.push_back(m.v_g);
    t.v_p.push_back(m.v_p);
  }
  return t;
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::D: return "D";
    case FieldKind::B: return "B";
    case FieldKind::E: return "E";
  }
  return "?";
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  ScalarField out;
  for (const auto& [ma, pa] : a)
    for (const auto& [mb, pb] : b) {
      BosonicPolynomial prod = pa * pb;
      if (prod.is_zero()) continue;
      prod *= inv_sqrt_2pi;
      auto& slot = out[ma + mb];
      slot += prod;
      if (slot.is_zero()) out.erase(ma + mb);
    }
  return out;
}

ScalarField& accumulate(ScalarField& into, const ScalarField& add, complex factor) {
  for (const auto& [m, p] : add) {
    auto& slot = into[m];
    slot += p * factor;
    if (slot.is_zero()) into.erase(m);
  }
  return into;
}

int FieldOperator::degree() const {
  int d = -1;
  for (const auto& comp : components)
    for (const auto& [m, p] : comp) d = std::max(d, p.degree());
  return d;
}

std::set<int> FieldOperator::wavenumbers() const {
  std::set<int> out;
  for (const auto& comp : components)
    for (const auto& [m, p] : comp)
      if (!p.is_zero()) out.insert(m);
  return out;
}

double FieldOperator::box_length() const { return 2.0 * std::numbers::pi / weight; }

bool FieldOperator::satisfies_hermiticity(double tol) const {
  for (const auto& comp : components)
    for (const auto& [m, p] : comp) {
      auto it = comp.find(-m);
      const BosonicPolynomial partner = it == comp.end() ? BosonicPolynomial{} : it->second;
      const double scale = std::max(p.max_abs_coefficient(), partner.max_abs_coefficient());
      if ((p - partner.adjoint()).max_abs_coefficient() > tol * scale) return false;
    }
  return true;
}

double FieldOperator::coefficient_norm() const {
  double s = 0.0;
  for (const auto& comp : components)
    for (const auto& [m, p] : comp) s += p.norm() * p.norm();
  return std::sqrt(s);
}

ExpandedFields expand_fields(const ModeSet& ms, const UnitSystem& units, std::size_t transverse_sample) {
  if (ms.empty()) throw InputError("cannot expand fields over an empty mode set");
  const double w = ms.weight();
  ExpandedFields out;
  out.d.kind = FieldKind::D;
  out.b.kind = FieldKind::B;
  out.d.weight = out.b.weight = w;
  out.d.area = out.b.area = ms.modes().front().profile.extent;
  for (const auto& mode : ms.modes()) {
    if (std::abs(mode.profile.extent - out.d.area) > 1e-12 * out.d.area)
      throw InputError("modes in one field expansion must share a cross-section");
    const double amp = std::sqrt(units.hbar * mode.omega / 2.0) * std::sqrt(w);
    const auto a = BosonicPolynomial::annihilation(mode.label);
    const auto ad = BosonicPolynomial::creation(mode.label);
    const std::size_t s = mode.profile.uniform() ? 0 : transverse_sample;
    auto add = [&](FieldOperator& f, const std::array<std::vector<complex>, 3>& prof) {
      for (std::size_t i = 0; i < 3; ++i) {
        if (prof[i].empty()) continue;
        const complex c = amp * prof[i].at(s);
        if (c == complex(0.0)) continue;
        f.components[i][mode.m] += a * c;
        f.components[i][-mode.m] += ad * std::conj(c);
      }
    };
    add(out.d, mode.profile.d);
    add(out.b, mode.profile.b);
  }
  for (auto* f : {&out.d, &out.b})
    for (auto& comp : f->components)
      std::erase_if(comp, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

SusceptibilityTensor promote_for_field(const SusceptibilityTensor& t, const FieldOperator& f) {
  if (t.dim() == 3) return t;
  int axis = -1;
  for (int i = 0; i < 3; ++i) {
    if (f.components[static_cast<std::size_t>(i)].empty()) continue;
    if (axis != -1) throw InputError("scalar susceptibility needs a single field polarization");
    axis = i;
  }
  return t.embedded(axis == -1 ? 0 : axis);
}

FieldOperator contract_power(const SusceptibilityTensor& tensor, const FieldOperator& d, FieldKind kind) {
  const SusceptibilityTensor t = promote_for_field(tensor, d);
  FieldOperator out;
  out.kind = kind;
  out.weight = d.weight;
  out.area = d.area;
  const int n = t.order();

  // Products D_j1 ... D_jn are built depth-first so shared prefixes are reused.
  std::vector<int> idx(static_cast<std::size_t>(n));
  auto recurse = [&](auto&& self, int depth, const ScalarField& prefix) -> void {
    if (depth == n) {
      for (int i = 0; i < 3; ++i) {
        std::vector<int> full{i};
        full.insert(full.end(), idx.begin(), idx.end());
        const complex coeff = t(full);
        if (coeff == complex(0.0)) continue;
        accumulate(out.components[static_cast<std::size_t>(i)], prefix, coeff);
      }
      return;
    }
    for (int j = 0; j < 3; ++j) {
      const auto& comp = d.components[static_cast<std::size_t>(j)];
      if (comp.empty()) continue;
      idx[static_cast<std::size_t>(depth)] = j;
      self(self, depth + 1, depth == 0 ? comp : multiply(prefix, comp));
    }
  };
  recurse(recurse, 0, ScalarField{});
  return out;
}

ElectricField electric_field_from_D(const FieldOperator& d, std::span<const SusceptibilityTensor> etas,
                                    int max_order, const std::set<int>& retained) {
  if (max_order < 1 || max_order > static_cast<int>(etas.size()))
    throw std::invalid_argument("max_order exceeds the available inverse susceptibilities");
  FieldOperator full;
  full.kind = FieldKind::E;
  full.weight = d.weight;
  full.area = d.area;
  for (int n = 1; n <= max_order; ++n) {
    const auto& eta = etas[static_cast<std::size_t>(n - 1)];
    if (eta.order() != n) throw std::invalid_argument("inverse susceptibilities must be ordered 1..N");
    if (eta.is_zero()) continue;
    const FieldOperator term = contract_power(eta, d, FieldKind::E);
    for (std::size_t i = 0; i < 3; ++i) accumulate(full.components[i], term.components[i]);
  }

  ElectricField out;
  out.retained = full;
  out.leaked = full;
  for (std::size_t i = 0; i < 3; ++i) {
    std::erase_if(out.retained.components[i], [&](const auto& kv) { return !retained.contains(kv.first); });
    std::erase_if(out.leaked.components[i], [&](const auto& kv) { return retained.contains(kv.first); });
  }
  out.leakage_norm = out.leaked.coefficient_norm();
  return out;
}

BosonicPolynomial integrate_dot(const FieldOperator& a, const FieldOperator& b) {
  if (!same_field_shape(a, b)) throw std::invalid_argument("fields live on different boxes");
  // integral over the box of u_m u_n = delta_{m+n,0} / w
  BosonicPolynomial out;
  for (std::size_t i = 0; i < 3; ++i)
    for (const auto& [m, pa] : a.components[i]) {
      auto it = b.components[i].find(-m);
      if (it == b.components[i].end()) continue;
      out += pa * it->second;
    }
  out *= a.area / a.weight;
  return out;
}

std::string mode_set_to_json(const ModeSet& ms) {
  nlohmann::json doc;
  doc["box_length"] = ms.box_length();
  doc["weight"] = ms.weight();
  doc["excluded_m"] = ms.excluded_m();
  auto modes = nlohmann::json::array();
  for (const auto& m : ms.modes()) {
    nlohmann::json jm;
    jm["id"] = m.label.id;
    jm["family"] = m.family;
    jm["m"] = m.m;
    jm["k"] = m.k;
    jm["omega"] = m.omega;
    jm["v_g"] = m.v_g;
    jm["v_p"] = m.v_p;
    jm["profile"]["grid"] = m.profile.grid;
    jm["profile"]["extent"] = m.profile.extent;
    jm["profile"]["index"] = m.profile.index;
    jm["profile"]["vp_over_vg"] = m.profile.vp_over_vg;
    for (std::size_t i = 0; i < 3; ++i) {
      const char* axis = i == 0 ? "x" : (i == 1 ? "y" : "z");
      auto re = nlohmann::json::array();
      auto im = nlohmann::json::array();
      for (complex z : m.profile.d[i]) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      jm["profile"]["d"][axis] = {{"re", re}, {"im", im}};
    }
    modes.push_back(jm);
  }
  doc["modes"] = modes;
  return dump_json(doc);
}

}  // namespace dquant
