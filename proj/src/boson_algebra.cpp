#include "dquant/boson_algebra.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "dquant/error.h"

namespace dquant {

namespace {

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

std::string format_coeff(complex c) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(%.12e,%.12e)", c.real(), c.imag());
  return buf;
}

}  // namespace

Monomial::Monomial(std::vector<ModePower> factors) {
  std::stable_sort(factors.begin(), factors.end(),
            [](const ModePower& a, const ModePower& b) { return a.mode < b.mode; });
  for (const auto& f : factors) {
    if (f.cre < 0 || f.ann < 0) throw std::invalid_argument("negative ladder power");
    if (f.cre == 0 && f.ann == 0) continue;
    if (!factors_.empty() && factors_.back().mode == f.mode) {
      // Same mode twice is only meaningful if the first has no annihilators
      // or the second has no creators; otherwise the product is not ordered.
      auto& prev = factors_.back();
      if (prev.ann != 0 && f.cre != 0) throw std::invalid_argument("monomial factors not normally ordered");
      prev.cre += f.cre;
      prev.ann += f.ann;
      continue;
    }
    factors_.push_back(f);
  }
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.cre + f.ann;
  return d;
}

int Monomial::creation_power(int mode) const {
  for (const auto& f : factors_)
    if (f.mode == mode) return f.cre;
  return 0;
}

int Monomial::annihilation_power(int mode) const {
  for (const auto& f : factors_)
    if (f.mode == mode) return f.ann;
  return 0;
}

Monomial Monomial::adjoint() const {
  std::vector<ModePower> f = factors_;
  for (auto& p : f) std::swap(p.cre, p.ann);
  return Monomial(std::move(f));
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  return factors_ <=> other.factors_;
}

BosonicPolynomial BosonicPolynomial::constant(complex c) { return term(c, Monomial{}); }

BosonicPolynomial BosonicPolynomial::term(complex c, Monomial m) {
  BosonicPolynomial p;
  p.add_term(m, c);
  return p;
}

BosonicPolynomial BosonicPolynomial::annihilation(ModeLabel m) { return term(1.0, Monomial::annihilation(m)); }
BosonicPolynomial BosonicPolynomial::creation(ModeLabel m) { return term(1.0, Monomial::creation(m)); }
BosonicPolynomial BosonicPolynomial::number(ModeLabel m) { return term(1.0, Monomial({{m.id, 1, 1}})); }

complex BosonicPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? complex(0.0) : it->second;
}

int BosonicPolynomial::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::vector<int> BosonicPolynomial::modes() const {
  std::set<int> s;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) s.insert(f.mode);
  return {s.begin(), s.end()};
}

BosonicPolynomial BosonicPolynomial::adjoint() const {
  BosonicPolynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m.adjoint(), std::conj(c));
  return out;
}

bool BosonicPolynomial::is_hermitian(double tol) const {
  return (*this - adjoint()).max_abs_coefficient() <= tol * max_abs_coefficient();
}

double BosonicPolynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double BosonicPolynomial::norm() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::norm(c);
  return std::sqrt(s);
}

void BosonicPolynomial::add_term(const Monomial& m, complex c) {
  auto [it, inserted] = terms_.try_emplace(m, c);
  const double scale = inserted ? std::abs(c) : std::max(std::abs(it->second), std::abs(c));
  if (!inserted) it->second += c;
  // Cancellation is judged relative to the magnitudes being combined so that
  // SI-scale coefficients survive.
  if (std::abs(it->second) <= prune_threshold * scale) terms_.erase(it);
}

BosonicPolynomial& BosonicPolynomial::operator+=(const BosonicPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

BosonicPolynomial& BosonicPolynomial::operator-=(const BosonicPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

BosonicPolynomial& BosonicPolynomial::operator*=(complex c) {
  if (c == complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == complex(0.0))
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

BosonicPolynomial operator*(const BosonicPolynomial& a, const BosonicPolynomial& b) {
  BosonicPolynomial out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      const BosonicPolynomial prod = multiply(ma, mb);
      for (const auto& [m, c] : prod.terms()) out.add_term(m, ca * cb * c);
    }
  return out;
}

BosonicPolynomial BosonicPolynomial::substitute_classical(ModeLabel mode, complex amplitude) const {
  BosonicPolynomial out;
  for (const auto& [m, c] : terms_) {
    std::vector<ModePower> rest;
    complex factor = c;
    for (const auto& f : m.factors()) {
      if (f.mode == mode.id) {
        factor *= std::pow(std::conj(amplitude), f.cre) * std::pow(amplitude, f.ann);
      } else {
        rest.push_back(f);
      }
    }
    out.add_term(Monomial(std::move(rest)), factor);
  }
  return out;
}

BosonicPolynomial multiply(const Monomial& a, const Monomial& b) {
  // Per mode: a†^p1 a^q1 a†^p2 a^q2 = sum_k k! C(q1,k) C(p2,k) a†^(p1+p2-k) a^(q1+q2-k).
  // Distinct modes commute, so the result is the Cartesian product over modes.
  struct Option {
    double coeff;
    int cre;
    int ann;
  };
  std::set<int> modes;
  for (const auto& f : a.factors()) modes.insert(f.mode);
  for (const auto& f : b.factors()) modes.insert(f.mode);

  std::vector<int> mode_list(modes.begin(), modes.end());
  std::vector<std::vector<Option>> options;
  for (int mode : mode_list) {
    const int p1 = a.creation_power(mode), q1 = a.annihilation_power(mode);
    const int p2 = b.creation_power(mode), q2 = b.annihilation_power(mode);
    std::vector<Option> opts;
    for (int k = 0; k <= std::min(q1, p2); ++k)
      opts.push_back({falling(k, k) * binomial(q1, k) * binomial(p2, k), p1 + p2 - k, q1 + q2 - k});
    options.push_back(std::move(opts));
  }

  BosonicPolynomial out;
  std::vector<std::size_t> choice(mode_list.size(), 0);
  while (true) {
    double coeff = 1.0;
    std::vector<ModePower> factors;
    for (std::size_t i = 0; i < mode_list.size(); ++i) {
      const auto& o = options[i][choice[i]];
      coeff *= o.coeff;
      factors.push_back({mode_list[i], o.cre, o.ann});
    }
    out.add_term(Monomial(std::move(factors)), coeff);
    std::size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < options[i].size()) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return out;
}

BosonicPolynomial normal_order(const OperatorString& s) {
  BosonicPolynomial acc = BosonicPolynomial::constant(s.coeff);
  for (const auto& op : s.ops)
    acc = acc * (op.dagger ? BosonicPolynomial::creation(op.mode) : BosonicPolynomial::annihilation(op.mode));
  return acc;
}

BosonicPolynomial normal_order(std::span<const OperatorString> strings) {
  BosonicPolynomial out;
  for (const auto& s : strings) out += normal_order(s);
  return out;
}

BosonicPolynomial normal_order(const BosonicPolynomial& p) { return p; }

BosonicPolynomial commutator(const BosonicPolynomial& p, const BosonicPolynomial& q) {
  return p * q - q * p;
}

BosonicPolynomial commutator_by_derivative(const Ladder& op, const BosonicPolynomial& f) {
  BosonicPolynomial out;
  for (const auto& [m, c] : f.terms()) {
    std::vector<ModePower> factors = m.factors();
    for (auto& pw : factors) {
      if (pw.mode != op.mode.id) continue;
      if (!op.dagger && pw.cre > 0) {
        const double k = pw.cre;
        --pw.cre;
        out.add_term(Monomial(factors), c * k);
      } else if (op.dagger && pw.ann > 0) {
        const double k = pw.ann;
        --pw.ann;
        out.add_term(Monomial(factors), -c * k);
      }
      break;
    }
  }
  return out;
}

BosonicPolynomial heisenberg_derivative(const BosonicPolynomial& o, const BosonicPolynomial& h,
                                        double hbar) {
  if (!h.is_hermitian()) throw NotHermitian();
  return commutator(o, h) * complex(0.0, -1.0 / hbar);
}

int degree(const BosonicPolynomial& p) { return p.degree(); }

std::string to_string(const BosonicPolynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    if (!out.empty()) out += " + ";
    out += format_coeff(c);
    if (m.is_identity()) continue;
    out += " *";
    for (const auto& f : m.factors())
      if (f.cre > 0) out += " ad(" + std::to_string(f.mode) + ")^" + std::to_string(f.cre);
    for (const auto& f : m.factors())
      if (f.ann > 0) out += " a(" + std::to_string(f.mode) + ")^" + std::to_string(f.ann);
  }
  return out;
}

}  // namespace dquant
