#pragma once

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dquant {

using complex = std::complex<double>;

struct ModeLabel {
  int id = 0;
  auto operator<=>(const ModeLabel&) const = default;
};

/// Powers of a†^cre a^ann for one mode inside a normally ordered monomial.
struct ModePower {
  int mode = 0;
  int cre = 0;
  int ann = 0;
  auto operator<=>(const ModePower&) const = default;
};

/// Normally ordered product of ladder operators, one factor per mode, sorted
/// by mode id. Empty means the identity.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<ModePower> factors);

  static Monomial annihilation(ModeLabel m) { return Monomial({{m.id, 0, 1}}); }
  static Monomial creation(ModeLabel m) { return Monomial({{m.id, 1, 0}}); }

  const std::vector<ModePower>& factors() const { return factors_; }
  int degree() const;
  bool is_identity() const { return factors_.empty(); }
  int creation_power(int mode) const;
  int annihilation_power(int mode) const;
  Monomial adjoint() const;

  /// Degree first, then lexicographic on factors; fixes the dump order.
  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<ModePower> factors_;
};

struct Ladder {
  ModeLabel mode;
  bool dagger = false;
};

/// A product of ladder operators in arbitrary order, times a coefficient.
struct OperatorString {
  complex coeff{1.0, 0.0};
  std::vector<Ladder> ops;
};

/// Exact polynomial in bosonic ladder operators, stored in normal order.
class BosonicPolynomial {
 public:
  static constexpr double prune_threshold = 1e-15;

  BosonicPolynomial() = default;
  static BosonicPolynomial constant(complex c);
  static BosonicPolynomial term(complex c, Monomial m);
  static BosonicPolynomial annihilation(ModeLabel m);
  static BosonicPolynomial creation(ModeLabel m);
  static BosonicPolynomial number(ModeLabel m);

  const std::map<Monomial, complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  complex coefficient(const Monomial& m) const;
  /// -1 for the zero polynomial.
  int degree() const;
  std::vector<int> modes() const;

  BosonicPolynomial adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  double max_abs_coefficient() const;
  double norm() const;

  BosonicPolynomial& operator+=(const BosonicPolynomial& o);
  BosonicPolynomial& operator-=(const BosonicPolynomial& o);
  BosonicPolynomial& operator*=(complex c);
  void add_term(const Monomial& m, complex c);

  friend BosonicPolynomial operator+(BosonicPolynomial a, const BosonicPolynomial& b) { return a += b; }
  friend BosonicPolynomial operator-(BosonicPolynomial a, const BosonicPolynomial& b) { return a -= b; }
  friend BosonicPolynomial operator*(BosonicPolynomial a, complex c) { return a *= c; }
  friend BosonicPolynomial operator*(complex c, BosonicPolynomial a) { return a *= c; }
  /// Operator product, normal ordered with [a, a†] = 1.
  friend BosonicPolynomial operator*(const BosonicPolynomial& a, const BosonicPolynomial& b);

  /// Keeps only the monomials accepted by `keep`; returns the number dropped.
  template <class Pred>
  std::size_t filter(Pred keep) {
    std::size_t dropped = 0;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (keep(it->first)) {
        ++it;
      } else {
        it = terms_.erase(it);
        ++dropped;
      }
    }
    return dropped;
  }

  /// Replaces a_mode by `amplitude` and a†_mode by its conjugate.
  BosonicPolynomial substitute_classical(ModeLabel mode, complex amplitude) const;

 private:
  std::map<Monomial, complex> terms_;
};

/// Normal-ordered product of two normally ordered monomials.
BosonicPolynomial multiply(const Monomial& a, const Monomial& b);

BosonicPolynomial normal_order(const OperatorString& s);
BosonicPolynomial normal_order(std::span<const OperatorString> strings);
/// Stored polynomials are already canonical; provided for symmetry with the
/// string overloads (idempotent).
BosonicPolynomial normal_order(const BosonicPolynomial& p);

BosonicPolynomial commutator(const BosonicPolynomial& p, const BosonicPolynomial& q);

/// [a_m, f] = df/da†_m and [a†_m, f] = -df/da_m, computed by formal
/// differentiation of the normally ordered form.
BosonicPolynomial commutator_by_derivative(const Ladder& op, const BosonicPolynomial& f);

/// [O, H] / (i hbar). Throws NotHermitian unless H = H†.
BosonicPolynomial heisenberg_derivative(const BosonicPolynomial& o, const BosonicPolynomial& h,
                                        double hbar);

int degree(const BosonicPolynomial& p);

/// Deterministic text form: "(re,im) * ad(i)^p a(j)^q + ..." with %.12e coefficients.
std::string to_string(const BosonicPolynomial& p);

}  // namespace dquant
