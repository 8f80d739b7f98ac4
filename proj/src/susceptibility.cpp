#include "dquant/susceptibility.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "dquant/error.h"

namespace dquant {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

Eigen::MatrixXcd as_matrix(const SusceptibilityTensor& t) {
  const int d = t.dim();
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = t[static_cast<std::size_t>(i * d + j)];
  return m;
}

SusceptibilityTensor from_matrix(const Eigen::MatrixXcd& m, TensorRole role) {
  const int d = static_cast<int>(m.rows());
  std::vector<complex> e(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) e[static_cast<std::size_t>(i * d + j)] = m(i, j);
  return SusceptibilityTensor(1, role, d, std::move(e));
}

// All ordered ways of writing `total` as `parts` positive integers.
void compositions(int total, int parts, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    current.push_back(first);
    compositions(total - first, parts - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

UnitSystem UnitSystem::natural() { return {}; }

UnitSystem UnitSystem::si() {
  return {8.8541878128e-12, 1.25663706212e-6, 1.054571817e-34, 299792458.0};
}

void UnitSystem::validate() const {
  if (!(eps0 > 0 && mu0 > 0 && hbar > 0 && c > 0))
    throw InputError("unit constants must be strictly positive");
}

std::string to_string(TensorRole role) {
  switch (role) {
    case TensorRole::chi: return "chi";
    case TensorRole::eta: return "eta";
    case TensorRole::gamma: return "gamma";
  }
  return "?";
}

SusceptibilityTensor::SusceptibilityTensor(int order, TensorRole role, int dim,
                                           std::vector<complex> entries)
    : order_(order), role_(role), dim_(dim), entries_(std::move(entries)) {
  if (order_ < 1) throw std::invalid_argument("tensor order must be >= 1");
  if (dim_ != 1 && dim_ != 3) throw std::invalid_argument("tensor dimension must be 1 or 3");
  if (entries_.size() != ipow(dim_, order_ + 1))
    throw std::invalid_argument("tensor entry count must equal dim^(order+1)");
}

SusceptibilityTensor SusceptibilityTensor::zero(int order, TensorRole role, int dim) {
  return SusceptibilityTensor(order, role, dim, std::vector<complex>(ipow(dim, order + 1)));
}

SusceptibilityTensor SusceptibilityTensor::scalar(int order, TensorRole role, double value) {
  return SusceptibilityTensor(order, role, 1, {complex(value, 0.0)});
}

std::size_t SusceptibilityTensor::flat_index(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int i : index) flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  return flat;
}

std::vector<int> SusceptibilityTensor::unflatten(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(rank()));
  for (int r = rank() - 1; r >= 0; --r) {
    idx[static_cast<std::size_t>(r)] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
    flat /= static_cast<std::size_t>(dim_);
  }
  return idx;
}

bool SusceptibilityTensor::is_zero(double tol) const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [tol](complex z) { return std::abs(z) <= tol; });
}

bool SusceptibilityTensor::is_real(double tol) const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [tol](complex z) { return std::abs(z.imag()) <= tol; });
}

double SusceptibilityTensor::max_abs() const {
  double m = 0.0;
  for (complex z : entries_) m = std::max(m, std::abs(z));
  return m;
}

SusceptibilityTensor SusceptibilityTensor::with_role(TensorRole role) const {
  return SusceptibilityTensor(order_, role, dim_, entries_);
}

SusceptibilityTensor SusceptibilityTensor::scaled(complex factor) const {
  std::vector<complex> e = entries_;
  for (auto& z : e) z *= factor;
  return SusceptibilityTensor(order_, role_, dim_, std::move(e));
}

SusceptibilityTensor SusceptibilityTensor::embedded(int axis) const {
  if (dim_ == 3) return *this;
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis out of range");
  auto out = zero(order_, role_, 3).entries_;
  std::size_t flat = 0;
  for (int r = 0; r < rank(); ++r) flat = flat * 3 + static_cast<std::size_t>(axis);
  out[flat] = entries_[0];
  return SusceptibilityTensor(order_, role_, 3, std::move(out));
}

MediumSpec::MediumSpec(UnitSystem u, int d, std::vector<SusceptibilityTensor> tensors)
    : units(u), dim(d), chi(std::move(tensors)) {
  units.validate();
  if (dim != 1 && dim != 3) throw InputError("medium dimension must be 1 or 3");
  if (chi.empty()) throw InputError("medium needs at least chi(1)");
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i].order() != static_cast<int>(i) + 1)
      throw InputError("susceptibility orders must be contiguous from 1");
    if (chi[i].dim() != dim) throw InputError("susceptibility dimension mismatch");
    if (chi[i].role() != TensorRole::chi) throw InputError("medium tensors must have role chi");
  }
}

int MediumSpec::highest_order() const {
  for (int n = static_cast<int>(chi.size()); n >= 2; --n)
    if (!chi[static_cast<std::size_t>(n - 1)].is_zero()) return n;
  return 1;
}

const SusceptibilityTensor& MediumSpec::chi_of(int order) const {
  if (order < 1 || order > static_cast<int>(chi.size()))
    throw std::out_of_range("susceptibility order not present");
  return chi[static_cast<std::size_t>(order - 1)];
}

SusceptibilityTensor MediumSpec::chi_or_zero(int order) const {
  if (order >= 1 && order <= static_cast<int>(chi.size())) return chi_of(order);
  return SusceptibilityTensor::zero(order, TensorRole::chi, dim);
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}
Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}
Rational operator/(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den, a.den * b.num);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

SusceptibilityTensor invert_linear(const SusceptibilityTensor& chi1, const UnitSystem& units) {
  if (chi1.order() != 1) throw std::invalid_argument("invert_linear expects a first-order tensor");
  const int d = chi1.dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d) + as_matrix(chi1);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  // Relative threshold: the smallest pivot compared to the largest.
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() || lu.maxPivot() < 1e-13) throw NonInvertibleResponse();
  Eigen::MatrixXcd eta = lu.inverse() / units.eps0;
  return from_matrix(eta, TensorRole::eta);
}

SusceptibilityTensor eta2_from_chi2(const SusceptibilityTensor& chi2,
                                    const SusceptibilityTensor& eta1, const UnitSystem& units) {
  if (chi2.order() != 2 || eta1.order() != 1)
    throw std::invalid_argument("eta2_from_chi2 expects chi(2) and eta(1)");
  if (chi2.dim() != eta1.dim()) throw std::invalid_argument("dimension mismatch");
  const int d = chi2.dim();
  const auto e1 = [&](int a, int b) { return eta1[static_cast<std::size_t>(a * d + b)]; };
  std::vector<complex> out(static_cast<std::size_t>(d * d * d));
  for (int j = 0; j < d; ++j)
    for (int n = 0; n < d; ++n)
      for (int p = 0; p < d; ++p) {
        complex acc = 0.0;
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            for (int m = 0; m < d; ++m)
              acc += e1(j, k) * chi2[static_cast<std::size_t>((k * d + l) * d + m)] * e1(l, n) *
                     e1(m, p);
        out[static_cast<std::size_t>((j * d + n) * d + p)] = -units.eps0 * acc;
      }
  return SusceptibilityTensor(2, TensorRole::eta, d, std::move(out));
}

std::vector<SusceptibilityTensor> invert_series(const MediumSpec& medium, int max_order) {
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  const int d = medium.dim;
  const double eps0 = medium.units.eps0;

  std::vector<SusceptibilityTensor> eta;
  eta.push_back(invert_linear(medium.chi_of(1), medium.units));

  // D = eps0 (1 + chi1) E + eps0 sum_{n>=2} chi(n) E^n. Substituting E = sum eta(m) D^m
  // and matching powers of D gives, for p >= 2,
  //   eta(p) = -eps0 eta(1) . sum_n sum_{m1+..+mn=p} chi(n) [eta(m1) x ... x eta(mn)].
  for (int p = 2; p <= max_order; ++p) {
    const std::size_t out_size = ipow(d, p + 1);
    std::vector<complex> acc(out_size);
    for (int n = 2; n <= p; ++n) {
      const SusceptibilityTensor chin = medium.chi_or_zero(n);
      if (chin.is_zero()) continue;
      std::vector<std::vector<int>> comps;
      std::vector<int> scratch;
      compositions(p, n, scratch, comps);
      for (const auto& comp : comps) {
        for (std::size_t flat = 0; flat < out_size; ++flat) {
          // flat indexes (i', q1..qp); i' contracts with chi's output index.
          std::vector<int> idx(static_cast<std::size_t>(p + 1));
          std::size_t rem = flat;
          for (int r = p; r >= 0; --r) {
            idx[static_cast<std::size_t>(r)] = static_cast<int>(rem % static_cast<std::size_t>(d));
            rem /= static_cast<std::size_t>(d);
          }
          complex sum = 0.0;
          const std::size_t inner = ipow(d, n);
          for (std::size_t jflat = 0; jflat < inner; ++jflat) {
            std::vector<int> cidx(static_cast<std::size_t>(n + 1));
            cidx[0] = idx[0];
            std::size_t jr = jflat;
            for (int r = n; r >= 1; --r) {
              cidx[static_cast<std::size_t>(r)] = static_cast<int>(jr % static_cast<std::size_t>(d));
              jr /= static_cast<std::size_t>(d);
            }
            complex term = chin(cidx);
            if (term == complex(0.0)) continue;
            int q = 1;
            for (int part = 0; part < n && term != complex(0.0); ++part) {
              const int m = comp[static_cast<std::size_t>(part)];
              const auto& em = eta[static_cast<std::size_t>(m - 1)];
              std::vector<int> eidx(static_cast<std::size_t>(m + 1));
              eidx[0] = cidx[static_cast<std::size_t>(part + 1)];
              for (int s = 0; s < m; ++s) eidx[static_cast<std::size_t>(s + 1)] = idx[static_cast<std::size_t>(q + s)];
              term *= em(eidx);
              q += m;
            }
            sum += term;
          }
          acc[flat] += sum;
        }
      }
    }
    std::vector<complex> out(out_size);
    const std::size_t tail = ipow(d, p);
    for (int i = 0; i < d; ++i)
      for (std::size_t t = 0; t < tail; ++t) {
        complex s = 0.0;
        for (int ip = 0; ip < d; ++ip)
          s += eta[0][static_cast<std::size_t>(i * d + ip)] * acc[static_cast<std::size_t>(ip) * tail + t];
        out[static_cast<std::size_t>(i) * tail + t] = -eps0 * s;
      }
    eta.push_back(symmetrize_inputs(SusceptibilityTensor(p, TensorRole::eta, d, std::move(out))));
  }
  return eta;
}

SusceptibilityTensor gamma_from_eta(const SusceptibilityTensor& eta, const UnitSystem& units) {
  if (eta.role() != TensorRole::eta) throw std::invalid_argument("gamma_from_eta expects an eta tensor");
  std::vector<complex> e(eta.entries().begin(), eta.entries().end());
  for (auto& z : e) z = -units.eps0 * z;
  if (eta.order() == 1)
    for (int i = 0; i < eta.dim(); ++i) e[static_cast<std::size_t>(i * eta.dim() + i)] += 1.0;
  return SusceptibilityTensor(eta.order(), TensorRole::gamma, eta.dim(), std::move(e));
}

SusceptibilityTensor eta_from_gamma(const SusceptibilityTensor& gamma, const UnitSystem& units) {
  if (gamma.role() != TensorRole::gamma) throw std::invalid_argument("eta_from_gamma expects a gamma tensor");
  std::vector<complex> e(gamma.entries().begin(), gamma.entries().end());
  for (auto& z : e) z = -z;
  if (gamma.order() == 1)
    for (int i = 0; i < gamma.dim(); ++i) e[static_cast<std::size_t>(i * gamma.dim() + i)] += 1.0;
  for (auto& z : e) z /= units.eps0;
  return SusceptibilityTensor(gamma.order(), TensorRole::eta, gamma.dim(), std::move(e));
}

std::vector<Rational> energy_prefactors(Approach approach, int highest_order) {
  if (highest_order < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<Rational> out;
  for (int n = 1; n <= highest_order; ++n)
    out.emplace_back(approach == Approach::e_based ? n : 1, n + 1);
  return out;
}

SymmetryCheck check_permutation_symmetry(const SusceptibilityTensor& t, double tol) {
  SymmetryCheck result;
  const int r = t.rank();
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const std::vector<int> idx = t.unflatten(flat);
    std::vector<int> perm(static_cast<std::size_t>(r));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> pidx(static_cast<std::size_t>(r));
      for (int s = 0; s < r; ++s) pidx[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
      result.max_deviation = std::max(result.max_deviation, std::abs(t(pidx) - t[flat]));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  result.symmetric = result.max_deviation <= tol;
  return result;
}

SusceptibilityTensor symmetrize_inputs(const SusceptibilityTensor& t) {
  const int n = t.order();
  if (n == 1) return t;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<complex> out(t.size());
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    const std::vector<int> idx = t.unflatten(flat);
    complex s = 0.0;
    std::vector<int> pidx(idx.size());
    pidx[0] = idx[0];
    for (const auto& p : perms) {
      for (int k = 0; k < n; ++k) pidx[static_cast<std::size_t>(k + 1)] = idx[static_cast<std::size_t>(p[static_cast<std::size_t>(k)] + 1)];
      s += t(pidx);
    }
    out[flat] = s / static_cast<double>(perms.size());
  }
  return SusceptibilityTensor(n, t.role(), t.dim(), std::move(out));
}

std::vector<complex> apply_power(const SusceptibilityTensor& t, std::span<const complex> v) {
  if (static_cast<int>(v.size()) != t.dim()) throw std::invalid_argument("vector dimension mismatch");
  std::vector<complex> out(static_cast<std::size_t>(t.dim()));
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    if (t[flat] == complex(0.0)) continue;
    const std::vector<int> idx = t.unflatten(flat);
    complex term = t[flat];
    for (int k = 1; k < t.rank(); ++k) term *= v[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    out[static_cast<std::size_t>(idx[0])] += term;
  }
  return out;
}

}  // namespace dquant
