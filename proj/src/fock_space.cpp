#include "dquant/fock_space.h"

#include <cmath>
#include <stdexcept>

namespace dquant {

FockSpace::FockSpace(std::vector<ModeLabel> modes, std::vector<int> cutoffs)
    : modes_(std::move(modes)), cutoffs_(std::move(cutoffs)) {
  if (modes_.size() != cutoffs_.size()) throw std::invalid_argument("one cutoff per mode required");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (cutoffs_[i] < 0) throw std::invalid_argument("cutoff must be non-negative");
    for (std::size_t j = 0; j < i; ++j)
      if (modes_[i] == modes_[j]) throw std::invalid_argument("duplicate mode in Fock space");
  }
  strides_.assign(modes_.size(), 1);
  for (std::size_t i = modes_.size(); i-- > 0;) {
    strides_[i] = dimension_;
    dimension_ *= static_cast<std::size_t>(cutoffs_[i] + 1);
  }
}

FockSpace::FockSpace(std::vector<ModeLabel> modes, int cutoff)
    : FockSpace(modes, std::vector<int>(modes.size(), cutoff)) {}

std::size_t FockSpace::index_of(const std::vector<int>& occ) const {
  if (occ.size() != modes_.size()) throw std::invalid_argument("occupation vector size mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] < 0 || occ[i] > cutoffs_[i]) throw std::out_of_range("occupation outside cutoff");
    idx += static_cast<std::size_t>(occ[i]) * strides_[i];
  }
  return idx;
}

std::vector<int> FockSpace::occupations(std::size_t index) const {
  std::vector<int> occ(modes_.size());
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    occ[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return occ;
}

std::size_t FockSpace::slot(ModeLabel m) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i] == m) return i;
  throw std::invalid_argument("unknown mode label " + std::to_string(m.id));
}

Eigen::VectorXcd FockSpace::basis_state(const std::vector<int>& occ) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension_));
  v(static_cast<Eigen::Index>(index_of(occ))) = 1.0;
  return v;
}

bool FockSpace::is_interior(std::size_t index, int margin) const {
  const auto occ = occupations(index);
  for (std::size_t i = 0; i < occ.size(); ++i)
    if (occ[i] > cutoffs_[i] - margin) return false;
  return true;
}

SparseMatrix to_matrix(const BosonicPolynomial& p, const FockSpace& space) {
  struct Factor {
    std::size_t slot;
    int cre;
    int ann;
  };
  std::vector<std::pair<std::vector<Factor>, complex>> compiled;
  for (const auto& [m, c] : p.terms()) {
    std::vector<Factor> f;
    for (const auto& pw : m.factors()) f.push_back({space.slot(ModeLabel{pw.mode}), pw.cre, pw.ann});
    compiled.emplace_back(std::move(f), c);
  }

  std::vector<Eigen::Triplet<complex>> triplets;
  const auto& cut = space.cutoffs();
  for (std::size_t col = 0; col < space.dimension(); ++col) {
    const std::vector<int> occ = space.occupations(col);
    for (const auto& [factors, c] : compiled) {
      std::vector<int> out = occ;
      double amp = 1.0;
      bool alive = true;
      for (const auto& f : factors) {
        int& n = out[f.slot];
        if (n < f.ann) {
          alive = false;
          break;
        }
        for (int k = 0; k < f.ann; ++k) amp *= std::sqrt(static_cast<double>(n - k));
        n -= f.ann;
        if (n + f.cre > cut[f.slot]) {
          alive = false;
          break;
        }
        for (int k = 1; k <= f.cre; ++k) amp *= std::sqrt(static_cast<double>(n + k));
        n += f.cre;
      }
      if (!alive) continue;
      triplets.emplace_back(static_cast<int>(space.index_of(out)), static_cast<int>(col), c * amp);
    }
  }
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  SparseMatrix mat(dim, dim);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return mat;
}

}  // namespace dquant
