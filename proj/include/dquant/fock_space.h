#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dquant/boson_algebra.h"

namespace dquant {

using SparseMatrix = Eigen::SparseMatrix<complex, Eigen::RowMajor>;

/// Truncated multi-mode number basis. The first mode is the most significant
/// digit of the basis index.
class FockSpace {
 public:
  FockSpace(std::vector<ModeLabel> modes, std::vector<int> cutoffs);
  FockSpace(std::vector<ModeLabel> modes, int cutoff);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  std::size_t dimension() const { return dimension_; }

  std::size_t index_of(const std::vector<int>& occupations) const;
  std::vector<int> occupations(std::size_t index) const;
  /// Position of the mode in the basis ordering; throws on unknown labels.
  std::size_t slot(ModeLabel m) const;

  Eigen::VectorXcd basis_state(const std::vector<int>& occupations) const;
  /// True when every occupation is at most cutoff - margin.
  bool is_interior(std::size_t index, int margin) const;

 private:
  std::vector<ModeLabel> modes_;
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 1;
};

/// Matrix of p in the number basis. Ladder operators act exactly; states that
/// would leave the cutoff are dropped, so products agree with the symbolic
/// algebra only on the interior subspace.
SparseMatrix to_matrix(const BosonicPolynomial& p, const FockSpace& space);

}  // namespace dquant
