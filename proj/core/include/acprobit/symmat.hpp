#pragma once

#include <Eigen/Core>

namespace acprobit {

/// Dense real symmetric matrix. The input is symmetrized as (A + A^T)/2 on
/// construction so that entries(i,j) == entries(j,i) holds exactly.
class SymMatrix {
public:
  explicit SymMatrix(const Eigen::MatrixXd& entries);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix diagonal(const Eigen::VectorXd& diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  bool all_finite() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

private:
  Eigen::MatrixXd m_;
};

struct EigenExtremes {
  double lambda_min;
  double lambda_max;
};

struct WeylBracket {
  double lo;
  double hi;
};

/// Relative tolerance separating "zero" from "negative" eigenvalues.
inline constexpr double kPsdRelTol = 1e-12;

/// Smallest and largest eigenvalues from a full symmetric eigendecomposition.
/// Throws InvalidInput on non-finite entries.
EigenExtremes eig_extremes(const SymMatrix& m);

/// Symmetric square root. Eigenvalues in [-kPsdRelTol*lambda_max, 0] are
/// clamped to zero; anything more negative throws NotPositiveSemidefinite.
SymMatrix sym_sqrt(const SymMatrix& m);

/// Symmetric inverse square root; requires lambda_min > kPsdRelTol*lambda_max,
/// otherwise throws NotPositiveDefinite carrying lambda_min.
SymMatrix sym_inv_sqrt(const SymMatrix& m);

struct SymSqrtPair {
  SymMatrix sqrt;
  SymMatrix inv_sqrt;
};

/// Both square roots of a positive definite matrix from one eigendecomposition.
SymSqrtPair sym_sqrt_pair(const SymMatrix& m);

/// Weyl bracket for lambda_max(m1) built from m2 and m1 - m2:
/// [lambda_max(m2) + lambda_min(m1-m2), lambda_max(m2) + lambda_max(m1-m2)].
WeylBracket weyl_bracket(const SymMatrix& m1, const SymMatrix& m2);

/// The companion bracket for lambda_min(m1).
WeylBracket weyl_bracket_min(const SymMatrix& m1, const SymMatrix& m2);

/// S^T M S for symmetric S, returned symmetrized.
SymMatrix congruence(const SymMatrix& s, const SymMatrix& m);

}  // namespace acprobit
