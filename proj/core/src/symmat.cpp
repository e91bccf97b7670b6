#include "acprobit/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "acprobit/errors.hpp"

namespace acprobit {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const SymMatrix& m, bool vectors) {
  if (!m.all_finite()) {
    throw InvalidInput("symmetric matrix has non-finite entries");
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
      m.matrix(), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw InvalidInput(os.str());
  }
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw InvalidInput("symmetric matrix must be square with dim >= 1");
  }
  m_ = 0.5 * (entries + entries.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::zero(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

bool SymMatrix::all_finite() const { return m_.allFinite(); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

EigenExtremes eig_extremes(const SymMatrix& m) {
  auto es = decompose(m, false);
  const auto& ev = es.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

SymMatrix sym_sqrt(const SymMatrix& m) {
  auto es = decompose(m, true);
  Eigen::VectorXd ev = es.eigenvalues();
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  if (lmin < -kPsdRelTol * lmax || (lmax < 0.0)) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite (lambda_min = " << lmin << ")";
    throw NotPositiveSemidefinite(os.str(), lmin);
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const auto& v = es.eigenvectors();
  return SymMatrix(v * ev.asDiagonal() * v.transpose());
}

SymMatrix sym_inv_sqrt(const SymMatrix& m) {
  auto es = decompose(m, true);
  Eigen::VectorXd ev = es.eigenvalues();
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  if (!(lmin > kPsdRelTol * lmax) || lmin <= 0.0) {
    std::ostringstream os;
    os << "matrix is not positive definite (lambda_min = " << lmin << ")";
    throw NotPositiveDefinite(os.str(), lmin);
  }
  ev = ev.cwiseSqrt().cwiseInverse();
  const auto& v = es.eigenvectors();
  return SymMatrix(v * ev.asDiagonal() * v.transpose());
}

SymSqrtPair sym_sqrt_pair(const SymMatrix& m) {
  auto es = decompose(m, true);
  Eigen::VectorXd ev = es.eigenvalues();
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  if (!(lmin > kPsdRelTol * lmax) || lmin <= 0.0) {
    std::ostringstream os;
    os << "matrix is not positive definite (lambda_min = " << lmin << ")";
    throw NotPositiveDefinite(os.str(), lmin);
  }
  const auto& v = es.eigenvectors();
  const Eigen::VectorXd root = ev.cwiseSqrt();
  return {SymMatrix(v * root.asDiagonal() * v.transpose()),
          SymMatrix(v * root.cwiseInverse().asDiagonal() * v.transpose())};
}

WeylBracket weyl_bracket(const SymMatrix& m1, const SymMatrix& m2) {
  require_same_dim(m1, m2);
  const double top = eig_extremes(m2).lambda_max;
  const auto diff = eig_extremes(m1 - m2);
  return {top + diff.lambda_min, top + diff.lambda_max};
}

WeylBracket weyl_bracket_min(const SymMatrix& m1, const SymMatrix& m2) {
  require_same_dim(m1, m2);
  const double bottom = eig_extremes(m2).lambda_min;
  const auto diff = eig_extremes(m1 - m2);
  return {bottom + diff.lambda_min, bottom + diff.lambda_max};
}

SymMatrix congruence(const SymMatrix& s, const SymMatrix& m) {
  require_same_dim(s, m);
  return SymMatrix(s.matrix() * m.matrix() * s.matrix());
}

}  // namespace acprobit
