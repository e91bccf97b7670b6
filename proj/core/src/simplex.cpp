#include "acprobit/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "acprobit/errors.hpp"

namespace acprobit {

namespace {

// Tableau with constraint rows 0..m-1 and the reduced-cost row m.
// Column layout: [structural (nvar) | artificial (m) | rhs].
class Tableau {
public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
      : m_(a.rows()), nvar_(a.cols()), nart_(a.rows()), t_(a.rows() + 1, a.cols() + a.rows() + 1), basis_(m_) {
    t_.setZero();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(nvar_) = sign * a.row(i);
      t_(i, nvar_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[i] = nvar_ + i;
    }
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index rhs() const { return t_.cols() - 1; }
  bool is_artificial(Eigen::Index j) const { return j >= nvar_ && j < nvar_ + nart_; }

  // Load the reduced-cost row for "maximize cost^T x" over all non-rhs columns.
  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(m_).setZero();
    for (Eigen::Index j = 0; j < rhs(); ++j) t_(m_, j) = -cost(j);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) t_.row(m_) += cb * t_.row(i);
    }
  }

  // Runs the simplex on the current objective. Returns false if unbounded.
  bool optimize(bool allow_artificial, double tol, int& pivots) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs(); ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (t_(m_, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double piv = t_(i, enter);
        if (piv > tol) {
          const double ratio = t_(i, rhs()) / piv;
          if (ratio < best - tol ||
              (std::fabs(ratio - best) <= tol && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Pivot basic artificials out; rows where that is impossible are redundant
  // and dropped.
  void expel_artificials(double tol) {
    for (Eigen::Index i = 0; i < m_;) {
      if (!is_artificial(basis_[i])) {
        ++i;
        continue;
      }
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < nvar_; ++j) {
        if (std::fabs(t_(i, j)) > tol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        ++i;
      } else {
        drop_row(i);
      }
    }
  }

  double objective_value() const { return t_(m_, rhs()); }

  Eigen::VectorXd structural_solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < nvar_) x(basis_[i]) = t_(i, rhs());
    }
    return x;
  }

private:
  void drop_row(Eigen::Index r) {
    Eigen::MatrixXd next(t_.rows() - 1, t_.cols());
    next.topRows(r) = t_.topRows(r);
    next.bottomRows(t_.rows() - 1 - r) = t_.bottomRows(t_.rows() - 1 - r);
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
    --m_;
  }

  Eigen::Index m_;
  Eigen::Index nvar_;
  Eigen::Index nart_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& c, double tol) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw InvalidInput("linear program dimensions are inconsistent");
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw InvalidInput("linear program has non-finite data");
  }
  const Eigen::Index m = a.rows();
  const Eigen::Index nvar = a.cols();

  LpResult result;
  Tableau tab(a, b);

  // Phase 1: maximize -sum(artificials).
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(nvar + m);
  phase1.tail(m).setConstant(-1.0);
  tab.set_objective(phase1);
  tab.optimize(true, tol, result.pivots);
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (tab.objective_value() < -tol * scale * 1e2) {
    result.status = LpStatus::infeasible;
    return result;
  }
  tab.expel_artificials(tol);

  // Phase 2 on the original objective; artificial columns never re-enter.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(nvar + m);
  phase2.head(nvar) = c;
  tab.set_objective(phase2);
  if (!tab.optimize(false, tol, result.pivots)) {
    result.status = LpStatus::unbounded;
    return result;
  }
  result.status = LpStatus::optimal;
  result.x = tab.structural_solution();
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace acprobit
