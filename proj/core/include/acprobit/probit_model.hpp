#pragma once

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "acprobit/symmat.hpp"

namespace acprobit {

/// Design matrix X (n x p) and binary responses Y.
class Dataset {
public:
  /// Throws InvalidInput unless n, p >= 1, X is finite and every y is 0 or 1.
  Dataset(Eigen::MatrixXd x, std::vector<int> y);

  Eigen::Index n() const noexcept { return x_.rows(); }
  Eigen::Index p() const noexcept { return x_.cols(); }
  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const std::vector<int>& y() const noexcept { return y_; }
  int successes() const;

  /// Rows sign-flipped where y = 1: row i is -X_i if y_i = 1 and X_i otherwise.
  Eigen::MatrixXd x_star() const;

  /// +1 for successes, -1 for failures.
  Eigen::VectorXd response_signs() const;

private:
  Eigen::MatrixXd x_;
  std::vector<int> y_;
};

/// Gaussian prior exp{-(b - v)^T Q (b - v) / 2}; Q = 0 is the flat prior.
class GaussianPrior {
public:
  /// Throws InvalidInput on dimension mismatch and NotPositiveSemidefinite if Q
  /// has an eigenvalue below -1e-12 * lambda_max.
  GaussianPrior(SymMatrix precision, Eigen::VectorXd mean);

  static GaussianPrior flat(Eigen::Index p);
  static GaussianPrior scaled_identity(Eigen::Index p, double q);

  Eigen::Index dim() const noexcept { return q_.dim(); }
  const SymMatrix& precision() const noexcept { return q_; }
  const Eigen::VectorXd& mean() const noexcept { return v_; }
  bool is_flat() const;
  bool is_positive_definite() const noexcept { return pd_; }

private:
  SymMatrix q_;
  Eigen::VectorXd v_;
  bool pd_;
};

struct ProprietyReport {
  bool c1_full_column_rank = false;
  bool c2_feasible = false;
  /// Positive a with X_*^T a = 0 and sum(a) = n, present when c2_feasible.
  std::optional<Eigen::VectorXd> c2_certificate;
  /// Optimal min_i a_i of the feasibility program; nullopt if the program is infeasible.
  std::optional<double> c2_margin;
  bool proper = false;
};

/// Full-column-rank test and the positive-combination test on the
/// sign-flipped rows, plus the overall verdict.
ProprietyReport check_propriety(const Dataset& data, const GaussianPrior& prior);

/// Numerical rank of X with singular values below 1e-10 * sigma_max * max(n, p) treated as zero.
Eigen::Index numerical_rank(const Eigen::MatrixXd& x);

struct NewtonOptions {
  int max_iterations = 200;
  /// Convergence when ||grad|| <= grad_tol_scale * sqrt(n).
  double grad_tol_scale = 1e-8;
};

struct ModeResult {
  Eigen::VectorXd mode;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// Unnormalized log posterior sum_i log Phi(s_i X_i^T b) - (b - v)^T Q (b - v)/2.
double log_posterior(const Dataset& data, const GaussianPrior& prior, const Eigen::VectorXd& beta);
Eigen::VectorXd log_posterior_gradient(const Dataset& data, const GaussianPrior& prior,
                                       const Eigen::VectorXd& beta);
SymMatrix log_posterior_hessian(const Dataset& data, const GaussianPrior& prior,
                                const Eigen::VectorXd& beta);

/// Damped Newton ascent on the log-concave posterior. Throws ImproperPosterior
/// when the posterior is improper and NonConvergence when the iteration
/// budget runs out.
ModeResult posterior_mode(const Dataset& data, const GaussianPrior& prior,
                          const NewtonOptions& options = {});

/// Dataset + prior with Sigma = X^T X + Q factored once and the posterior mode.
/// Immutable after construction.
class PosteriorModel {
public:
  static PosteriorModel build(Dataset data, GaussianPrior prior, const NewtonOptions& options = {});

  const Dataset& data() const noexcept { return data_; }
  const GaussianPrior& prior() const noexcept { return prior_; }
  Eigen::Index n() const noexcept { return data_.n(); }
  Eigen::Index p() const noexcept { return data_.p(); }

  const SymMatrix& sigma() const noexcept { return sigma_; }
  const SymMatrix& sigma_sqrt() const noexcept { return sigma_sqrt_; }
  const SymMatrix& sigma_inv_sqrt() const noexcept { return sigma_inv_sqrt_; }
  /// Lower-triangular L with L L^T = Sigma^{-1}.
  const Eigen::MatrixXd& sigma_inv_chol() const noexcept { return sigma_inv_chol_; }
  /// Sigma^{-1} b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return sigma_llt_.solve(b); }
  /// Q v.
  const Eigen::VectorXd& prior_shift() const noexcept { return prior_shift_; }

  const Eigen::VectorXd& mode() const noexcept { return mode_; }
  double mode_grad_norm() const noexcept { return mode_grad_norm_; }
  int mode_iterations() const noexcept { return mode_iterations_; }

  /// Sigma^{-1} (X^T z + Q v).
  Eigen::VectorXd latent_to_beta_mean(const Eigen::VectorXd& z) const;

  /// X Sigma^{-1} X^T (n x n).
  SymMatrix hat_matrix() const;

private:
  PosteriorModel(Dataset data, GaussianPrior prior);

  Dataset data_;
  GaussianPrior prior_;
  SymMatrix sigma_;
  Eigen::LLT<Eigen::MatrixXd> sigma_llt_;
  SymMatrix sigma_sqrt_;
  SymMatrix sigma_inv_sqrt_;
  Eigen::MatrixXd sigma_inv_chol_;
  Eigen::VectorXd prior_shift_;
  Eigen::VectorXd mode_;
  double mode_grad_norm_ = 0.0;
  int mode_iterations_ = 0;
};

/// E(Z | B = beta, Y, X): entry i is tn_mean(X_i^T beta, side of Y_i).
Eigen::VectorXd varphi(const PosteriorModel& model, const Eigen::VectorXd& beta);

/// D(beta) = diag(var(Z_i | B = beta)); every entry lies in (0, 1), though
/// entries far inside the admissible half-line round to 1.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> d_matrix(const PosteriorModel& model,
                                                       const Eigen::VectorXd& beta);

/// || Sigma^{-1}(X^T varphi(beta) + Q v) - beta ||.
double fixed_point_residual_at(const PosteriorModel& model, const Eigen::VectorXd& beta);

/// The residual at the stored mode; zero up to the Newton tolerance.
double fixed_point_residual(const PosteriorModel& model);

}  // namespace acprobit
