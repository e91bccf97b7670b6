#include "acprobit/probit_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>

#include "acprobit/errors.hpp"
#include "acprobit/simplex.hpp"
#include "acprobit/truncnorm.hpp"

namespace acprobit {

// ---------------------------------------------------------------- Dataset

Dataset::Dataset(Eigen::MatrixXd x, std::vector<int> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw InvalidInput("dataset needs n >= 1 and p >= 1");
  }
  if (static_cast<Eigen::Index>(y_.size()) != x_.rows()) {
    std::ostringstream os;
    os << "response length " << y_.size() << " does not match " << x_.rows() << " rows";
    throw InvalidInput(os.str());
  }
  if (!x_.allFinite()) {
    throw InvalidInput("design matrix has non-finite entries");
  }
  for (int v : y_) {
    if (v != 0 && v != 1) throw InvalidInput("responses must be 0 or 1");
  }
}

int Dataset::successes() const { return std::accumulate(y_.begin(), y_.end(), 0); }

Eigen::VectorXd Dataset::response_signs() const {
  Eigen::VectorXd s(n());
  for (Eigen::Index i = 0; i < n(); ++i) s(i) = y_[i] == 1 ? 1.0 : -1.0;
  return s;
}

Eigen::MatrixXd Dataset::x_star() const { return (-response_signs()).asDiagonal() * x_; }

// ---------------------------------------------------------------- GaussianPrior

GaussianPrior::GaussianPrior(SymMatrix precision, Eigen::VectorXd mean)
    : q_(std::move(precision)), v_(std::move(mean)), pd_(false) {
  if (v_.size() != q_.dim()) {
    throw InvalidInput("prior mean and precision dimensions differ");
  }
  if (!v_.allFinite()) throw InvalidInput("prior mean has non-finite entries");
  const auto ext = eig_extremes(q_);
  if (ext.lambda_min < -kPsdRelTol * std::max(ext.lambda_max, 0.0) || ext.lambda_max < 0.0) {
    std::ostringstream os;
    os << "prior precision is not positive semidefinite (lambda_min = " << ext.lambda_min << ")";
    throw NotPositiveSemidefinite(os.str(), ext.lambda_min);
  }
  pd_ = ext.lambda_min > kPsdRelTol * ext.lambda_max && ext.lambda_min > 0.0;
}

GaussianPrior GaussianPrior::flat(Eigen::Index p) {
  return GaussianPrior(SymMatrix::zero(p), Eigen::VectorXd::Zero(p));
}

GaussianPrior GaussianPrior::scaled_identity(Eigen::Index p, double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidInput("scaled identity needs q >= 0");
  return GaussianPrior(q * SymMatrix::identity(p), Eigen::VectorXd::Zero(p));
}

bool GaussianPrior::is_flat() const { return q_.matrix().isZero(0.0); }

// ---------------------------------------------------------------- propriety

Eigen::Index numerical_rank(const Eigen::MatrixXd& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol =
      1e-10 * sv(0) * static_cast<double>(std::max(x.rows(), x.cols()));
  return (sv.array() > tol).count();
}

ProprietyReport check_propriety(const Dataset& data, const GaussianPrior& prior) {
  if (prior.dim() != data.p()) throw InvalidInput("prior dimension does not match p");
  ProprietyReport report;
  report.c1_full_column_rank = numerical_rank(data.x()) == data.p();

  // maximize t  s.t.  X_*^T a = 0, sum(a) = n, a_i >= t.
  // With a = s + t 1, s >= 0 and t = t+ - t-, the program is in standard form.
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const Eigen::MatrixXd xs = data.x_star();
  const Eigen::VectorXd col_sums = xs.colwise().sum().transpose();
  Eigen::MatrixXd a(p + 1, n + 2);
  a.topLeftCorner(p, n) = xs.transpose();
  a.block(0, n, p, 1) = col_sums;
  a.block(0, n + 1, p, 1) = -col_sums;
  a.row(p).head(n).setOnes();
  a(p, n) = static_cast<double>(n);
  a(p, n + 1) = -static_cast<double>(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
  b(p) = static_cast<double>(n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 2);
  c(n) = 1.0;
  c(n + 1) = -1.0;

  const LpResult lp = solve_lp_max(a, b, c);
  if (lp.status == LpStatus::optimal) {
    const double t = lp.x(n) - lp.x(n + 1);
    report.c2_margin = t;
    if (t > 1e-9) {
      Eigen::VectorXd cert = lp.x.head(n).array() + t;
      report.c2_feasible = true;
      report.c2_certificate = std::move(cert);
    }
  }
  report.proper =
      prior.is_positive_definite() || (report.c1_full_column_rank && report.c2_feasible);
  return report;
}

// ---------------------------------------------------------------- log posterior

double log_posterior(const Dataset& data, const GaussianPrior& prior, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = data.response_signs().cwiseProduct(data.x() * beta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += log_norm_cdf(eta(i));
  const Eigen::VectorXd d = beta - prior.mean();
  return ll - 0.5 * d.dot(prior.precision().matrix() * d);
}

Eigen::VectorXd log_posterior_gradient(const Dataset& data, const GaussianPrior& prior,
                                       const Eigen::VectorXd& beta) {
  const Eigen::VectorXd s = data.response_signs();
  const Eigen::VectorXd eta = s.cwiseProduct(data.x() * beta);
  Eigen::VectorXd score(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) score(i) = s(i) * inverse_mills(eta(i));
  return data.x().transpose() * score - prior.precision().matrix() * (beta - prior.mean());
}

namespace {

Eigen::VectorXd g_weights(const Dataset& data, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = data.response_signs().cwiseProduct(data.x() * beta);
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) w(i) = g(eta(i));
  return w;
}

// Q + X^T G X, the negative Hessian.
Eigen::MatrixXd information(const Dataset& data, const GaussianPrior& prior,
                            const Eigen::VectorXd& beta) {
  const Eigen::VectorXd w = g_weights(data, beta);
  Eigen::MatrixXd info = prior.precision().matrix();
  info.noalias() += data.x().transpose() * w.asDiagonal() * data.x();
  return info;
}

}  // namespace

SymMatrix log_posterior_hessian(const Dataset& data, const GaussianPrior& prior,
                                const Eigen::VectorXd& beta) {
  return SymMatrix(-information(data, prior, beta));
}

ModeResult posterior_mode(const Dataset& data, const GaussianPrior& prior,
                          const NewtonOptions& options) {
  if (prior.dim() != data.p()) throw InvalidInput("prior dimension does not match p");
  if (!prior.is_positive_definite()) {
    const auto report = check_propriety(data, prior);
    if (!report.proper) {
      throw ImproperPosterior(
          "posterior is improper under this prior: X lacks full column rank or no "
          "positive combination of the sign-flipped rows vanishes");
    }
  }

  const double tol = options.grad_tol_scale * std::sqrt(static_cast<double>(data.n()));
  ModeResult res;
  res.mode = Eigen::VectorXd::Zero(data.p());
  double f = log_posterior(data, prior, res.mode);

  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd grad = log_posterior_gradient(data, prior, res.mode);
    res.grad_norm = grad.norm();
    res.iterations = it;
    if (res.grad_norm <= tol) return res;
    if (it == options.max_iterations) break;

    Eigen::MatrixXd info = information(data, prior, res.mode);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      // Far from the mode the g weights of well-fitted rows can underflow.
      const double ridge = 1e-10 * (1.0 + info.diagonal().cwiseAbs().maxCoeff());
      info.diagonal().array() += ridge;
      llt.compute(info);
    }
    const Eigen::VectorXd step = llt.solve(grad);

    const double slack = 1e-13 * (1.0 + std::fabs(f));
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h, scale *= 0.5) {
      const Eigen::VectorXd trial = res.mode + scale * step;
      const double ft = log_posterior(data, prior, trial);
      if (std::isfinite(ft) && ft >= f - slack) {
        res.mode = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  std::ostringstream os;
  os << "Newton iteration did not reach ||grad|| <= " << tol << " (last ||grad|| = "
     << res.grad_norm << " after " << res.iterations << " iterations)";
  throw NonConvergence(os.str(), res.mode, res.grad_norm);
}

// ---------------------------------------------------------------- PosteriorModel

PosteriorModel::PosteriorModel(Dataset data, GaussianPrior prior)
    : data_(std::move(data)),
      prior_(std::move(prior)),
      sigma_(SymMatrix::identity(1)),
      sigma_sqrt_(SymMatrix::identity(1)),
      sigma_inv_sqrt_(SymMatrix::identity(1)) {}

PosteriorModel PosteriorModel::build(Dataset data, GaussianPrior prior,
                                     const NewtonOptions& options) {
  if (prior.dim() != data.p()) throw InvalidInput("prior dimension does not match p");
  PosteriorModel m(std::move(data), std::move(prior));

  Eigen::MatrixXd sigma = m.prior_.precision().matrix();
  sigma.noalias() += m.data_.x().transpose() * m.data_.x();
  m.sigma_ = SymMatrix(sigma);
  // Throws NotPositiveDefinite when X^T X + Q is singular.
  auto roots = sym_sqrt_pair(m.sigma_);
  m.sigma_sqrt_ = std::move(roots.sqrt);
  m.sigma_inv_sqrt_ = std::move(roots.inv_sqrt);
  m.sigma_llt_.compute(m.sigma_.matrix());
  if (m.sigma_llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("Sigma = X^T X + Q failed to factor", 0.0);
  }
  const Eigen::Index p = m.p();
  const SymMatrix sigma_inv(m.sigma_llt_.solve(Eigen::MatrixXd::Identity(p, p)));
  Eigen::LLT<Eigen::MatrixXd> inv_llt(sigma_inv.matrix());
  if (inv_llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("Sigma^{-1} failed to factor", 0.0);
  }
  m.sigma_inv_chol_ = inv_llt.matrixL();
  m.prior_shift_ = m.prior_.precision().matrix() * m.prior_.mean();

  auto mode = posterior_mode(m.data_, m.prior_, options);
  m.mode_ = std::move(mode.mode);
  m.mode_grad_norm_ = mode.grad_norm;
  m.mode_iterations_ = mode.iterations;
  return m;
}

Eigen::VectorXd PosteriorModel::latent_to_beta_mean(const Eigen::VectorXd& z) const {
  return solve(data_.x().transpose() * z + prior_shift_);
}

SymMatrix PosteriorModel::hat_matrix() const {
  const Eigen::MatrixXd sx = sigma_llt_.solve(data_.x().transpose());
  return SymMatrix(data_.x() * sx);
}

// ---------------------------------------------------------------- varphi, D

Eigen::VectorXd varphi(const PosteriorModel& model, const Eigen::VectorXd& beta) {
  if (beta.size() != model.p()) throw InvalidInput("beta has the wrong dimension");
  const Eigen::VectorXd theta = model.data().x() * beta;
  const auto& y = model.data().y();
  Eigen::VectorXd out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    out(i) = tn_mean(theta(i), side_from_response(y[i]));
  }
  return out;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> d_matrix(const PosteriorModel& model,
                                                       const Eigen::VectorXd& beta) {
  if (beta.size() != model.p()) throw InvalidInput("beta has the wrong dimension");
  const Eigen::VectorXd theta = model.data().x() * beta;
  const auto& y = model.data().y();
  Eigen::VectorXd diag(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    diag(i) = tn_var(theta(i), side_from_response(y[i]));
  }
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(diag);
}

double fixed_point_residual_at(const PosteriorModel& model, const Eigen::VectorXd& beta) {
  return (model.latent_to_beta_mean(varphi(model, beta)) - beta).norm();
}

double fixed_point_residual(const PosteriorModel& model) {
  return fixed_point_residual_at(model, model.mode());
}

}  // namespace acprobit
