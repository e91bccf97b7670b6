#include "acprobit/certify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "acprobit/errors.hpp"
#include "acprobit/rng.hpp"
#include "acprobit/symmat.hpp"
#include "acprobit/truncnorm.hpp"

namespace acprobit {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string to_string(DriftVariant v) {
  return v == DriftVariant::v1_flipped ? "V1_flipped" : "V2_flipped";
}

DriftVariant drift_variant_from_string(const std::string& s) {
  const std::string t = lower(s);
  if (t == "v1" || t == "v1_flipped") return DriftVariant::v1_flipped;
  if (t == "v2" || t == "v2_flipped") return DriftVariant::v2_flipped;
  throw InvalidInput("unknown drift variant '" + s + "' (expected v1 or v2)");
}

double DriftMinParams::epsilon() const { return std::exp(log_epsilon); }

double drift_threshold(double lambda, double L) { return 2.0 * L / (1.0 - lambda); }

DriftMinParams make_dm_params_at(DriftVariant variant, double lambda, Eigen::Index n,
                                 Eigen::Index p, double d) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "drift coefficient must lie in [0, 1), got " << lambda;
    throw InvalidInput(os.str());
  }
  const Eigen::Index k = variant == DriftVariant::v1_flipped ? p : n;
  if (k < 1) throw InvalidInput("dimension must be positive");
  DriftMinParams out;
  out.variant = variant;
  out.lambda = lambda;
  out.L = static_cast<double>(k) * (1.0 + lambda);
  const double thr = drift_threshold(lambda, out.L);
  if (!(d > thr) || !std::isfinite(d)) {
    std::ostringstream os;
    os << "d = " << d << " must exceed 2L/(1-lambda) = " << thr;
    throw InvalidInput(os.str());
  }
  out.d = d;
  out.log_epsilon = -0.5 * static_cast<double>(k) * std::numbers::ln2 - d;
  return out;
}

DriftMinParams make_dm_params(DriftVariant variant, double lambda, Eigen::Index n, Eigen::Index p,
                              double d_multiplier) {
  if (!(d_multiplier > 1.0)) throw InvalidInput("d_multiplier must exceed 1");
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "drift coefficient must lie in [0, 1), got " << lambda;
    throw InvalidInput(os.str());
  }
  const Eigen::Index k = variant == DriftVariant::v1_flipped ? p : n;
  const double L = static_cast<double>(k) * (1.0 + lambda);
  return make_dm_params_at(variant, lambda, n, p, d_multiplier * drift_threshold(lambda, L));
}

namespace {

// -log(1 - eps) in log form.
double log_coupling_gap(double log_epsilon) {
  if (log_epsilon >= 0.0) return std::numeric_limits<double>::infinity();
  if (log_epsilon > -30.0) return std::log(-std::log1p(-std::exp(log_epsilon)));
  return log_epsilon;  // -log(1 - eps) = eps (1 + eps/2 + ...), eps < 1e-13
}

// -log a and log b for a = (1+2L+lambda d)/(1+d), b = 1 + 2(lambda d + L).
struct DriftLogs {
  double neg_log_a;
  double log_b;
};

DriftLogs drift_logs(const DriftMinParams& p) {
  const double slack = ((1.0 - p.lambda) * p.d - 2.0 * p.L) / (1.0 + p.d);
  return {-std::log1p(-slack), std::log1p(2.0 * (p.lambda * p.d + p.L))};
}

// Second-branch gap (1-r)A - rB, or -inf when it does not clear rounding noise.
double drift_branch_gap(const DriftLogs& g, double r) {
  const double a_term = (1.0 - r) * g.neg_log_a;
  const double b_term = r * g.log_b;
  const double gap = a_term - b_term;
  const double floor = 64.0 * kEps * (std::fabs(a_term) + std::fabs(b_term));
  return gap > floor ? gap : kNegInf;
}

}  // namespace

double rosenthal_rho(const DriftMinParams& params, double r) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("r must lie in (0, 1)");
  const double eps = params.epsilon();
  const double first = eps >= 1.0 ? 0.0 : std::exp(r * std::log1p(-eps));
  const double a = (1.0 + 2.0 * params.L + params.lambda * params.d) / (1.0 + params.d);
  const double b = 1.0 + 2.0 * (params.lambda * params.d + params.L);
  const double second = std::exp((1.0 - r) * std::log(a) + r * std::log(b));
  return std::max(first, second);
}

double log_rate_gap(const DriftMinParams& params, double r) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidInput("r must lie in (0, 1)");
  const double g1 = std::log(r) + log_coupling_gap(params.log_epsilon);
  const double g2 = drift_branch_gap(drift_logs(params), r);
  if (g2 == kNegInf) return kNegInf;
  return std::min(g1, std::log(g2));
}

namespace {

// For fixed d the two branches are linear in r, one increasing and one
// decreasing, so the best r is where they cross. When epsilon is tiny the
// crossing sits inside rounding noise of the second branch; r is then pulled
// back until that branch is resolvable.
struct ProfilePoint {
  double r;
  double log_gap;
};

ProfilePoint profile_at(const DriftMinParams& params) {
  const DriftLogs g = drift_logs(params);
  if (!(g.neg_log_a > 0.0)) return {0.5, kNegInf};
  const double log_e1 = log_coupling_gap(params.log_epsilon);
  const double e1 = std::exp(log_e1);
  double r = g.neg_log_a / (g.neg_log_a + g.log_b + e1);
  double margin = 128.0 * kEps;
  for (int k = 0; k < 40 && drift_branch_gap(g, r) == kNegInf; ++k, margin *= 2.0) {
    r = (g.neg_log_a - margin * (g.neg_log_a + g.log_b)) / (g.neg_log_a + g.log_b);
  }
  if (!(r > 0.0 && r < 1.0)) return {0.5, kNegInf};
  return {r, log_rate_gap(params, r)};
}

}  // namespace

RateOptimum optimize_rate(DriftVariant variant, double lambda, Eigen::Index n, Eigen::Index p) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    std::ostringstream os;
    os << "no certificate: drift coefficient " << lambda << " is not below 1";
    throw CertificationFailure(os.str(), lambda);
  }
  const Eigen::Index k = variant == DriftVariant::v1_flipped ? p : n;
  const double thr = drift_threshold(lambda, static_cast<double>(k) * (1.0 + lambda));

  // Search over x = log(d/thr - 1).
  const double x_lo = std::log(1e-6);
  const double x_hi = std::log(1e4 - 1.0);
  auto eval = [&](double x) {
    const auto params = make_dm_params_at(variant, lambda, n, p, thr * (1.0 + std::exp(x)));
    return std::make_pair(params, profile_at(params));
  };

  constexpr int kGrid = 64;
  int best = 0;
  double best_val = kNegInf;
  for (int i = 0; i < kGrid; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (kGrid - 1);
    const double v = eval(x).second.log_gap;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best_val == kNegInf) {
    throw CertificationFailure("no certificate: rho_hat >= 1 for every (d, r) searched", 1.0);
  }

  const double step = (x_hi - x_lo) / (kGrid - 1);
  double a = x_lo + step * std::max(best - 1, 0);
  double b = x_lo + step * std::min(best + 1, kGrid - 1);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = eval(c).second.log_gap, fd = eval(d).second.log_gap;
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (fc >= fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a);
      fc = eval(c).second.log_gap;
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a);
      fd = eval(d).second.log_gap;
    }
  }

  double x_best = x_lo + step * best;
  const double x_gs = fc >= fd ? c : d;
  if (std::max(fc, fd) > best_val) x_best = x_gs;
  const auto [params, prof] = eval(x_best);
  return {params, prof.r, prof.log_gap};
}

namespace {

constexpr double kExactLimit = 9007199254740992.0;  // 2^53

void fill_burn_in(ConvergenceCertificate& cert) {
  const double log_ratio = std::log(cert.H_beta0 / cert.tv_tolerance);
  if (log_ratio <= 0.0) {
    cert.m_star = 1;
    cert.log10_m_star = 0.0;
    return;
  }
  const double gap = std::exp(cert.log_rate_gap);
  const double log10_steps = (std::log(log_ratio) - cert.log_rate_gap) / std::numbers::ln10;
  if (gap > 0.0 && log10_steps < 15.0) {
    auto m = static_cast<std::int64_t>(std::ceil(log_ratio / gap)) + 1;
    while (static_cast<double>(m - 1) * gap < log_ratio) ++m;
    while (m >= 2 && static_cast<double>(m - 2) * gap >= log_ratio) --m;
    cert.m_star = m;
    cert.log10_m_star = std::log10(static_cast<double>(m));
    if (static_cast<double>(m) < kExactLimit) return;
  }
  cert.m_star.reset();
  cert.log10_m_star = log10_steps;  // m* - 1 = ceil(10^log10_steps); the +1 is invisible here
}

}  // namespace

ConvergenceCertificate make_certificate(const RateOptimum& opt, std::string lambda_source,
                                        double h_beta0, double tv_tolerance) {
  if (!(tv_tolerance > 0.0 && tv_tolerance < 1.0)) {
    throw InvalidInput("TV tolerance must lie in (0, 1)");
  }
  if (!(h_beta0 > 0.0) || !std::isfinite(h_beta0)) throw InvalidInput("H(beta0) must be positive");
  if (opt.log_rate_gap == kNegInf) throw CertificationFailure("rate bound is vacuous", 1.0);
  ConvergenceCertificate cert;
  cert.params = opt.params;
  cert.lambda_source = std::move(lambda_source);
  cert.r = opt.r;
  cert.log_rate_gap = opt.log_rate_gap;
  cert.rho_hat = std::exp(-std::exp(opt.log_rate_gap));
  cert.H_beta0 = h_beta0;
  cert.tv_tolerance = tv_tolerance;
  fill_burn_in(cert);
  return cert;
}

CertificateCheck verify_certificate(const ConvergenceCertificate& cert) {
  CertificateCheck out;
  std::ostringstream why;
  const auto& p = cert.params;
  out.threshold_ok = p.d > drift_threshold(p.lambda, p.L) && p.lambda >= 0.0 && p.lambda < 1.0;
  if (!out.threshold_ok) why << "d does not exceed 2L/(1-lambda); ";

  const double rho = rosenthal_rho(p, cert.r);
  out.rho_formula_error = std::fabs(rho - cert.rho_hat);
  const double g = log_rate_gap(p, cert.r);
  out.gap_rel_error = g == cert.log_rate_gap
                          ? 0.0
                          : std::fabs(std::exp(g - cert.log_rate_gap) - 1.0);
  if (out.rho_formula_error > 1e-12) why << "rho_hat does not match the formula; ";
  if (!(out.gap_rel_error <= 1e-12)) why << "stored rate gap does not match; ";
  if (g == kNegInf) why << "rate bound is vacuous; ";

  // H rho^{m-1} <= tol  <=>  (m-1) gap >= log(H/tol).
  const double log_ratio = std::log(cert.H_beta0 / cert.tv_tolerance);
  const double log_gap = cert.log_rate_gap;
  if (cert.m_star) {
    const double m = static_cast<double>(*cert.m_star);
    const double gap = std::exp(log_gap);
    const bool upper = log_ratio <= 0.0 || (m - 1.0) * gap >= log_ratio;
    const bool lower = m < 2.0 || (m - 2.0) * gap < log_ratio;
    out.bracket_ok = *cert.m_star >= 1 && upper && lower;
  } else {
    // m* - 1 = ceil(k) with k = log_ratio/gap, so log10(m* - 1) lies in [log10 k, log10(k + 1)].
    const double log10_k = (std::log(log_ratio) - log_gap) / std::numbers::ln10;
    out.bracket_ok = log_ratio > 0.0 && std::isfinite(cert.log10_m_star) &&
                     std::fabs(cert.log10_m_star - log10_k) <= 1e-9 * std::max(1.0, log10_k);
  }
  if (!out.bracket_ok) why << "m* does not bracket the tolerance; ";
  out.ok = out.threshold_ok && out.rho_formula_error <= 1e-12 && out.gap_rel_error <= 1e-12 &&
           g != kNegInf && out.bracket_ok;
  out.detail = why.str();
  return out;
}

// ---------------------------------------------------------------- drift coefficients

OrthantBound lambda_v1_orthant_bound(const PosteriorModel& model, int p_max) {
  const Eigen::Index p = model.p();
  if (p > p_max) {
    std::ostringstream os;
    os << "orthant bound needs 2^" << p << " scans; p exceeds the cap " << p_max;
    throw CombinatorialBlowup(os.str());
  }
  const Eigen::MatrixXd& x = model.data().x();
  const auto& y = model.data().y();
  const SymMatrix& s = model.sigma_inv_sqrt();
  const double top =
      eig_extremes(congruence(s, SymMatrix(x.transpose() * x))).lambda_max;

  // Row i feeds W(S_j) for the orthant j holding X_i when Y_i = 0 and for the
  // opposite orthant when Y_i = 1.
  const std::size_t orthants = std::size_t{1} << p;
  const std::size_t full = orthants - 1;
  std::vector<std::vector<Eigen::Index>> members(orthants);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t code = 0;
    bool open = true;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (x(i, k) > 0.0) {
        code |= std::size_t{1} << k;
      } else if (x(i, k) == 0.0) {
        open = false;
        break;
      }
    }
    if (!open) continue;
    members[y[i] == 0 ? code : (full & ~code)].push_back(i);
  }

  double min_low = std::numeric_limits<double>::infinity();
  for (const auto& rows : members) {
    // Fewer than p rows: W(S_j) is singular and the minimum is already zero.
    if (static_cast<Eigen::Index>(rows.size()) < p) {
      min_low = 0.0;
      break;
    }
  }
  if (min_low > 0.0) {
    for (const auto& rows : members) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
      for (Eigen::Index i : rows) w.noalias() += x.row(i).transpose() * x.row(i);
      min_low = std::min(min_low, eig_extremes(congruence(s, SymMatrix(w))).lambda_min);
    }
    min_low = std::max(min_low, 0.0);
  }
  const double root = std::max(top - kTwoOverPi * min_low, 0.0);
  OrthantBound out;
  out.lambda = root * root;
  out.certifying = out.lambda < 1.0;
  return out;
}

double lambda_v1_pdQ_bound(const PosteriorModel& model) {
  if (!model.prior().is_positive_definite()) {
    throw NotPositiveDefinite("the prior-precision bound needs Q positive definite",
                              eig_extremes(model.prior().precision()).lambda_min);
  }
  const Eigen::Index p = model.p();
  const SymMatrix shrink = congruence(model.sigma_inv_sqrt(), model.prior().precision());
  const double top = eig_extremes(SymMatrix::identity(p) - shrink).lambda_max;
  const double clamped = std::clamp(top, 0.0, 1.0);
  return clamped * clamped;
}

LambdaResult lambda_v1(const PosteriorModel& model, const CertifyOptions& options) {
  LambdaResult best;
  best.lambda = std::numeric_limits<double>::infinity();
  std::optional<CombinatorialBlowup> blowup;
  try {
    const auto ob = lambda_v1_orthant_bound(model, options.p_max);
    best = {ob.lambda, "orthant"};
  } catch (const CombinatorialBlowup& e) {
    blowup = e;
  }
  if (model.prior().is_positive_definite()) {
    const double pd = lambda_v1_pdQ_bound(model);
    if (pd < best.lambda) best = {pd, "pd_q"};
  }
  if (!(best.lambda < 1.0)) {
    if (blowup && !std::isfinite(best.lambda)) throw *blowup;
    std::ostringstream os;
    os << "no certified drift coefficient below 1 for the V1 chain (best bound " << best.lambda
       << ")";
    throw CertificationFailure(os.str(), best.lambda);
  }
  return best;
}

LambdaHeuristic lambda_v1_heuristic(const PosteriorModel& model, std::uint64_t seed, int starts,
                                    int iterations) {
  const Eigen::MatrixXd& x = model.data().x();
  const Eigen::Index p = model.p();
  const Eigen::MatrixXd& s = model.sigma_inv_sqrt().matrix();
  const Eigen::MatrixXd& sigma = model.sigma().matrix();
  LambdaHeuristic out;

  auto ratio = [&](const Eigen::VectorXd& alpha, double t) {
    ++out.evaluations;
    const Eigen::VectorXd dvec = d_matrix(model, model.mode() + t * alpha).diagonal();
    const Eigen::VectorXd v = s * (x.transpose() * (dvec.asDiagonal() * (x * alpha)));
    const double den = alpha.dot(sigma * alpha);
    return den > 0.0 ? v.squaredNorm() / den : 0.0;
  };
  auto best_t = [&](const Eigen::VectorXd& alpha) {
    double v = 0.0;
    for (int k = 1; k < 20; ++k) v = std::max(v, ratio(alpha, k / 20.0));
    return v;
  };

  // alpha -> 0 limit: lambda_max^2 of S X^T D(mode) X S.
  {
    const Eigen::VectorXd dvec = d_matrix(model, model.mode()).diagonal();
    const SymMatrix m(s * x.transpose() * dvec.asDiagonal() * x * s);
    const double top = eig_extremes(m).lambda_max;
    out.estimate = top * top;
  }

  Rng rng(seed);
  for (int k = 0; k < starts; ++k) {
    Eigen::VectorXd u(p);
    for (Eigen::Index j = 0; j < p; ++j) u(j) = rng.normal();
    const double scale = std::exp(std::log(1e-2) + rng.uniform() * std::log(1e5));
    Eigen::VectorXd alpha = s * u.normalized() * scale;
    double val = best_t(alpha);
    double step = 0.5;
    for (int it = 0; it < iterations; ++it) {
      Eigen::VectorXd trial = alpha;
      for (Eigen::Index j = 0; j < p; ++j) trial(j) += step * alpha.norm() * rng.normal() / std::sqrt(p);
      if (rng.uniform() < 0.2) trial *= std::exp(rng.normal());
      const double tv = best_t(trial);
      if (tv > val) {
        val = tv;
        alpha = trial;
      } else {
        step *= 0.9;
      }
    }
    out.estimate = std::max(out.estimate, val);
  }
  return out;
}

namespace {

void require_full_row_rank(const PosteriorModel& model) {
  const Eigen::Index rank = numerical_rank(model.data().x());
  if (rank < model.n()) {
    std::ostringstream os;
    os << "X must have full row rank for the V2 chain (rank " << rank << " < n = " << model.n()
       << ")";
    throw RankDeficiency(os.str());
  }
}

// (X Sigma^{-1} X^T) factored; throws RankDeficiency when it is singular.
Eigen::LLT<Eigen::MatrixXd> hat_llt(const PosteriorModel& model) {
  require_full_row_rank(model);
  Eigen::LLT<Eigen::MatrixXd> llt(model.hat_matrix().matrix());
  if (llt.info() != Eigen::Success) throw RankDeficiency("X Sigma^{-1} X^T is singular");
  return llt;
}

Eigen::VectorXd centred_mean(const PosteriorModel& model, const Eigen::VectorXd& z) {
  return model.latent_to_beta_mean(z) - model.mode();
}

}  // namespace

double lambda_v2(const PosteriorModel& model) {
  require_full_row_rank(model);
  const double top = eig_extremes(model.hat_matrix()).lambda_max;
  return top * top;
}

double hat_trace(const PosteriorModel& model) {
  // tr(X Sigma^{-1} X^T) = ||X L||_F^2 with L L^T = Sigma^{-1}.
  return (model.data().x() * model.sigma_inv_chol().triangularView<Eigen::Lower>())
      .squaredNorm();
}

double v1_drift_value(const Eigen::VectorXd& gamma) { return gamma.squaredNorm(); }

double v2_drift_value(const PosteriorModel& model, const Eigen::VectorXd& z) {
  const auto llt = hat_llt(model);
  const Eigen::VectorXd w = model.data().x() * centred_mean(model, z);
  return w.dot(llt.solve(w));
}

double h_beta_v1(const PosteriorModel& model, const Eigen::VectorXd& beta,
                 const DriftMinParams& params) {
  if (params.variant != DriftVariant::v1_flipped) throw InvalidInput("expected V1 parameters");
  const Eigen::VectorXd u = centred_mean(model, varphi(model, beta));
  return 2.0 + params.L / (1.0 - params.lambda) + hat_trace(model) +
         u.dot(model.sigma().matrix() * u);
}

double h_beta_v2(const PosteriorModel& model, const Eigen::VectorXd& beta,
                 const DriftMinParams& params) {
  if (params.variant != DriftVariant::v2_flipped) throw InvalidInput("expected V2 parameters");
  const auto llt = hat_llt(model);
  const Eigen::VectorXd w = model.data().x() * centred_mean(model, varphi(model, beta));
  return 2.0 + params.L / (1.0 - params.lambda) + hat_trace(model) + w.dot(llt.solve(w));
}

ConvergenceCertificate optimize_certificate(const PosteriorModel& model, DriftVariant variant,
                                            double tv_tolerance, const Eigen::VectorXd& beta0,
                                            const CertifyOptions& options) {
  if (beta0.size() != model.p()) throw InvalidInput("beta0 has the wrong dimension");
  if (variant == DriftVariant::v1_flipped) {
    const LambdaResult lam = lambda_v1(model, options);
    const RateOptimum opt = optimize_rate(variant, lam.lambda, model.n(), model.p());
    return make_certificate(opt, lam.source, h_beta_v1(model, beta0, opt.params), tv_tolerance);
  }
  const double lam = lambda_v2(model);
  if (!(lam < 1.0)) {
    std::ostringstream os;
    os << "no certificate for the V2 chain: lambda_max^2(X Sigma^{-1} X^T) = " << lam;
    throw CertificationFailure(os.str(), lam);
  }
  const RateOptimum opt = optimize_rate(variant, lam, model.n(), model.p());
  return make_certificate(opt, "hat_matrix", h_beta_v2(model, beta0, opt.params), tv_tolerance);
}

double intercept_only_lambda(long n, long successes, double q) {
  if (n < 1) throw InvalidInput("n must be positive");
  if (successes <= 0 || successes >= n) {
    throw InvalidInput("intercept-only model needs 0 < successes < n");
  }
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidInput("q must be nonnegative");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double shrink = nn / (nn + q);
  const double root = shrink - kTwoOverPi * shrink * std::min(phat, 1.0 - phat);
  return root * root;
}

ConvergenceCertificate intercept_only_certificate(long n, long successes, double q,
                                                  double tv_tolerance) {
  const double lam = intercept_only_lambda(n, successes, q);
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  std::fill(y.begin(), y.begin() + successes, 1);
  Dataset data(Eigen::MatrixXd::Ones(n, 1), std::move(y));
  auto prior = GaussianPrior::scaled_identity(1, q);
  const auto model = PosteriorModel::build(std::move(data), std::move(prior));
  const RateOptimum opt = optimize_rate(DriftVariant::v1_flipped, lam, model.n(), model.p());
  return make_certificate(opt, "intercept_only_closed_form",
                          h_beta_v1(model, Eigen::VectorXd::Zero(1), opt.params), tv_tolerance);
}

// ---------------------------------------------------------------- instability, n = 1, p = 1

InstabilityRow instability_row(const Dataset& data, const Eigen::VectorXd& gamma) {
  if (gamma.size() != data.p()) throw InvalidInput("gamma has the wrong dimension");
  if (gamma.isZero(0.0)) throw InvalidInput("gamma must be nonzero");
  const Eigen::MatrixXd& x = data.x();
  Eigen::LLT<Eigen::MatrixXd> xtx(x.transpose() * x);
  if (xtx.info() != Eigen::Success || numerical_rank(x) < data.p()) {
    throw RankDeficiency("X^T X is singular; the flat-prior diagnostic needs full column rank");
  }
  const Eigen::VectorXd theta = x * gamma;
  Eigen::VectorXd diff(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const TruncSide side = side_from_response(data.y()[i]);
    diff(i) = tn_mean(theta(i), side) - tn_mean(-theta(i), side);
  }
  const Eigen::VectorXd shift = xtx.solve(x.transpose() * diff);
  const double tr = xtx.solve(Eigen::MatrixXd::Identity(data.p(), data.p())).trace();

  InstabilityRow row;
  row.n = data.n();
  row.delta = shift.squaredNorm();
  row.trace_term = 2.0 * tr;
  if (!(row.delta > 0.0)) {
    throw Inconclusive("delta is zero: the one-step means from +gamma and -gamma coincide");
  }
  row.overlap_upper_bound = std::min(1.0, 4.0 * tr / (row.delta / 5.0));
  return row;
}

std::vector<InstabilityRow> instability_diagnostic(const std::vector<Dataset>& datasets,
                                                   const Eigen::VectorXd& gamma) {
  std::vector<InstabilityRow> rows;
  rows.reserve(datasets.size());
  for (const auto& d : datasets) rows.push_back(instability_row(d, gamma));
  return rows;
}

double rate_lower_bound_n1(double psi) {
  if (!(psi > 0.0 && psi < 1.0)) throw InvalidInput("psi must lie in (0, 1)");
  return std::max(0.0, 1.0 - (1.0 - psi) / (1.0 - kTwoOverPi));
}

double exact_overlap_p1(double d) {
  if (!(d >= 0.0)) throw InvalidInput("d must be nonnegative");
  return 2.0 * norm_cdf(-std::sqrt(d));
}

}  // namespace acprobit
