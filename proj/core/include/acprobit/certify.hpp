#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acprobit/probit_model.hpp"

namespace acprobit {

enum class DriftVariant { v1_flipped, v2_flipped };

std::string to_string(DriftVariant v);
/// Accepts "v1", "v2", "V1_flipped", "V2_flipped" (case-insensitive).
DriftVariant drift_variant_from_string(const std::string& s);

/// Drift and minorization constants for one flipped chain.
///
/// epsilon is stored as its logarithm: for the large-n chains
/// epsilon = 2^{-p/2} e^{-d} with d in the thousands, far below the smallest
/// double.
struct DriftMinParams {
  DriftVariant variant = DriftVariant::v1_flipped;
  double lambda = 0.0;
  double L = 0.0;
  double d = 0.0;
  double log_epsilon = 0.0;

  /// exp(log_epsilon); 0 once it underflows.
  double epsilon() const;
};

/// 2L/(1 - lambda), the lower limit for d.
double drift_threshold(double lambda, double L);

/// L = p(1 + lambda), epsilon = 2^{-p/2} e^{-d} for V1 (n in place of p for V2),
/// d = d_multiplier * 2L/(1 - lambda). Throws InvalidInput unless
/// 0 <= lambda < 1 and d_multiplier > 1.
DriftMinParams make_dm_params(DriftVariant variant, double lambda, Eigen::Index n, Eigen::Index p,
                              double d_multiplier);

/// Same, with d given directly; requires d > 2L/(1 - lambda).
DriftMinParams make_dm_params_at(DriftVariant variant, double lambda, Eigen::Index n,
                                 Eigen::Index p, double d);

/// max{(1-eps)^r, [(1+2L+lambda d)/(1+d)]^{1-r} [1+2(lambda d+L)]^r}.
double rosenthal_rho(const DriftMinParams& params, double r);

/// log(-log rho_hat) at (params, r), evaluated from log_epsilon so that it stays
/// finite when epsilon underflows. Returns -infinity when the bound is vacuous,
/// including when the second branch is not resolvable from rounding noise.
double log_rate_gap(const DriftMinParams& params, double r);

struct ConvergenceCertificate {
  DriftMinParams params;
  std::string lambda_source;
  double r = 0.0;
  /// exp(-exp(log_rate_gap)); rounds to 1 when the gap is below 1e-16.
  double rho_hat = 1.0;
  double log_rate_gap = 0.0;
  double H_beta0 = 0.0;
  double tv_tolerance = 0.0;
  /// Smallest m >= 1 with H rho_hat^{m-1} <= tv_tolerance, when below 2^53.
  std::optional<std::int64_t> m_star;
  double log10_m_star = 0.0;
};

struct CertificateCheck {
  bool ok = false;
  double rho_formula_error = 0.0;  // |rosenthal_rho(params, r) - rho_hat|
  double gap_rel_error = 0.0;      // relative error of the recomputed log gap
  bool threshold_ok = false;       // d > 2L/(1-lambda)
  bool bracket_ok = false;         // H rho^{m-1} <= tol < H rho^{m-2}, in log form
  std::string detail;
};

/// Recomputes every derived field of a certificate from its stored inputs.
CertificateCheck verify_certificate(const ConvergenceCertificate& cert);

struct RateOptimum {
  DriftMinParams params;
  double r = 0.0;
  double log_rate_gap = 0.0;
};

/// Maximizes the rate gap over d in (thr (1 + 1e-6), thr 1e4] and r in (0, 1),
/// thr = 2L/(1 - lambda). Throws CertificationFailure when no (d, r) gives rho_hat < 1.
RateOptimum optimize_rate(DriftVariant variant, double lambda, Eigen::Index n, Eigen::Index p);

/// Attaches H(beta0) and the burn-in m* to an optimized rate.
ConvergenceCertificate make_certificate(const RateOptimum& opt, std::string lambda_source,
                                        double h_beta0, double tv_tolerance);

struct CertifyOptions {
  int p_max = 20;  // orthant enumeration cap
};

struct OrthantBound {
  double lambda = 0.0;
  bool certifying = false;  // lambda < 1
};

/// Squared, clamped orthant bound
///   lambda_max(S X^T X S) - (2/pi) min_j lambda_min(S W(S_j) S),  S = Sigma^{-1/2}.
/// Rows with a zero coordinate lie in no open orthant and are skipped.
/// Throws CombinatorialBlowup when p > p_max.
OrthantBound lambda_v1_orthant_bound(const PosteriorModel& model, int p_max = 20);

/// lambda_max^2(I - S Q S); requires Q positive definite.
double lambda_v1_pdQ_bound(const PosteriorModel& model);

struct LambdaResult {
  double lambda = 1.0;
  std::string source;  // "orthant", "pd_q", "intercept_only_closed_form", "hat_matrix"
};

/// Smallest certified drift coefficient for the V1 chain. Throws
/// CertificationFailure when no bound below 1 is available.
LambdaResult lambda_v1(const PosteriorModel& model, const CertifyOptions& options = {});

struct LambdaHeuristic {
  double estimate = 0.0;
  long evaluations = 0;
};

/// Uncertified multi-start search for the drift supremum over t in (0,1) and alpha != 0.
/// Its value is a lower estimate of the true coefficient, useful only for diagnostics.
LambdaHeuristic lambda_v1_heuristic(const PosteriorModel& model, std::uint64_t seed,
                                    int starts = 16, int iterations = 60);

/// lambda_max^2(X Sigma^{-1} X^T). Throws RankDeficiency unless X has full row rank.
double lambda_v2(const PosteriorModel& model);

/// tr(X Sigma^{-1} X^T).
double hat_trace(const PosteriorModel& model);

/// ||gamma||^2.
double v1_drift_value(const Eigen::VectorXd& gamma);

/// ||(X Sigma^{-1} X^T)^{-1/2} X{Sigma^{-1}(X^T z + Q v) - mode}||^2.
double v2_drift_value(const PosteriorModel& model, const Eigen::VectorXd& z);

/// 2 + L/(1-lambda) + tr(X Sigma^{-1} X^T) + ||Sigma^{1/2}{Sigma^{-1}(X^T varphi(beta) + Q v) - mode}||^2.
double h_beta_v1(const PosteriorModel& model, const Eigen::VectorXd& beta,
                 const DriftMinParams& params);

/// As h_beta_v1 with the last term measured by (X Sigma^{-1} X^T)^{-1/2} X.
double h_beta_v2(const PosteriorModel& model, const Eigen::VectorXd& beta,
                 const DriftMinParams& params);

/// Certified burn-in for the chosen flipped chain started at beta0.
ConvergenceCertificate optimize_certificate(const PosteriorModel& model, DriftVariant variant,
                                            double tv_tolerance, const Eigen::VectorXd& beta0,
                                            const CertifyOptions& options = {});

/// [n/(n+q)]^2 [1 - (2/pi) min(s/n, 1 - s/n)]^2.
double intercept_only_lambda(long n, long successes, double q);

/// Closed-form V1 certificate for the intercept-only model, started at beta0 = 0.
ConvergenceCertificate intercept_only_certificate(long n, long successes, double q,
                                                  double tv_tolerance);

struct InstabilityRow {
  Eigen::Index n = 0;
  double delta = 0.0;        // ||(X^T X)^{-1} X^T (varphi(gamma) - varphi(-gamma))||^2
  double trace_term = 0.0;   // 2 tr{(X^T X)^{-1}}
  double overlap_upper_bound = 1.0;  // min(1, 4 tr{(X^T X)^{-1}} / (delta/5))
};

/// Flat-prior separation of the one-step means from +gamma and -gamma.
/// Throws Inconclusive when delta is zero.
InstabilityRow instability_row(const Dataset& data, const Eigen::VectorXd& gamma);
std::vector<InstabilityRow> instability_diagnostic(const std::vector<Dataset>& datasets,
                                                   const Eigen::VectorXd& gamma);

/// max(0, 1 - (1 - psi)/(1 - 2/pi)) for psi in (0, 1).
double rate_lower_bound_n1(double psi);

/// 2 Phi(-sqrt(d)): overlap of N(gamma, 1) over |gamma| <= sqrt(d).
double exact_overlap_p1(double d);

}  // namespace acprobit
