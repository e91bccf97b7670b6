// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acprobit/acprobit.hpp"
#include "oracles.hpp"

using namespace acprobit;

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

// Shared across criteria: every certificate and model the run produces.
std::vector<ConvergenceCertificate> g_certificates;
std::vector<double> g_residuals;

PosteriorModel track(PosteriorModel m) {
  g_residuals.push_back(fixed_point_residual(m));
  return m;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

Dataset intercept_only(long n, long s) {
  std::vector<int> y(n, 0);
  std::fill(y.begin(), y.begin() + s, 1);
  return Dataset(Eigen::MatrixXd::Ones(n, 1), y);
}

Outcome truncnorm_suite() {
  Outcome o;
  o.require(std::fabs(g(0.0) - kTwoOverPi) <= 1e-12, "g(0) != 2/pi");
  double prev = g(-10.0);
  for (int k = -999; k <= 1000; ++k) {
    const double cur = g(k / 100.0);
    if (!(cur < prev)) {
      o.require(false, "g not decreasing at " + fmt("%g", k / 100.0));
      break;
    }
    prev = cur;
  }
  double worst = 0.0;
  const double h = 1e-4;
  for (int k = -80; k <= 80; ++k) {
    const double th = k / 10.0;
    for (auto side : {TruncSide::positive, TruncSide::negative}) {
      const double fd = (tn_mean(th + h, side) - tn_mean(th - h, side)) / (2 * h);
      worst = std::max(worst, std::fabs(fd - tn_var(th, side)));
    }
  }
  o.require(worst <= 1e-6, "dE/dtheta differs from var by " + fmt("%.2e", worst));
  const std::size_t n = 100000;
  const double crit = oracle::ks_critical(0.001, n);
  double max_d = 0.0;
  std::uint64_t seed = 100;
  for (double th : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
    for (bool pos : {true, false}) {
      Rng rng(++seed);
      std::vector<double> xs(n);
      for (auto& x : xs) x = tn_sample(th, pos ? TruncSide::positive : TruncSide::negative, rng);
      const double d = oracle::ks_statistic(xs, [&](double z) { return oracle::tn_cdf(z, th, pos); });
      max_d = std::max(max_d, d);
      o.require(d < crit, "KS rejects theta=" + fmt("%g", th) + (pos ? " (+)" : " (-)"));
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("max KS D=") + fmt("%.5f", max_d) +
              " crit=" + fmt("%.5f", crit) + ", derivative err " + fmt("%.1e", worst);
  return o;
}

Outcome mode_and_fixed_point() {
  Outcome o;
  for (auto [n, s] : {std::pair{10L, 5L}, std::pair{100L, 37L}, std::pair{1000L, 999L}}) {
    const auto m = track(PosteriorModel::build(intercept_only(n, s), GaussianPrior::flat(1)));
    const double ref = oracle::normal_quantile(static_cast<double>(s) / n);
    o.require(std::fabs(m.mode()(0) - ref) <= 1e-8,
              "mode for (" + std::to_string(n) + "," + std::to_string(s) + ") off by " +
                  fmt("%.2e", std::fabs(m.mode()(0) - ref)));
  }
  GeneratorConfig cfg;
  cfg.n = 200;
  cfg.seed = 21;
  const auto model = track(PosteriorModel::build(generate_dataset(cfg), GaussianPrior::scaled_identity(2, 1.0)));
  Rng rng(22);
  const int reps = 100000;
  std::vector<std::vector<double>> draws(2, std::vector<double>(reps));
  for (int t = 0; t < reps; ++t) {
    const Eigen::VectorXd b = ac_step(model, model.mode(), rng);
    draws[0][t] = b(0);
    draws[1][t] = b(1);
  }
  double worst_z = 0.0;
  for (int j = 0; j < 2; ++j) {
    const auto ms = oracle::mean_se(draws[j]);
    worst_z = std::max(worst_z, std::fabs(ms.mean - model.mode()(j)) / ms.se);
  }
  o.require(worst_z <= 5.0, "one-step mean " + fmt("%.2f", worst_z) + " SE from the mode");
  double worst_res = 0.0;
  for (double r : g_residuals) worst_res = std::max(worst_res, r);
  o.require(worst_res <= 1e-6, "fixed-point residual " + fmt("%.2e", worst_res));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("one-step mean within ") + fmt("%.2f", worst_z) +
              " SE, max fixed-point residual " + fmt("%.1e", worst_res);
  return o;
}

Outcome drift_inequalities() {
  Outcome o;
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  const int starts = 50, reps = 10000;
  double worst = -1e300;

  // V1 on the gamma chain: n = 40, p = 2, ridge prior.
  {
    GeneratorConfig cfg;
    cfg.n = 40;
    cfg.seed = 32;
    const auto model = track(PosteriorModel::build(generate_dataset(cfg), GaussianPrior::scaled_identity(2, 1.0)));
    const double lambda = lambda_v1(model).lambda;
    const double L = 2 * (1 + lambda);
    Rng rng(33);
    for (int s = 0; s < starts; ++s) {
      const double scale = std::pow(10.0, (s % 5) - 1);
      const Eigen::Vector2d gamma(scale * nd(gen), scale * nd(gen));
      std::vector<double> v(reps);
      for (auto& x : v) x = v1_drift_value(gamma_step(model, gamma, rng));
      const auto ms = oracle::mean_se(v);
      const double slack = ms.mean - (lambda * v1_drift_value(gamma) + L + 5 * ms.se);
      worst = std::max(worst, slack);
      if (slack > 0) o.require(false, "V1 drift exceeded at start " + std::to_string(s));
    }
  }
  // V2 on the z chain: n = 5 rows in p = 12 dimensions, g-prior.
  {
    const Eigen::MatrixXd x = fixed_design(5, 12, {34, false});
    PriorSequenceConfig pc;
    const auto model = track(PosteriorModel::build(Dataset(x, fixed_responses(5, 34)), prior_for_design(pc, x)));
    const double lambda = lambda_v2(model);
    const double L = 5 * (1 + lambda);
    Rng rng(35);
    for (int s = 0; s < starts; ++s) {
      const double scale = std::pow(10.0, (s % 5) - 1);
      Eigen::VectorXd z(5);
      for (int i = 0; i < 5; ++i) {
        const double a = std::fabs(scale * nd(gen)) + 1e-3;
        z(i) = model.data().y()[i] == 1 ? a : -a;
      }
      std::vector<double> v(reps);
      for (auto& val : v) val = v2_drift_value(model, z_step(model, z, rng));
      const auto ms = oracle::mean_se(v);
      const double slack = ms.mean - (lambda * v2_drift_value(model, z) + L + 5 * ms.se);
      worst = std::max(worst, slack);
      if (slack > 0) o.require(false, "V2 drift exceeded at start " + std::to_string(s));
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("largest E[V'] - (lambda V + L + 5 SE) = ") +
              fmt("%.3g", worst);
  return o;
}

Outcome minorization_p1() {
  Outcome o;
  double min_ratio = 1e300;
  for (int d = 1; d <= 20; ++d) {
    const double exact = exact_overlap_p1(d);
    const double eps = std::pow(2.0, -0.5) * std::exp(-static_cast<double>(d));
    min_ratio = std::min(min_ratio, exact / eps);
    o.require(exact >= eps, "overlap below epsilon at d=" + std::to_string(d));
  }
  o.detail = "min overlap/epsilon = " + fmt("%.4f", min_ratio);
  return o;
}

Outcome closed_forms() {
  Outcome o;
  std::mt19937_64 gen(41);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const long n = std::uniform_int_distribution<long>(2, 2000)(gen);
    const long s = std::uniform_int_distribution<long>(1, n - 1)(gen);
    const double q = std::uniform_real_distribution<double>(0.01, 10.0)(gen);
    const auto model = track(PosteriorModel::build(intercept_only(n, s), GaussianPrior::scaled_identity(1, q)));
    const double phat = static_cast<double>(s) / n;
    const double display = std::pow(n / (n + q) * (1 - kTwoOverPi * std::min(phat, 1 - phat)), 2);
    const double got = lambda_v1_orthant_bound(model).lambda;
    worst = std::max(worst, std::fabs(got - display));
    g_certificates.push_back(intercept_only_certificate(n, s, q, 0.01));
  }
  o.require(worst <= 1e-12, "orthant bound differs from closed form by " + fmt("%.2e", worst));
  double worst_g = 0.0;
  for (double c : {0.5, 1.0, 4.0}) {
    for (Eigen::Index p : {8, 30}) {
      const Eigen::MatrixXd x = fixed_design(6, p, {42, false});
      PriorSequenceConfig pc;
      pc.g_scale = c;
      const auto model = track(PosteriorModel::build(Dataset(x, fixed_responses(6, 42)), prior_for_design(pc, x)));
      worst_g = std::max(worst_g, std::fabs(lambda_v2(model) - std::pow(1 / (1 + c), 2)));
    }
  }
  o.require(worst_g <= 1e-10, "g-prior lambda off by " + fmt("%.2e", worst_g));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("orthant err ") + fmt("%.1e", worst) +
              ", g-prior err " + fmt("%.1e", worst_g);
  return o;
}

Outcome stability_in_n() {
  Outcome o;
  double sup = 0.0, max_log10_m = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const auto res = sweep_n(cfg, {200, 2000, 20000}, GaussianPrior::flat(2));
    for (const auto& r : res.rows) {
      if (!r.certificate) {
        o.require(false, "n=" + std::to_string(r.size) + " seed " + std::to_string(r.seed) + ": " +
                             r.error.value_or("not certified"));
        continue;
      }
      const auto& c = *r.certificate;
      g_certificates.push_back(c);
      sup = std::max(sup, c.params.lambda);
      max_log10_m = std::max(max_log10_m, c.log10_m_star);
      o.require(c.params.lambda < 1.0, "lambda >= 1");
      // rho_hat = exp(-gap) may round to 1; rho_hat < 1 is exactly gap > 0.
      o.require(std::isfinite(c.log_rate_gap), "rho_hat not below 1");
      o.require(std::isfinite(c.log10_m_star), "m* not finite");
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("sup lambda ") + fmt("%.6f", sup) +
              ", largest m* ~ 1e" + fmt("%.0f", max_log10_m);
  return o;
}

Outcome stability_in_p() {
  Outcome o;
  PriorSequenceConfig pc;
  pc.g_scale = 1.0;
  const auto res = sweep_p(5, {10, 100, 1000}, pc, {0, false});
  double worst = 0.0;
  for (const auto& r : res.rows) {
    if (!r.certificate) {
      o.require(false, "p=" + std::to_string(r.size) + ": " + r.error.value_or("not certified"));
      continue;
    }
    const auto& c = *r.certificate;
    g_certificates.push_back(c);
    worst = std::max(worst, std::fabs(c.params.lambda - 0.25));
    o.require(std::isfinite(c.log_rate_gap), "rho_hat not below 1 at p=" + std::to_string(r.size));
  }
  o.require(worst <= 1e-10, "lambda off 0.25 by " + fmt("%.2e", worst));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("max |lambda - 1/4| = ") + fmt("%.1e", worst);
  return o;
}

Outcome instability() {
  Outcome o;
  std::string last;
  for (std::uint64_t seed : {1, 2, 3}) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const auto rows = instability_diagnostic(dataset_grid(cfg, {100, 400, 1600, 6400}), cfg.true_beta);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      o.require(rows[i].overlap_upper_bound < rows[i - 1].overlap_upper_bound,
                "not decreasing at n=" + std::to_string(rows[i].n) + " seed " + std::to_string(seed));
    }
    o.require(rows.back().overlap_upper_bound < 0.05, "bound at n=6400 is " + fmt("%.4f", rows.back().overlap_upper_bound));
    last += (last.empty() ? "" : ", ") + fmt("%.4f", rows.back().overlap_upper_bound);
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("bound at n=6400: ") + last;
  return o;
}

Outcome rate_lower_bound() {
  Outcome o;
  for (double psi : {0.5, 0.9}) {
    const auto model = track(PosteriorModel::build(Dataset(Eigen::MatrixXd::Ones(1, 1), {1}),
                                                   GaussianPrior::scaled_identity(1, (1 - psi) / psi)));
    const auto trace = run_chain(model, ChainVariant::z_chain, varphi(model, model.mode()), 1000000,
                                 static_cast<std::uint64_t>(psi * 100));
    const auto est = lag1_rate_estimate(trace, [](const Eigen::VectorXd& z) { return z(0); });
    const double bound = rate_lower_bound_n1(psi);
    o.require(est.estimate >= bound - 5 * est.mc_se, "estimate below bound at psi=" + fmt("%g", psi));
    if (psi == 0.9) {
      o.require(std::fabs(bound - 0.7248) < 5e-5, "bound at 0.9 is " + fmt("%.6f", bound));
      o.require(est.estimate > 0.70, "estimate at 0.9 is " + fmt("%.4f", est.estimate));
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("psi=") + fmt("%g", psi) + " estimate " +
                fmt("%.4f", est.estimate) + " +/- " + fmt("%.4f", est.mc_se) + " bound " + fmt("%.4f", bound);
  }
  return o;
}

Outcome certificate_consistency() {
  Outcome o;
  // Certificates from the CLI-facing paths not already collected.
  {
    GeneratorConfig cfg;
    cfg.seed = 51;
    cfg.n = 300;
    const auto model = track(PosteriorModel::build(generate_dataset(cfg), GaussianPrior::scaled_identity(2, 1.0)));
    g_certificates.push_back(optimize_certificate(model, DriftVariant::v1_flipped, 0.01, Eigen::Vector2d::Zero()));
    g_certificates.push_back(optimize_certificate(model, DriftVariant::v1_flipped, 0.1, Eigen::Vector2d(1.0, -2.0)));
  }
  double worst_rho = 0.0;
  for (const auto& c : g_certificates) {
    const auto chk = verify_certificate(c);
    worst_rho = std::max(worst_rho, chk.rho_formula_error);
    if (!chk.ok) o.require(false, chk.detail);
  }
  double worst_res = 0.0;
  for (double r : g_residuals) worst_res = std::max(worst_res, r);
  o.require(worst_res <= 1e-6, "fixed-point residual " + fmt("%.2e", worst_res));
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(g_certificates.size()) +
              " certificates, max rho formula error " + fmt("%.1e", worst_rho) + ", " +
              std::to_string(g_residuals.size()) + " models, max fixed-point residual " + fmt("%.1e", worst_res);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "truncated-normal suite", 30, truncnorm_suite},
      {2, "posterior mode and fixed point", 60, mode_and_fixed_point},
      {3, "drift inequalities", 300, drift_inequalities},
      {4, "minorization at p=1", 1, minorization_p1},
      {5, "closed-form agreement", 60, closed_forms},
      {6, "stability in n", 120, stability_in_n},
      {7, "stability in p", 60, stability_in_p},
      {8, "instability of the uncentred drift", 120, instability},
      {9, "rate lower bound at n=1", 120, rate_lower_bound},
      {10, "certificate self-consistency", 60, certificate_consistency},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.require(false, "runtime over " + fmt("%g", c.budget_s) + " s");
    failed += !o.pass;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
