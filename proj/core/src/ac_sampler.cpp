#include "acprobit/ac_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "acprobit/errors.hpp"
#include "acprobit/truncnorm.hpp"

namespace acprobit {

std::string to_string(ChainVariant v) {
  switch (v) {
    case ChainVariant::beta_chain: return "beta_chain";
    case ChainVariant::gamma_chain: return "gamma_chain";
    case ChainVariant::z_chain: return "z_chain";
  }
  return "unknown";
}

ChainVariant chain_variant_from_string(const std::string& s) {
  if (s == "beta" || s == "beta_chain") return ChainVariant::beta_chain;
  if (s == "gamma" || s == "gamma_chain") return ChainVariant::gamma_chain;
  if (s == "z" || s == "z_chain") return ChainVariant::z_chain;
  throw InvalidInput("unknown chain variant '" + s + "' (expected beta, gamma or z)");
}

Eigen::VectorXd draw_latent(const PosteriorModel& model, const Eigen::VectorXd& beta, Rng& rng) {
  const Eigen::VectorXd theta = model.data().x() * beta;
  const auto& y = model.data().y();
  Eigen::VectorXd z(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    z(i) = tn_sample(theta(i), side_from_response(y[i]), rng);
  }
  return z;
}

namespace {

Eigen::VectorXd standard_normal(Eigen::Index k, Rng& rng) {
  Eigen::VectorXd e(k);
  for (Eigen::Index i = 0; i < k; ++i) e(i) = rng.normal();
  return e;
}

Eigen::VectorXd gaussian_around(const PosteriorModel& model, const Eigen::VectorXd& mean, Rng& rng) {
  return mean + model.sigma_inv_chol().triangularView<Eigen::Lower>() *
                    standard_normal(model.p(), rng);
}

}  // namespace

Eigen::VectorXd draw_beta_given_latent(const PosteriorModel& model, const Eigen::VectorXd& z,
                                       Rng& rng) {
  return gaussian_around(model, model.latent_to_beta_mean(z), rng);
}

Eigen::VectorXd gamma_of_latent(const PosteriorModel& model, const Eigen::VectorXd& z) {
  return model.sigma_sqrt().matrix() * (model.latent_to_beta_mean(z) - model.mode());
}

Eigen::VectorXd ac_step(const PosteriorModel& model, const Eigen::VectorXd& beta, Rng& rng) {
  if (beta.size() != model.p()) throw InvalidInput("beta has the wrong dimension");
  return draw_beta_given_latent(model, draw_latent(model, beta, rng), rng);
}

Eigen::VectorXd gamma_step(const PosteriorModel& model, const Eigen::VectorXd& gamma, Rng& rng) {
  if (gamma.size() != model.p()) throw InvalidInput("gamma has the wrong dimension");
  const Eigen::VectorXd centre = model.sigma_inv_sqrt().matrix() * gamma + model.mode();
  const Eigen::VectorXd beta = gaussian_around(model, centre, rng);
  return gamma_of_latent(model, draw_latent(model, beta, rng));
}

Eigen::VectorXd z_step(const PosteriorModel& model, const Eigen::VectorXd& z, Rng& rng) {
  if (z.size() != model.n()) throw InvalidInput("z has the wrong dimension");
  return draw_latent(model, draw_beta_given_latent(model, z, rng), rng);
}

ChainTrace run_chain(const PosteriorModel& model, ChainVariant variant,
                     const Eigen::VectorXd& start, long steps, std::uint64_t seed) {
  if (steps < 1) throw InvalidInput("run_chain needs steps >= 1");
  const Eigen::Index dim = variant == ChainVariant::z_chain ? model.n() : model.p();
  if (start.size() != dim) throw InvalidInput("start state has the wrong dimension");
  if (!start.allFinite()) throw InvalidInput("start state has non-finite entries");

  ChainTrace trace;
  trace.seed = seed;
  trace.variant = variant;
  trace.states.reserve(static_cast<std::size_t>(steps) + 1);
  trace.states.push_back(start);
  Rng rng(seed);
  for (long m = 0; m < steps; ++m) {
    const Eigen::VectorXd& cur = trace.states.back();
    switch (variant) {
      case ChainVariant::beta_chain: trace.states.push_back(ac_step(model, cur, rng)); break;
      case ChainVariant::gamma_chain: trace.states.push_back(gamma_step(model, cur, rng)); break;
      case ChainVariant::z_chain: trace.states.push_back(z_step(model, cur, rng)); break;
    }
  }
  return trace;
}

namespace {

double lag1(const double* x, long n) {
  double mean = 0.0;
  for (long i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (long i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    den += d * d;
    if (i + 1 < n) num += d * (x[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

RateEstimate lag1_autocorrelation(const std::vector<double>& series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) {
    throw InsufficientLength("lag-1 estimate needs at least 100 values after burn-in, got " +
                             std::to_string(n));
  }
  RateEstimate out;
  out.used = n;
  out.estimate = lag1(series.data(), n);

  const long b = std::clamp(static_cast<long>(std::sqrt(static_cast<double>(n))), 10L, 100L);
  const long len = n / b;
  std::vector<double> est(static_cast<std::size_t>(b));
  double m = 0.0;
  for (long k = 0; k < b; ++k) {
    est[k] = lag1(series.data() + k * len, len);
    m += est[k];
  }
  m /= static_cast<double>(b);
  double ss = 0.0;
  for (double e : est) ss += (e - m) * (e - m);
  out.batches = b;
  out.mc_se = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  return out;
}

RateEstimate lag1_rate_estimate(const ChainTrace& trace,
                                const std::function<double(const Eigen::VectorXd&)>& functional,
                                std::optional<long> burn_in) {
  const long len = static_cast<long>(trace.states.size());
  const long burn = burn_in.value_or(len / 10);
  if (burn < 0) throw InvalidInput("burn-in must be nonnegative");
  if (len <= burn + 100) {
    throw InsufficientLength("trace of length " + std::to_string(len) +
                             " is too short for burn-in " + std::to_string(burn) + " + 100");
  }
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(len - burn));
  for (long i = burn; i < len; ++i) series.push_back(functional(trace.states[i]));
  return lag1_autocorrelation(series);
}

void write_trace_csv(std::ostream& os, const ChainTrace& trace) {
  os << "# seed " << trace.seed << "\n";
  os << "# variant " << to_string(trace.variant) << "\n";
  os << "# rng " << Rng::kAlgorithm << "\n";
  const Eigen::Index dim = trace.states.empty() ? 0 : trace.states.front().size();
  const char* prefix = trace.variant == ChainVariant::z_chain       ? "z"
                       : trace.variant == ChainVariant::gamma_chain ? "gamma"
                                                                    : "beta";
  os << "step";
  for (Eigen::Index j = 0; j < dim; ++j) os << ',' << prefix << (j + 1);
  os << "\n";
  const auto old_prec = os.precision(17);
  for (std::size_t m = 0; m < trace.states.size(); ++m) {
    os << m;
    for (Eigen::Index j = 0; j < dim; ++j) os << ',' << trace.states[m](j);
    os << "\n";
  }
  os.precision(old_prec);
}

}  // namespace acprobit
