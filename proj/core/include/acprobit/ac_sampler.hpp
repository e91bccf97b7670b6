#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acprobit/probit_model.hpp"
#include "acprobit/rng.hpp"

namespace acprobit {

enum class ChainVariant { beta_chain, gamma_chain, z_chain };

std::string to_string(ChainVariant v);
/// Accepts "beta", "gamma", "z" with or without the "_chain" suffix.
ChainVariant chain_variant_from_string(const std::string& s);

/// Z_i ~ TN(X_i^T beta, 1; Y_i), independently.
Eigen::VectorXd draw_latent(const PosteriorModel& model, const Eigen::VectorXd& beta, Rng& rng);

/// B ~ N(Sigma^{-1}(X^T z + Q v), Sigma^{-1}) using the cached Cholesky factor of Sigma^{-1}.
Eigen::VectorXd draw_beta_given_latent(const PosteriorModel& model, const Eigen::VectorXd& z,
                                       Rng& rng);

/// Sigma^{1/2}(Sigma^{-1}(X^T z + Q v) - mode): the Gamma coordinate of a latent vector.
Eigen::VectorXd gamma_of_latent(const PosteriorModel& model, const Eigen::VectorXd& z);

/// One data-augmentation step: Z | beta, then B | Z.
Eigen::VectorXd ac_step(const PosteriorModel& model, const Eigen::VectorXd& beta, Rng& rng);

/// One step of the flipped chain on Gamma: B ~ N(Sigma^{-1/2} gamma + mode, Sigma^{-1}),
/// Z | B, then the new Gamma.
Eigen::VectorXd gamma_step(const PosteriorModel& model, const Eigen::VectorXd& gamma, Rng& rng);

/// One step of the flipped chain on Z: B | Z = z, then Z' | B.
Eigen::VectorXd z_step(const PosteriorModel& model, const Eigen::VectorXd& z, Rng& rng);

struct ChainTrace {
  std::vector<Eigen::VectorXd> states;  // start state first
  std::uint64_t seed = 0;
  ChainVariant variant = ChainVariant::beta_chain;
};

/// Runs `steps` transitions from `start`. Deterministic in (model, start, seed).
ChainTrace run_chain(const PosteriorModel& model, ChainVariant variant,
                     const Eigen::VectorXd& start, long steps, std::uint64_t seed);

struct RateEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
  long used = 0;     // post-burn-in length
  long batches = 0;
};

/// Lag-1 autocorrelation of a scalar series with a batch-means standard error.
/// The series is split into B = clamp(sqrt(N), 10, 100) consecutive batches;
/// the estimate uses the whole series and the SE is sd(batch estimates)/sqrt(B).
/// Throws InsufficientLength when fewer than 100 values remain.
RateEstimate lag1_autocorrelation(const std::vector<double>& series);

/// Applies `functional` to each state after `burn_in` (default: 10% of the trace)
/// and returns its lag-1 autocorrelation. Throws InsufficientLength unless the
/// trace is longer than burn_in + 100.
RateEstimate lag1_rate_estimate(const ChainTrace& trace,
                                const std::function<double(const Eigen::VectorXd&)>& functional,
                                std::optional<long> burn_in = std::nullopt);

/// CSV with "# seed", "# variant" and "# rng" comment lines, a header and one state per row.
void write_trace_csv(std::ostream& os, const ChainTrace& trace);

}  // namespace acprobit
