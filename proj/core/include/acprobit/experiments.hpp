#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "acprobit/certify.hpp"
#include "acprobit/probit_model.hpp"

namespace acprobit {

enum class Mechanism {
  gaussian_covariates,  // X_i iid N(0, I), optional leading intercept column
  fixed_design,         // intercept-only, deterministic responses
};

std::string to_string(Mechanism m);
Mechanism mechanism_from_string(const std::string& s);

struct GeneratorConfig {
  Mechanism mechanism = Mechanism::gaussian_covariates;
  /// beta*; length p. Y_i ~ Bernoulli(Phi(X_i^T beta*)).
  Eigen::VectorXd true_beta = Eigen::VectorXd::Ones(2);
  bool intercept = false;
  /// fixed_design only: the first round(n * success_fraction) responses are 1.
  double success_fraction = 0.5;
  std::uint64_t seed = 0;
  Eigen::Index n = 100;
  Eigen::Index p = 2;
};

/// Deterministic in the config. Throws InvalidInput on inconsistent sizes.
Dataset generate_dataset(const GeneratorConfig& config);

enum class PriorFamily {
  scaled_identity,  // Q_p = q p I
  g_prior,          // Q_p = c X^T X + ridge (I - P_row(X))
  identity,         // Q_p = q I
};

std::string to_string(PriorFamily f);
PriorFamily prior_family_from_string(const std::string& s);

struct PriorSequenceConfig {
  PriorFamily family = PriorFamily::g_prior;
  double q = 1.0;
  double g_scale = 1.0;
  /// Declared bound b with lambda_max(X Q^{-1} X^T) < b required for every p.
  double prior_bound = 10.0;
};

/// Q_p for the design x. The g-prior ridge on the null space of X equals
/// c tr(X^T X)/rank(X), which keeps Q_p positive definite while leaving
/// X Sigma^{-1} X^T = I/(1 + c) exact.
GaussianPrior prior_for_design(const PriorSequenceConfig& config, const Eigen::MatrixXd& x);

struct DesignConfig {
  std::uint64_t seed = 0;
  /// Rescale every row of X_p to unit norm after slicing.
  bool row_normalized = false;
};

/// n x p design whose first p columns do not depend on p: columns 1..n form a
/// unit-norm circulant block (e_j + e_{j+1}/2, normalized) of full rank, later
/// columns are iid Gaussian scaled to unit norm.
Eigen::MatrixXd fixed_design(Eigen::Index n, Eigen::Index p, const DesignConfig& config);

/// Responses for the p-sweep: iid Bernoulli(1/2) from the design seed.
std::vector<int> fixed_responses(Eigen::Index n, std::uint64_t seed);

enum class SweepAxis { n, p };

struct SweepRow {
  Eigen::Index size = 0;
  std::uint64_t seed = 0;
  std::optional<ConvergenceCertificate> certificate;
  double wall_time_ms = 0.0;
  /// p-sweeps: lambda_max(X Q^{-1} X^T) and whether it is below the declared bound.
  std::optional<double> prior_bound_value;
  bool prior_bound_ok = true;
  std::optional<std::string> error;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::n;
  std::vector<SweepRow> rows;
  double tv_tolerance = 0.0;

  /// Largest certified lambda across rows, 1 when no row certified.
  double lambda_sup() const;
  bool all_certified() const;
  /// Every row certified with lambda < 1 and, for p-sweeps, the declared prior bound held.
  bool stable() const;
};

struct SweepOptions {
  double tv_tolerance = 0.01;
  /// Record wall time as 0 so reruns give byte-identical output.
  bool deterministic = false;
  CertifyOptions certify;
};

/// V1 certificates for each n; row i uses seed config.seed + i and starts at beta0 = 0.
/// Sizes must be strictly increasing.
SweepResult sweep_n(const GeneratorConfig& config, const std::vector<Eigen::Index>& n_grid,
                    const GaussianPrior& prior, const SweepOptions& options = {});

/// V2 certificates for each p over the nested fixed design.
SweepResult sweep_p(Eigen::Index n, const std::vector<Eigen::Index>& p_grid,
                    const PriorSequenceConfig& prior_seq, const DesignConfig& design,
                    const SweepOptions& options = {});

/// n_grid datasets from one mechanism; dataset i uses seed config.seed + i.
std::vector<Dataset> dataset_grid(const GeneratorConfig& config,
                                  const std::vector<Eigen::Index>& n_grid);

}  // namespace acprobit
