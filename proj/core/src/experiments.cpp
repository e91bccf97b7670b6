#include "acprobit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "acprobit/errors.hpp"
#include "acprobit/rng.hpp"
#include "acprobit/symmat.hpp"
#include "acprobit/truncnorm.hpp"

namespace acprobit {

std::string to_string(Mechanism m) {
  return m == Mechanism::gaussian_covariates ? "gaussian_covariates" : "fixed_design";
}

Mechanism mechanism_from_string(const std::string& s) {
  if (s == "gaussian_covariates" || s == "gaussian") return Mechanism::gaussian_covariates;
  if (s == "fixed_design" || s == "fixed") return Mechanism::fixed_design;
  throw InvalidInput("unknown mechanism '" + s + "'");
}

std::string to_string(PriorFamily f) {
  switch (f) {
    case PriorFamily::scaled_identity: return "scaled_identity";
    case PriorFamily::g_prior: return "g_prior";
    case PriorFamily::identity: return "identity";
  }
  return "unknown";
}

PriorFamily prior_family_from_string(const std::string& s) {
  if (s == "scaled_identity") return PriorFamily::scaled_identity;
  if (s == "g_prior" || s == "g") return PriorFamily::g_prior;
  if (s == "identity") return PriorFamily::identity;
  throw InvalidInput("unknown prior family '" + s + "'");
}

Dataset generate_dataset(const GeneratorConfig& config) {
  const Eigen::Index n = config.n;
  const Eigen::Index p = config.p;
  if (n < 1 || p < 1) throw InvalidInput("generator needs n >= 1 and p >= 1");

  if (config.mechanism == Mechanism::fixed_design) {
    if (p != 1) throw InvalidInput("fixed_design is intercept-only and needs p = 1");
    const double f = config.success_fraction;
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidInput("success_fraction must lie in [0, 1]");
    const auto s = static_cast<Eigen::Index>(std::llround(f * static_cast<double>(n)));
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    std::fill(y.begin(), y.begin() + s, 1);
    return Dataset(Eigen::MatrixXd::Ones(n, 1), std::move(y));
  }

  if (config.true_beta.size() != p) {
    std::ostringstream os;
    os << "true_beta has length " << config.true_beta.size() << ", expected p = " << p;
    throw InvalidInput(os.str());
  }
  Rng rng(config.seed);
  Eigen::MatrixXd x(n, p);
  std::vector<int> y(static_cast<std::size_t>(n));
  const Eigen::Index first = config.intercept ? 1 : 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (config.intercept) x(i, 0) = 1.0;
    for (Eigen::Index j = first; j < p; ++j) x(i, j) = rng.normal();
    const double prob = norm_cdf(x.row(i).dot(config.true_beta));
    y[static_cast<std::size_t>(i)] = rng.uniform() < prob ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y));
}

std::vector<Dataset> dataset_grid(const GeneratorConfig& config,
                                  const std::vector<Eigen::Index>& n_grid) {
  std::vector<Dataset> out;
  out.reserve(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    GeneratorConfig c = config;
    c.n = n_grid[i];
    c.seed = config.seed + i;
    out.push_back(generate_dataset(c));
  }
  return out;
}

Eigen::MatrixXd fixed_design(Eigen::Index n, Eigen::Index p, const DesignConfig& config) {
  if (n < 1 || p < 1) throw InvalidInput("design needs n >= 1 and p >= 1");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);
  const Eigen::Index block = std::min(n, p);
  for (Eigen::Index j = 0; j < block; ++j) {
    x(j, j) += 1.0;
    x((j + 1) % n, j) += 0.5;
    x.col(j).normalize();
  }
  // Column j >= n comes from its own stream so that X_p is a prefix of X_{p+1}.
  for (Eigen::Index j = n; j < p; ++j) {
    Rng rng(config.seed + static_cast<std::uint64_t>(j));
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
    x.col(j).normalize();
  }
  if (config.row_normalized) x.rowwise().normalize();
  return x;
}

std::vector<int> fixed_responses(Eigen::Index n, std::uint64_t seed) {
  // Offset keeps the response stream apart from the column streams.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = rng.uniform() < 0.5 ? 1 : 0;
  return y;
}

GaussianPrior prior_for_design(const PriorSequenceConfig& config, const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.cols();
  switch (config.family) {
    case PriorFamily::scaled_identity:
      if (!(config.q > 0.0)) throw InvalidInput("scaled_identity needs q > 0");
      return GaussianPrior::scaled_identity(p, config.q * static_cast<double>(p));
    case PriorFamily::identity:
      if (!(config.q > 0.0)) throw InvalidInput("identity prior needs q > 0");
      return GaussianPrior::scaled_identity(p, config.q);
    case PriorFamily::g_prior: {
      if (!(config.g_scale > 0.0)) throw InvalidInput("g_prior needs c > 0");
      const Eigen::Index rank = numerical_rank(x);
      if (rank < 1) throw RankDeficiency("g_prior needs a nonzero design");
      const Eigen::MatrixXd xtx = x.transpose() * x;
      Eigen::MatrixXd q = config.g_scale * xtx;
      if (rank < p) {
        // I - P for the row space of X, using the full-row-rank factorization when available.
        Eigen::MatrixXd proj;
        if (rank == x.rows()) {
          const Eigen::MatrixXd xxt = x * x.transpose();
          proj = x.transpose() * Eigen::LLT<Eigen::MatrixXd>(xxt).solve(x);
        } else {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
          const Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
          proj = v * v.transpose();
        }
        const double ridge = config.g_scale * xtx.trace() / static_cast<double>(rank);
        q += ridge * (Eigen::MatrixXd::Identity(p, p) - proj);
      }
      return GaussianPrior(SymMatrix(q), Eigen::VectorXd::Zero(p));
    }
  }
  throw InvalidInput("unknown prior family");
}

double SweepResult::lambda_sup() const {
  double sup = 0.0;
  bool any = false;
  for (const auto& r : rows) {
    if (r.certificate) {
      sup = std::max(sup, r.certificate->params.lambda);
      any = true;
    }
  }
  return any ? sup : 1.0;
}

bool SweepResult::all_certified() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.certificate.has_value(); });
}

bool SweepResult::stable() const {
  return all_certified() && lambda_sup() < 1.0 &&
         std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.prior_bound_ok; });
}

namespace {

template <typename Index>
void require_increasing(const std::vector<Index>& grid, const char* what) {
  if (grid.empty()) throw InvalidInput(std::string(what) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw InvalidInput(std::string(what) + " grid entries must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw InvalidInput(std::string(what) + " grid must be strictly increasing");
    }
  }
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

SweepResult sweep_n(const GeneratorConfig& config, const std::vector<Eigen::Index>& n_grid,
                    const GaussianPrior& prior, const SweepOptions& options) {
  require_increasing(n_grid, "n");
  SweepResult result;
  result.axis = SweepAxis::n;
  result.tv_tolerance = options.tv_tolerance;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    SweepRow row;
    row.size = n_grid[i];
    row.seed = config.seed + i;
    const auto start = Clock::now();
    try {
      GeneratorConfig c = config;
      c.n = n_grid[i];
      c.seed = row.seed;
      const auto model = PosteriorModel::build(generate_dataset(c), prior);
      row.certificate = optimize_certificate(model, DriftVariant::v1_flipped, options.tv_tolerance,
                                             Eigen::VectorXd::Zero(model.p()), options.certify);
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.wall_time_ms = options.deterministic ? 0.0 : elapsed_ms(start);
    result.rows.push_back(std::move(row));
  }
  return result;
}

SweepResult sweep_p(Eigen::Index n, const std::vector<Eigen::Index>& p_grid,
                    const PriorSequenceConfig& prior_seq, const DesignConfig& design,
                    const SweepOptions& options) {
  require_increasing(p_grid, "p");
  if (n < 1) throw InvalidInput("n must be positive");
  SweepResult result;
  result.axis = SweepAxis::p;
  result.tv_tolerance = options.tv_tolerance;
  const Eigen::MatrixXd full = fixed_design(n, p_grid.back(), {design.seed, false});
  const std::vector<int> y = fixed_responses(n, design.seed);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    SweepRow row;
    row.size = p_grid[i];
    row.seed = design.seed;
    const auto start = Clock::now();
    try {
      Eigen::MatrixXd x = full.leftCols(p_grid[i]);
      if (design.row_normalized) x.rowwise().normalize();
      GaussianPrior prior = prior_for_design(prior_seq, x);
      Eigen::LLT<Eigen::MatrixXd> qllt(prior.precision().matrix());
      const Eigen::MatrixXd qinv_xt = qllt.solve(x.transpose());
      row.prior_bound_value = eig_extremes(SymMatrix(x * qinv_xt)).lambda_max;
      row.prior_bound_ok = *row.prior_bound_value < prior_seq.prior_bound;
      const auto model = PosteriorModel::build(Dataset(std::move(x), y), std::move(prior));
      row.certificate = optimize_certificate(model, DriftVariant::v2_flipped, options.tv_tolerance,
                                             Eigen::VectorXd::Zero(model.p()), options.certify);
    } catch (const Error& e) {
      row.error = e.what();
      row.prior_bound_ok = row.prior_bound_ok && row.prior_bound_value.has_value();
    }
    row.wall_time_ms = options.deterministic ? 0.0 : elapsed_ms(start);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace acprobit
