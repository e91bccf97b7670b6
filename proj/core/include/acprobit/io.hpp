#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acprobit/ac_sampler.hpp"
#include "acprobit/certify.hpp"
#include "acprobit/experiments.hpp"
#include "acprobit/probit_model.hpp"

namespace acprobit {

inline constexpr int kSchemaVersion = 1;

/// Dataset CSV: a header x1,...,xp,y then one observation per row. Blank lines
/// and lines starting with '#' are skipped. Throws InvalidInput on malformed input.
Dataset read_dataset_csv(std::istream& is);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& os, const Dataset& data);

/// {"Q": matrix | "zero" | {"scaled_identity": q}, "v": vector | "zero"}.
/// Missing keys default to "zero".
GaussianPrior parse_prior_json(const nlohmann::json& j, Eigen::Index p);
GaussianPrior read_prior_json_file(const std::string& path, Eigen::Index p);

/// Shortest round-tripping decimal for finite x; "inf", "-inf", "nan" otherwise.
std::string format_number(double x);

/// 10^log10_value in scientific notation, valid far outside the double range.
std::string format_pow10(double log10_value);

/// rho_hat for display: the plain number when it is below 1 in double precision,
/// otherwise "1-<gap>" with the gap in scientific notation.
std::string format_rho_hat(const ConvergenceCertificate& cert);

/// m* as an integer when exact, otherwise in scientific notation.
std::string format_m_star(const ConvergenceCertificate& cert);

/// epsilon, written from log_epsilon so that underflow does not print 0.
std::string format_epsilon(const DriftMinParams& params);

nlohmann::json to_json(const DriftMinParams& params);
nlohmann::json to_json(const ConvergenceCertificate& cert);
nlohmann::json to_json(const ProprietyReport& report);
nlohmann::json to_json(const RateEstimate& est);
nlohmann::json to_json(const InstabilityRow& row);
nlohmann::json to_json(const SweepResult& result);

/// Columns size,lambda,L,epsilon,rho_hat,m_star,wall_time_ms. Failed rows are
/// written as '#' comment lines carrying the error.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// One CSV line per certificate field pair, for --output csv.
void write_certificate_csv(std::ostream& os, const ConvergenceCertificate& cert);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace acprobit
