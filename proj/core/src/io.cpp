#include "acprobit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "acprobit/errors.hpp"

namespace acprobit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw InvalidInput("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = split_csv(t);
    break;
  }
  if (header.size() < 2) throw InvalidInput("dataset CSV needs a header x1,...,xp,y");
  if (header.back() != "y") throw InvalidInput("last dataset column must be named y");
  const std::size_t p = header.size() - 1;

  std::vector<double> xs;
  std::vector<int> y;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_csv(t);
    if (cells.size() != p + 1) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(p + 1) + " fields, got " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < p; ++j) xs.push_back(parse_double(cells[j], line_no));
    const double yv = parse_double(cells[p], line_no);
    if (yv != 0.0 && yv != 1.0) {
      throw InvalidInput("line " + std::to_string(line_no) + ": response must be 0 or 1");
    }
    y.push_back(static_cast<int>(yv));
  }
  if (y.empty()) throw InvalidInput("dataset CSV has no observations");
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, static_cast<Eigen::Index>(j)) = xs[i * p + j];
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open dataset file '" + path + "'");
  return read_dataset_csv(f);
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  for (Eigen::Index j = 0; j < data.p(); ++j) os << 'x' << (j + 1) << ',';
  os << "y\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) os << format_number(data.x()(i, j)) << ',';
    os << data.y()[static_cast<std::size_t>(i)] << '\n';
  }
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput("expected a JSON array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

GaussianPrior parse_prior_json(const nlohmann::json& j, Eigen::Index p) {
  if (!j.is_object()) throw InvalidInput("prior JSON must be an object");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p, p);
  if (j.contains("Q")) {
    const auto& jq = j.at("Q");
    if (jq.is_string()) {
      if (jq.get<std::string>() != "zero") throw InvalidInput("Q string must be \"zero\"");
    } else if (jq.is_object()) {
      if (!jq.contains("scaled_identity") || !jq.at("scaled_identity").is_number()) {
        throw InvalidInput("Q object must be {\"scaled_identity\": q}");
      }
      q = jq.at("scaled_identity").get<double>() * Eigen::MatrixXd::Identity(p, p);
    } else if (jq.is_array()) {
      if (static_cast<Eigen::Index>(jq.size()) != p) {
        throw InvalidInput("Q must be " + std::to_string(p) + " x " + std::to_string(p));
      }
      for (Eigen::Index r = 0; r < p; ++r) {
        const Eigen::VectorXd row = vector_from_json(jq[static_cast<std::size_t>(r)]);
        if (row.size() != p) {
          throw InvalidInput("Q must be " + std::to_string(p) + " x " + std::to_string(p));
        }
        q.row(r) = row.transpose();
      }
      if (!(q - q.transpose()).isZero(1e-12 * (1.0 + q.cwiseAbs().maxCoeff()))) {
        throw InvalidInput("Q must be symmetric");
      }
    } else {
      throw InvalidInput("Q must be a matrix, \"zero\" or {\"scaled_identity\": q}");
    }
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  if (j.contains("v")) {
    const auto& jv = j.at("v");
    if (jv.is_string()) {
      if (jv.get<std::string>() != "zero") throw InvalidInput("v string must be \"zero\"");
    } else {
      v = vector_from_json(jv);
      if (v.size() != p) throw InvalidInput("v must have length " + std::to_string(p));
    }
  }
  return GaussianPrior(SymMatrix(q), std::move(v));
}

GaussianPrior read_prior_json_file(const std::string& path, Eigen::Index p) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open prior file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("prior file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_prior_json(j, p);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_pow10(double log10_value) {
  if (!std::isfinite(log10_value)) return log10_value > 0 ? "inf" : "0";
  double e = std::floor(log10_value);
  double mant = std::pow(10.0, log10_value - e);
  if (mant >= 9.999995) {
    mant /= 10.0;
    e += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6fe%+.0f", mant, e);
  // Strip trailing zeros in the mantissa.
  std::string s(buf);
  const auto epos = s.find('e');
  std::string m = s.substr(0, epos);
  while (m.back() == '0') m.pop_back();
  if (m.back() == '.') m.pop_back();
  return m + s.substr(epos);
}

std::string format_epsilon(const DriftMinParams& params) {
  if (params.log_epsilon > -700.0) return format_number(params.epsilon());
  return format_pow10(params.log_epsilon / std::numbers::ln10);
}

std::string format_rho_hat(const ConvergenceCertificate& cert) {
  if (cert.rho_hat < 1.0) return format_number(cert.rho_hat);
  return "1-" + format_pow10(cert.log_rate_gap / std::numbers::ln10);
}

std::string format_m_star(const ConvergenceCertificate& cert) {
  if (cert.m_star) return std::to_string(*cert.m_star);
  return format_pow10(cert.log10_m_star);
}

nlohmann::json to_json(const DriftMinParams& params) {
  return {{"variant", to_string(params.variant)}, {"lambda", params.lambda}, {"L", params.L},
          {"d", params.d}, {"epsilon", params.epsilon()}, {"log_epsilon", params.log_epsilon},
          {"epsilon_text", format_epsilon(params)}};
}

nlohmann::json to_json(const ConvergenceCertificate& cert) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = to_string(cert.params.variant);
  j["lambda"] = cert.params.lambda;
  j["lambda_source"] = cert.lambda_source;
  j["L"] = cert.params.L;
  j["d"] = cert.params.d;
  j["epsilon"] = cert.params.epsilon();
  j["log_epsilon"] = cert.params.log_epsilon;
  j["epsilon_text"] = format_epsilon(cert.params);
  j["r"] = cert.r;
  j["rho_hat"] = cert.rho_hat;
  j["log_rate_gap"] = cert.log_rate_gap;
  j["rho_hat_text"] = format_rho_hat(cert);
  j["H_beta0"] = cert.H_beta0;
  j["m_star"] = cert.m_star ? nlohmann::json(*cert.m_star) : nlohmann::json(nullptr);
  j["log10_m_star"] = cert.log10_m_star;
  j["m_star_text"] = format_m_star(cert);
  j["tv_tolerance"] = cert.tv_tolerance;
  return j;
}

nlohmann::json to_json(const ProprietyReport& report) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["c1_full_column_rank"] = report.c1_full_column_rank;
  j["c2_feasible"] = report.c2_feasible;
  j["c2_certificate"] =
      report.c2_certificate ? vector_to_json(*report.c2_certificate) : nlohmann::json(nullptr);
  j["c2_margin"] = report.c2_margin ? nlohmann::json(*report.c2_margin) : nlohmann::json(nullptr);
  j["proper"] = report.proper;
  return j;
}

nlohmann::json to_json(const RateEstimate& est) {
  return {{"estimate", est.estimate}, {"mc_se", est.mc_se}, {"used", est.used},
          {"batches", est.batches}};
}

nlohmann::json to_json(const InstabilityRow& row) {
  return {{"n", row.n}, {"delta", row.delta}, {"trace_term", row.trace_term},
          {"overlap_upper_bound", row.overlap_upper_bound}};
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["axis"] = result.axis == SweepAxis::n ? "n" : "p";
  j["tv_tolerance"] = result.tv_tolerance;
  j["lambda_sup"] = result.lambda_sup();
  j["all_certified"] = result.all_certified();
  j["stable"] = result.stable();
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json row;
    row["size"] = r.size;
    row["seed"] = r.seed;
    row["wall_time_ms"] = r.wall_time_ms;
    row["certificate"] = r.certificate ? to_json(*r.certificate) : nlohmann::json(nullptr);
    row["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
    if (result.axis == SweepAxis::p) {
      row["prior_bound_value"] =
          r.prior_bound_value ? nlohmann::json(*r.prior_bound_value) : nlohmann::json(nullptr);
      row["prior_bound_ok"] = r.prior_bound_ok;
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "# axis " << (result.axis == SweepAxis::n ? "n" : "p") << "\n";
  os << "# rho_hat is written as 1-<gap> when it rounds to 1 in double precision\n";
  os << "size,lambda,L,epsilon,rho_hat,m_star,wall_time_ms\n";
  for (const auto& r : result.rows) {
    if (!r.certificate) {
      os << "# size=" << r.size << " seed=" << r.seed
         << " error: " << r.error.value_or("no certificate") << "\n";
      continue;
    }
    const auto& c = *r.certificate;
    os << r.size << ',' << format_number(c.params.lambda) << ',' << format_number(c.params.L)
       << ',' << format_epsilon(c.params) << ',' << format_rho_hat(c) << ',' << format_m_star(c)
       << ',' << format_number(r.wall_time_ms) << "\n";
    if (!r.prior_bound_ok) {
      os << "# size=" << r.size << " prior bound violated: lambda_max(X Q^-1 X^T) = "
         << format_number(r.prior_bound_value.value_or(0.0)) << "\n";
    }
  }
}

void write_certificate_csv(std::ostream& os, const ConvergenceCertificate& cert) {
  os << "variant,lambda,lambda_source,L,d,epsilon,r,rho_hat,H_beta0,m_star,tv_tolerance\n";
  os << to_string(cert.params.variant) << ',' << format_number(cert.params.lambda) << ','
     << cert.lambda_source << ',' << format_number(cert.params.L) << ','
     << format_number(cert.params.d) << ',' << format_epsilon(cert.params) << ','
     << format_number(cert.r) << ',' << format_rho_hat(cert) << ','
     << format_number(cert.H_beta0) << ',' << format_m_star(cert) << ','
     << format_number(cert.tv_tolerance) << "\n";
}

}  // namespace acprobit
