#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acprobit/acprobit.hpp"

namespace acprobit::cli {

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string output = "json";
  double tol = 0.01;
};

struct ModelInputs {
  std::string data;
  std::string prior;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--output", c.output, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--tol", c.tol, "Total-variation tolerance for burn-in certificates")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

void add_model_inputs(CLI::App* sub, ModelInputs& m) {
  sub->add_option("--data", m.data, "Dataset CSV (x1..xp,y)")->required()->check(CLI::ExistingFile);
  sub->add_option("--prior", m.prior, "Prior JSON; flat prior when omitted")
      ->check(CLI::ExistingFile);
}

Dataset load_data(const ModelInputs& m) { return read_dataset_csv_file(m.data); }

GaussianPrior load_prior(const ModelInputs& m, Eigen::Index p) {
  return m.prior.empty() ? GaussianPrior::flat(p) : read_prior_json_file(m.prior, p);
}

PosteriorModel load_model(const ModelInputs& m) {
  Dataset data = load_data(m);
  GaussianPrior prior = load_prior(m, data.p());
  return PosteriorModel::build(std::move(data), std::move(prior));
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd start_beta(const PosteriorModel& model, const std::vector<double>& beta0) {
  if (beta0.empty()) return Eigen::VectorXd::Zero(model.p());
  if (static_cast<Eigen::Index>(beta0.size()) != model.p()) {
    throw InvalidInput("--beta0 needs " + std::to_string(model.p()) + " values");
  }
  return vec(beta0);
}

void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

void emit_table(std::ostream& out, const std::vector<std::string>& keys, const nlohmann::json& j) {
  for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
  out << "\n";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out << (i ? "," : "");
    const auto& v = j.at(keys[i]);
    if (v.is_string()) {
      out << v.get<std::string>();
    } else if (v.is_number_float()) {
      out << format_number(v.get<double>());
    } else {
      out << v.dump();
    }
  }
  out << "\n";
}

void emit_certificate(std::ostream& out, const Common& c, const ConvergenceCertificate& cert,
                      nlohmann::json extra = nlohmann::json::object()) {
  if (c.output == "csv") {
    write_certificate_csv(out, cert);
    return;
  }
  nlohmann::json j = to_json(cert);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  emit(out, j);
}

std::vector<Eigen::Index> to_index(const std::vector<long>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-augmentation sampler and convergence certificates for probit regression",
               "acprobit"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "acprobit 0.1.0");

  std::function<void()> action;

  // check-propriety
  Common c_prop;
  ModelInputs m_prop;
  auto* prop = app.add_subcommand("check-propriety", "Posterior propriety report");
  add_common(prop, c_prop);
  add_model_inputs(prop, m_prop);
  prop->callback([&] {
    action = [&] {
      const Dataset data = load_data(m_prop);
      const auto report = check_propriety(data, load_prior(m_prop, data.p()));
      const auto j = to_json(report);
      if (c_prop.output == "csv") {
        emit_table(out, {"c1_full_column_rank", "c2_feasible", "proper"}, j);
      } else {
        emit(out, j);
      }
    };
  });

  // mode
  Common c_mode;
  ModelInputs m_mode;
  int max_iter = 200;
  auto* mode = app.add_subcommand("mode", "Posterior mode by damped Newton");
  add_common(mode, c_mode);
  add_model_inputs(mode, m_mode);
  mode->add_option("--max-iter", max_iter, "Newton iteration cap")->capture_default_str();
  mode->callback([&] {
    action = [&] {
      Dataset data = load_data(m_mode);
      GaussianPrior prior = load_prior(m_mode, data.p());
      NewtonOptions opts;
      opts.max_iterations = max_iter;
      const auto model = PosteriorModel::build(std::move(data), std::move(prior), opts);
      nlohmann::json j{{"schema_version", kSchemaVersion},
                       {"mode", vector_to_json(model.mode())},
                       {"grad_norm", model.mode_grad_norm()},
                       {"iterations", model.mode_iterations()},
                       {"fixed_point_residual", fixed_point_residual(model)}};
      if (c_mode.output == "csv") {
        out << "index,mode\n";
        for (Eigen::Index i = 0; i < model.p(); ++i) {
          out << i << ',' << format_number(model.mode()(i)) << "\n";
        }
      } else {
        emit(out, j);
      }
    };
  });

  // sample
  Common c_sample;
  ModelInputs m_sample;
  long steps = 1000;
  std::string chain = "beta";
  std::vector<double> sample_start;
  auto* sample = app.add_subcommand("sample", "Run the sampler or one of its flipped chains");
  add_common(sample, c_sample);
  add_model_inputs(sample, m_sample);
  sample->add_option("--steps", steps, "Number of transitions")->capture_default_str();
  sample->add_option("--chain", chain, "beta, gamma or z")->capture_default_str();
  sample->add_option("--start", sample_start, "Start state (default: mode, or its image)")
      ->delimiter(',');
  sample->callback([&] {
    action = [&] {
      const auto model = load_model(m_sample);
      const ChainVariant v = chain_variant_from_string(chain);
      Eigen::VectorXd start;
      if (!sample_start.empty()) {
        start = vec(sample_start);
      } else if (v == ChainVariant::beta_chain) {
        start = model.mode();
      } else if (v == ChainVariant::gamma_chain) {
        start = Eigen::VectorXd::Zero(model.p());
      } else {
        start = varphi(model, model.mode());
      }
      const auto trace = run_chain(model, v, start, steps, c_sample.seed);
      if (c_sample.output == "csv") {
        write_trace_csv(out, trace);
      } else {
        nlohmann::json states = nlohmann::json::array();
        for (const auto& s : trace.states) states.push_back(vector_to_json(s));
        emit(out, {{"schema_version", kSchemaVersion},
                   {"seed", trace.seed},
                   {"variant", to_string(trace.variant)},
                   {"rng", Rng::kAlgorithm},
                   {"states", states}});
      }
    };
  });

  // certify
  Common c_cert;
  ModelInputs m_cert;
  std::string variant = "v1";
  std::vector<double> beta0;
  int p_max = 20;
  bool heuristic = false;
  auto* cert = app.add_subcommand("certify", "Drift/minorization certificate with burn-in m*");
  add_common(cert, c_cert);
  add_model_inputs(cert, m_cert);
  cert->add_option("--variant", variant, "v1 or v2")
      ->check(CLI::IsMember({"v1", "v2"}))
      ->capture_default_str();
  cert->add_option("--beta0", beta0, "Starting point (default 0)")->delimiter(',');
  cert->add_option("--p-max", p_max, "Orthant enumeration cap")->capture_default_str();
  cert->add_flag("--heuristic", heuristic, "Also report the uncertified search for lambda");
  cert->callback([&] {
    action = [&] {
      const auto model = load_model(m_cert);
      CertifyOptions opts;
      opts.p_max = p_max;
      const auto v = drift_variant_from_string(variant);
      const auto result =
          optimize_certificate(model, v, c_cert.tol, start_beta(model, beta0), opts);
      nlohmann::json extra = nlohmann::json::object();
      if (heuristic && v == DriftVariant::v1_flipped) {
        extra["lambda_heuristic_uncertified"] = lambda_v1_heuristic(model, c_cert.seed).estimate;
      }
      emit_certificate(out, c_cert, result, extra);
    };
  });

  // tv-bound
  Common c_tv;
  ModelInputs m_tv;
  std::string tv_variant = "v1";
  std::vector<double> tv_beta0;
  long tv_steps = 1000;
  auto* tv = app.add_subcommand("tv-bound", "Certified TV bound after a given number of steps");
  add_common(tv, c_tv);
  add_model_inputs(tv, m_tv);
  tv->add_option("--variant", tv_variant, "v1 or v2")
      ->check(CLI::IsMember({"v1", "v2"}))
      ->capture_default_str();
  tv->add_option("--beta0", tv_beta0, "Starting point (default 0)")->delimiter(',');
  tv->add_option("--steps", tv_steps, "Number of iterations m")->capture_default_str();
  tv->callback([&] {
    action = [&] {
      if (tv_steps < 1) throw InvalidInput("--steps must be at least 1");
      const auto model = load_model(m_tv);
      const auto result = optimize_certificate(model, drift_variant_from_string(tv_variant),
                                               c_tv.tol, start_beta(model, tv_beta0));
      // log10 of H rho^{m-1}
      const double log10_bound =
          std::log10(result.H_beta0) -
          static_cast<double>(tv_steps - 1) * std::exp(result.log_rate_gap) / std::numbers::ln10;
      emit_certificate(out, c_tv, result,
                       {{"steps", tv_steps},
                        {"tv_bound", std::min(1.0, std::pow(10.0, log10_bound))},
                        {"log10_tv_bound", log10_bound}});
    };
  });

  // intercept-only
  Common c_io;
  long io_n = 100, io_s = 50;
  double io_q = 1.0;
  auto* io = app.add_subcommand("intercept-only", "Closed-form certificate, intercept-only model");
  add_common(io, c_io);
  io->add_option("--n", io_n, "Number of trials")->required();
  io->add_option("--s", io_s, "Number of successes")->required();
  io->add_option("--q", io_q, "Prior precision")->capture_default_str();
  io->callback([&] {
    action = [&] { emit_certificate(out, c_io, intercept_only_certificate(io_n, io_s, io_q, c_io.tol)); };
  });

  // sweep-n
  Common c_sn;
  std::vector<long> sn_grid{200, 2000, 20000};
  std::vector<double> beta_star{1.0, 1.0};
  std::string mechanism = "gaussian_covariates";
  bool intercept = false;
  double success_fraction = 0.5;
  double sn_q = 0.0;
  bool sn_det = false;
  std::string sn_out;
  auto* sn = app.add_subcommand("sweep-n", "V1 certificates along a grid of sample sizes");
  add_common(sn, c_sn);
  sn->add_option("--n-grid", sn_grid, "Sample sizes")->delimiter(',')->capture_default_str();
  sn->add_option("--beta-star", beta_star, "True coefficients")->delimiter(',')->capture_default_str();
  sn->add_option("--mechanism", mechanism, "gaussian_covariates or fixed_design")
      ->check(CLI::IsMember({"gaussian_covariates", "fixed_design"}))
      ->capture_default_str();
  sn->add_flag("--intercept", intercept, "First covariate is an intercept column");
  sn->add_option("--success-fraction", success_fraction, "fixed_design success fraction")
      ->capture_default_str();
  sn->add_option("--q", sn_q, "Prior precision q I (0 = flat)")->capture_default_str();
  sn->add_flag("--deterministic", sn_det, "Write wall_time_ms as 0 for byte-identical reruns");
  sn->add_option("--summary", sn_out, "Write the JSON summary to this file (csv mode)");
  sn->callback([&] {
    action = [&] {
      GeneratorConfig cfg;
      cfg.mechanism = mechanism_from_string(mechanism);
      cfg.seed = c_sn.seed;
      cfg.intercept = intercept;
      cfg.success_fraction = success_fraction;
      if (cfg.mechanism == Mechanism::fixed_design) {
        cfg.p = 1;
        cfg.true_beta = Eigen::VectorXd::Zero(1);
      } else {
        cfg.true_beta = vec(beta_star);
        cfg.p = cfg.true_beta.size();
      }
      SweepOptions opts;
      opts.tv_tolerance = c_sn.tol;
      opts.deterministic = sn_det;
      const auto result =
          sweep_n(cfg, to_index(sn_grid), GaussianPrior::scaled_identity(cfg.p, sn_q), opts);
      if (c_sn.output == "csv") {
        write_sweep_csv(out, result);
        const auto summary = to_json(result);
        if (!sn_out.empty()) {
          std::ofstream(sn_out) << summary.dump(2) << "\n";
        } else {
          err << "lambda_sup=" << format_number(result.lambda_sup())
              << " all_certified=" << result.all_certified() << "\n";
        }
      } else {
        emit(out, to_json(result));
      }
    };
  });

  // sweep-p
  Common c_sp;
  long sp_n = 5;
  std::vector<long> sp_grid{10, 100, 1000};
  std::string family = "g_prior";
  double sp_c = 1.0, sp_q = 1.0, sp_bound = 10.0;
  bool row_normalized = false, sp_det = false;
  std::string sp_out;
  auto* sp = app.add_subcommand("sweep-p", "V2 certificates along a grid of dimensions");
  add_common(sp, c_sp);
  sp->add_option("--n", sp_n, "Number of observations")->capture_default_str();
  sp->add_option("--p-grid", sp_grid, "Dimensions")->delimiter(',')->capture_default_str();
  sp->add_option("--family", family, "g_prior, scaled_identity or identity")
      ->check(CLI::IsMember({"g_prior", "scaled_identity", "identity"}))
      ->capture_default_str();
  sp->add_option("--c", sp_c, "g-prior scale")->capture_default_str();
  sp->add_option("--q", sp_q, "Identity-family precision")->capture_default_str();
  sp->add_option("--prior-bound", sp_bound, "Declared bound on lambda_max(X Q^-1 X^T)")
      ->capture_default_str();
  sp->add_flag("--row-normalized", row_normalized, "Scale design rows to unit norm");
  sp->add_flag("--deterministic", sp_det, "Write wall_time_ms as 0 for byte-identical reruns");
  sp->add_option("--summary", sp_out, "Write the JSON summary to this file (csv mode)");
  sp->callback([&] {
    action = [&] {
      PriorSequenceConfig ps;
      ps.family = prior_family_from_string(family);
      ps.g_scale = sp_c;
      ps.q = sp_q;
      ps.prior_bound = sp_bound;
      SweepOptions opts;
      opts.tv_tolerance = c_sp.tol;
      opts.deterministic = sp_det;
      const auto result = sweep_p(sp_n, to_index(sp_grid), ps, {c_sp.seed, row_normalized}, opts);
      if (c_sp.output == "csv") {
        write_sweep_csv(out, result);
        const auto summary = to_json(result);
        if (!sp_out.empty()) {
          std::ofstream(sp_out) << summary.dump(2) << "\n";
        } else {
          err << "lambda_sup=" << format_number(result.lambda_sup())
              << " stable=" << result.stable() << "\n";
        }
      } else {
        emit(out, to_json(result));
      }
    };
  });

  // instability-demo
  Common c_inst;
  std::vector<long> inst_grid{100, 400, 1600, 6400};
  std::vector<double> inst_beta{1.0, 1.0};
  std::vector<double> inst_gamma;
  auto* inst = app.add_subcommand("instability-demo",
                                  "Overlap bound for the uncentred chain along an n-grid");
  add_common(inst, c_inst);
  inst->add_option("--n-grid", inst_grid, "Sample sizes")->delimiter(',')->capture_default_str();
  inst->add_option("--beta-star", inst_beta, "True coefficients")->delimiter(',')->capture_default_str();
  inst->add_option("--gamma", inst_gamma, "Probe point (default beta-star)")->delimiter(',');
  inst->callback([&] {
    action = [&] {
      GeneratorConfig cfg;
      cfg.true_beta = vec(inst_beta);
      cfg.p = cfg.true_beta.size();
      cfg.seed = c_inst.seed;
      const Eigen::VectorXd gamma = inst_gamma.empty() ? cfg.true_beta : vec(inst_gamma);
      const auto rows = instability_diagnostic(dataset_grid(cfg, to_index(inst_grid)), gamma);
      if (c_inst.output == "csv") {
        out << "# delta_fraction 0.2\n";
        out << "n,delta,trace_term,overlap_upper_bound\n";
        for (const auto& r : rows) {
          out << r.n << ',' << format_number(r.delta) << ',' << format_number(r.trace_term) << ','
              << format_number(r.overlap_upper_bound) << "\n";
        }
      } else {
        nlohmann::json j{{"schema_version", kSchemaVersion},
                         {"seed", c_inst.seed},
                         {"delta_fraction", 0.2},
                         {"gamma", vector_to_json(gamma)},
                         {"rows", nlohmann::json::array()}};
        for (const auto& r : rows) j["rows"].push_back(to_json(r));
        emit(out, j);
      }
    };
  });

  // rate-lower-bound-n1
  Common c_lb;
  double psi = 0.9;
  auto* lb = app.add_subcommand("rate-lower-bound-n1", "Lower bound on the n = 1 convergence rate");
  add_common(lb, c_lb);
  lb->add_option("--psi", psi, "X Sigma^{-1} X^T in (0, 1)")->required();
  lb->callback([&] {
    action = [&] {
      const nlohmann::json j{{"schema_version", kSchemaVersion},
                             {"psi", psi},
                             {"rate_lower_bound", rate_lower_bound_n1(psi)}};
      if (c_lb.output == "csv") {
        emit_table(out, {"psi", "rate_lower_bound"}, j);
      } else {
        emit(out, j);
      }
    };
  });

  // rate-estimate
  Common c_re;
  ModelInputs m_re;
  long re_steps = 100000;
  std::optional<long> burn_in;
  std::string re_chain = "z";
  long coord = 0;
  std::optional<double> re_psi;
  auto* re = app.add_subcommand("rate-estimate", "Empirical lag-1 autocorrelation of a chain");
  add_common(re, c_re);
  re->add_option("--data", m_re.data, "Dataset CSV")->check(CLI::ExistingFile);
  re->add_option("--prior", m_re.prior, "Prior JSON")->check(CLI::ExistingFile);
  re->add_option("--psi", re_psi, "Use the n = 1 model X = 1, Y = 1, Q = (1 - psi)/psi");
  re->add_option("--steps", re_steps, "Number of transitions")->capture_default_str();
  re->add_option("--burn-in", burn_in, "Discarded states (default 10%)");
  re->add_option("--chain", re_chain, "beta, gamma or z")->capture_default_str();
  re->add_option("--coord", coord, "Coordinate used as the scalar functional")->capture_default_str();
  re->callback([&] {
    action = [&] {
      std::optional<PosteriorModel> model;
      if (re_psi) {
        if (!m_re.data.empty()) throw InvalidInput("--psi and --data are exclusive");
        if (!(*re_psi > 0.0 && *re_psi < 1.0)) throw InvalidInput("--psi must lie in (0, 1)");
        model.emplace(PosteriorModel::build(
            Dataset(Eigen::MatrixXd::Ones(1, 1), {1}),
            GaussianPrior::scaled_identity(1, (1.0 - *re_psi) / *re_psi)));
      } else if (!m_re.data.empty()) {
        model.emplace(load_model(m_re));
      } else {
        throw InvalidInput("rate-estimate needs --data or --psi");
      }
      const ChainVariant v = chain_variant_from_string(re_chain);
      const Eigen::Index dim = v == ChainVariant::z_chain ? model->n() : model->p();
      if (coord < 0 || coord >= dim) throw InvalidInput("--coord out of range");
      const Eigen::VectorXd start = v == ChainVariant::z_chain ? varphi(*model, model->mode())
                                    : v == ChainVariant::beta_chain ? model->mode()
                                                                    : Eigen::VectorXd::Zero(dim);
      const auto trace = run_chain(*model, v, start, re_steps, c_re.seed);
      const auto est = lag1_rate_estimate(
          trace, [&](const Eigen::VectorXd& s) { return s(coord); }, burn_in);
      nlohmann::json j = to_json(est);
      j["schema_version"] = kSchemaVersion;
      j["seed"] = c_re.seed;
      j["chain"] = to_string(v);
      j["steps"] = re_steps;
      if (re_psi) j["rate_lower_bound"] = rate_lower_bound_n1(*re_psi);
      if (c_re.output == "csv") {
        emit_table(out, {"estimate", "mc_se", "used", "batches"}, j);
      } else {
        emit(out, j);
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInvalidInput;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const CertificationFailure& e) {
    err << "certification failed: " << e.what() << "\n";
    return kExitCertificationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace acprobit::cli
