#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "acprobit/errors.hpp"
#include "acprobit/io.hpp"

using nlohmann::json;

TEST(DatasetCsv, ParsesCommentsAndBlankLines) {
  std::istringstream is("# comment\nx1,x2,y\n\n1.5,-2,1\n0,3e-1,0\n");
  const auto d = acprobit::read_dataset_csv(is);
  EXPECT_EQ(d.n(), 2);
  EXPECT_EQ(d.p(), 2);
  EXPECT_DOUBLE_EQ(d.x()(0, 1), -2.0);
  EXPECT_DOUBLE_EQ(d.x()(1, 1), 0.3);
  EXPECT_EQ(d.y(), (std::vector<int>{1, 0}));
}

TEST(DatasetCsv, RoundTrip) {
  Eigen::MatrixXd x(2, 2);
  x << 0.1, 1.0 / 3.0, -7, 1e-300;
  const acprobit::Dataset d(x, {0, 1});
  std::ostringstream os;
  acprobit::write_dataset_csv(os, d);
  std::istringstream is(os.str());
  const auto back = acprobit::read_dataset_csv(is);
  EXPECT_EQ(back.x(), d.x());
  EXPECT_EQ(back.y(), d.y());
}

TEST(DatasetCsv, Errors) {
  for (const char* text : {"x1,y\n1,2\n", "x1,y\n1\n", "x1,z\n1,0\n", "x1,y\nabc,1\n", "x1,y\n", "y\n1\n",
                           "x1,y\n1,0.5\n"}) {
    std::istringstream is(text);
    EXPECT_THROW(acprobit::read_dataset_csv(is), acprobit::InvalidInput) << text;
  }
  EXPECT_THROW(acprobit::read_dataset_csv_file("/nonexistent/file.csv"), acprobit::InvalidInput);
}

TEST(PriorJson, Forms) {
  const auto flat = acprobit::parse_prior_json(json::object(), 2);
  EXPECT_TRUE(flat.is_flat());
  const auto si = acprobit::parse_prior_json(json::parse(R"({"Q": {"scaled_identity": 2.5}, "v": [1, 2]})"), 2);
  EXPECT_DOUBLE_EQ(si.precision()(1, 1), 2.5);
  EXPECT_DOUBLE_EQ(si.precision()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(si.mean()(1), 2.0);
  const auto full = acprobit::parse_prior_json(json::parse(R"({"Q": [[2, 1], [1, 2]], "v": "zero"})"), 2);
  EXPECT_DOUBLE_EQ(full.precision()(0, 1), 1.0);
}

TEST(PriorJson, Errors) {
  for (const char* text : {R"({"Q": [[1, 2], [0, 1]]})", R"({"Q": [[1]]})", R"({"Q": "one"})",
                           R"({"v": [1, 2, 3]})", R"([1, 2])", R"({"Q": [[1, 0], [0, "a"]]})"}) {
    EXPECT_THROW(acprobit::parse_prior_json(json::parse(text), 2), acprobit::InvalidInput) << text;
  }
  EXPECT_THROW(acprobit::parse_prior_json(json::parse(R"({"Q": [[1, 0], [0, -1]]})"), 2),
               acprobit::NotPositiveSemidefinite);
}

TEST(Format, Numbers) {
  EXPECT_EQ(acprobit::format_number(0.25), "0.25");
  EXPECT_EQ(acprobit::format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(acprobit::format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(acprobit::format_pow10(-1147.5), "3.162278e-1148");
  EXPECT_EQ(acprobit::format_pow10(2.0), "1e+2");
}

TEST(Format, CertificateFields) {
  acprobit::ConvergenceCertificate c;
  c.params.log_epsilon = -2000.0 * std::log(10.0);
  EXPECT_EQ(acprobit::format_epsilon(c.params).substr(0, 2), "1e");
  EXPECT_NE(acprobit::format_epsilon(c.params).find("e-2000"), std::string::npos);

  c.log_rate_gap = std::log(1e-20);
  c.rho_hat = 1.0;
  EXPECT_EQ(acprobit::format_rho_hat(c).substr(0, 2), "1-");
  c.log_rate_gap = std::log(0.5);
  c.rho_hat = std::exp(-0.5);
  EXPECT_EQ(std::stod(acprobit::format_rho_hat(c)), std::exp(-0.5));

  c.m_star = 1234;
  EXPECT_EQ(acprobit::format_m_star(c), "1234");
  c.m_star.reset();
  c.log10_m_star = 300.25;
  EXPECT_NE(acprobit::format_m_star(c).find("e+300"), std::string::npos);
}

TEST(Json, CertificateCarriesSchemaFields) {
  const auto opt = acprobit::optimize_rate(acprobit::DriftVariant::v1_flipped, 0.4, 1, 1);
  const auto c = acprobit::make_certificate(opt, "orthant", 5.0, 0.01);
  const json j = acprobit::to_json(c);
  for (const char* key : {"lambda_source", "r", "rho_hat", "log_rate_gap", "H_beta0", "tv_tolerance", "m_star"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["m_star"].get<std::int64_t>(), *c.m_star);
}

TEST(Json, VectorRoundTrip) {
  const Eigen::Vector3d v(1.0, -0.5, 1e-10);
  EXPECT_EQ(acprobit::vector_from_json(acprobit::vector_to_json(v)), Eigen::VectorXd(v));
  EXPECT_THROW(acprobit::vector_from_json(json::parse(R"([1, "x"])")), acprobit::InvalidInput);
}
