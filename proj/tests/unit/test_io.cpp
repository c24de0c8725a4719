#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "idealreg/cumulants.hpp"
#include "idealreg/errors.hpp"
#include "idealreg/io.hpp"
#include "idealreg/polyspace.hpp"
#include "idealreg/rng.hpp"

using idealreg::DomainError;
using idealreg::EpochData;
using idealreg::HomoPoly;
using idealreg::Rng;
using idealreg::SweepRow;
using idealreg::SweepSummary;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name,
                                const std::string& content) {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("idealreg_test_" + name);
  std::ofstream out(p);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("polynomial JSON round-trips bit-exactly", "[io]") {
  Rng rng(3);
  HomoPoly p = HomoPoly::zero(4, 3);
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i)
    p.coeffs(i) = (i % 3 == 0) ? 0.0 : rng.gaussian();
  p.coeffs(1) = 1.0 / 3.0;
  p.coeffs(2) = 1e-17;
  p.coeffs(4) = -0.1;

  json j = idealreg::poly_to_json(p);
  // Through text, as the CLI would write and read it.
  HomoPoly q = idealreg::poly_from_json(json::parse(j.dump()));
  REQUIRE(q.vars == p.vars);
  REQUIRE(q.degree == p.degree);
  REQUIRE(q.coeffs.size() == p.coeffs.size());
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i)
    REQUIRE(q.coeffs(i) == p.coeffs(i));
}

TEST_CASE("duplicate terms accumulate", "[io]") {
  json j = {{"vars", 2},
            {"degree", 2},
            {"terms",
             {{{"exp", {1, 1}}, {"coef", 0.25}},
              {{"exp", {1, 1}}, {"coef", 0.5}},
              {{"exp", {2, 0}}, {"coef", -1.0}}}}};
  HomoPoly p = idealreg::poly_from_json(j);
  double xy = 0.0, xx = 0.0, yy = 0.0;
  idealreg::MonomialBasis basis = idealreg::enumerate_basis(2, 2);
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    const std::vector<int>& e = basis.index_at(i).exponents;
    if (e[0] == 1 && e[1] == 1) xy = p.coeffs(i);
    if (e[0] == 2) xx = p.coeffs(i);
    if (e[1] == 2) yy = p.coeffs(i);
  }
  REQUIRE(xy == 0.75);
  REQUIRE(xx == -1.0);
  REQUIRE(yy == 0.0);
}

TEST_CASE("malformed polynomials are rejected", "[io]") {
  auto code_of = [](const json& j) {
    try {
      idealreg::poly_from_json(j);
    } catch (const DomainError& err) {
      return std::string(err.code());
    }
    return std::string("no-error");
  };

  REQUIRE(code_of({{"vars", 2}, {"degree", 1}}) == "parse-error");
  REQUIRE(code_of({{"vars", 0},
                   {"degree", 1},
                   {"terms", json::array()}}) == "parse-error");
  // Exponent vector of the wrong length.
  REQUIRE(code_of({{"vars", 3},
                   {"degree", 2},
                   {"terms", {{{"exp", {2, 0}}, {"coef", 1.0}}}}}) ==
          "parse-error");
  // Exponents summing to the wrong degree.
  REQUIRE(code_of({{"vars", 2},
                   {"degree", 2},
                   {"terms", {{{"exp", {1, 0}}, {"coef", 1.0}}}}}) ==
          "parse-error");
  REQUIRE(code_of({{"vars", 2},
                   {"degree", 2},
                   {"terms", {{{"exp", {1, -1}}, {"coef", 1.0}}}}}) ==
          "parse-error");
  REQUIRE(code_of({{"vars", 2},
                   {"degree", 2},
                   {"terms", {{{"exp", {1, 1}}, {"coef", "x"}}}}}) ==
          "parse-error");
}

TEST_CASE("polynomial lists must agree on the variable count", "[io]") {
  json a = {{"vars", 2}, {"degree", 1}, {"terms", json::array()}};
  json b = {{"vars", 3}, {"degree", 1}, {"terms", json::array()}};
  REQUIRE_THROWS_AS(idealreg::polys_from_json(json::array({a, b})),
                    DomainError);
  REQUIRE_THROWS_AS(idealreg::polys_from_json(json::array()), DomainError);
  REQUIRE(idealreg::polys_from_json(json::array({a, a})).size() == 2);
}

TEST_CASE("CSV sample matrices parse with validation", "[io]") {
  auto path = temp_file("m.csv", "1.5, 2\n\n-3e-2,4\n0,0.25\n");
  Eigen::MatrixXd m = idealreg::read_csv_matrix(path.string());
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  REQUIRE(m(0, 0) == 1.5);
  REQUIRE(m(1, 0) == -3e-2);
  REQUIRE(m(2, 1) == 0.25);
  std::filesystem::remove(path);

  auto ragged = temp_file("ragged.csv", "1,2\n3\n");
  REQUIRE_THROWS_AS(idealreg::read_csv_matrix(ragged.string()), DomainError);
  std::filesystem::remove(ragged);

  auto bad = temp_file("bad.csv", "1,two\n");
  REQUIRE_THROWS_AS(idealreg::read_csv_matrix(bad.string()), DomainError);
  std::filesystem::remove(bad);

  REQUIRE_THROWS_AS(idealreg::read_csv_matrix("/nonexistent/file.csv"),
                    DomainError);
}

TEST_CASE("epoch files dispatch by extension", "[io]") {
  json epochs = json::array(
      {{{"mean", {0.0, 0.0}},
        {"covariance", {{2.0, 0.5}, {0.5, 1.0}}}},
       {{"mean", {1.0, -1.0}},
        {"covariance", {{1.0, 0.0}, {0.0, 1.0}}}}});
  auto jpath = temp_file("epochs.json", epochs.dump());
  auto cpath = temp_file("epoch.csv", "1,2\n3,4\n5,6\n");

  std::vector<EpochData> got =
      idealreg::read_epochs({jpath.string(), cpath.string()});
  REQUIRE(got.size() == 3);
  REQUIRE_FALSE(got[0].has_samples);
  REQUIRE(got[0].covariance(0, 1) == 0.5);
  REQUIRE(got[1].mean(1) == -1.0);
  REQUIRE(got[2].has_samples);
  REQUIRE(got[2].samples.rows() == 3);
  std::filesystem::remove(jpath);
  std::filesystem::remove(cpath);
}

TEST_CASE("asymmetric or misshapen moment epochs are rejected", "[io]") {
  json bad_sym = json::array(
      {{{"mean", {0.0, 0.0}},
        {"covariance", {{1.0, 0.5}, {0.2, 1.0}}}}});
  REQUIRE_THROWS_AS(idealreg::epochs_from_json(bad_sym, "t"), DomainError);

  json bad_shape = json::array(
      {{{"mean", {0.0, 0.0, 0.0}},
        {"covariance", {{1.0, 0.0}, {0.0, 1.0}}}}});
  REQUIRE_THROWS_AS(idealreg::epochs_from_json(bad_shape, "t"), DomainError);
}

TEST_CASE("sweep CSV writes 17 significant digits", "[io]") {
  SweepRow r;
  r.trial = 3;
  r.d = 7;
  r.sigma = 1e-6;
  r.angle_rad = 0.12345678901234567;
  r.runtime_ms = 0.0;
  std::string csv = idealreg::sweep_to_csv({r});

  REQUIRE(csv.rfind("trial,d,sigma,angle_rad,runtime_ms\n", 0) == 0);
  std::string line = csv.substr(csv.find('\n') + 1);
  REQUIRE(line.rfind("3,7,", 0) == 0);

  // The printed angle parses back to the identical double.
  std::size_t a = line.find(',', line.find(',', line.find(',') + 1) + 1);
  std::size_t b = line.find(',', a + 1);
  double back = std::strtod(line.substr(a + 1, b - a - 1).c_str(), nullptr);
  REQUIRE(back == r.angle_rad);
}

TEST_CASE("flag lists parse strictly", "[io]") {
  REQUIRE(idealreg::parse_int_list("2,2,2") == std::vector<int>{2, 2, 2});
  REQUIRE(idealreg::parse_int_list("5") == std::vector<int>{5});
  REQUIRE(idealreg::parse_double_list("1e-6, 0.5") ==
          std::vector<double>{1e-6, 0.5});
  REQUIRE_THROWS_AS(idealreg::parse_int_list("2,x"), DomainError);
  REQUIRE_THROWS_AS(idealreg::parse_int_list("2.5"), DomainError);
  REQUIRE_THROWS_AS(idealreg::parse_int_list(""), DomainError);
  REQUIRE_THROWS_AS(idealreg::parse_double_list("1,,2"), DomainError);
}

TEST_CASE("summaries serialize NaN-free", "[io]") {
  SweepSummary good;
  good.sigma = 0.5;
  good.q1 = 0.1;
  good.median = 0.2;
  good.q3 = 0.3;
  SweepSummary empty;
  empty.sigma = 1.0;
  empty.q1 = empty.median = empty.q3 =
      std::numeric_limits<double>::quiet_NaN();

  json j = idealreg::summary_to_json({good, empty});
  REQUIRE(j.size() == 2);
  REQUIRE(j[0]["median"] == 0.2);
  REQUIRE(j[1]["median"].is_null());
  // The dump must be valid JSON with no NaN tokens.
  REQUIRE(j.dump().find("nan") == std::string::npos);
}
