#pragma once

// File formats shared by the command line and the tests: polynomial lists
// and saturation results as JSON, epoch data as CSV sample matrices or JSON
// moment lists, sweep tables as CSV, noise-level summaries as JSON.  All
// floating-point text goes through 17 significant digits so a written value
// parses back to the identical double.

#include <json.hpp>

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idealreg/cumulants.hpp"
#include "idealreg/errors.hpp"
#include "idealreg/polyspace.hpp"
#include "idealreg/saturation.hpp"
#include "idealreg/series.hpp"
#include "idealreg/ssa.hpp"

namespace idealreg {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Comma-separated scalar lists as they appear in command-line flags.
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw parse_error("not an integer: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(
                                     item[used])))
      ++used;
    if (used != item.size())
      throw parse_error("not an integer: '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw parse_error("empty list: '" + text + "'");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw parse_error("not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(
                                     item[used])))
      ++used;
    if (used != item.size())
      throw parse_error("not a number: '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw parse_error("empty list: '" + text + "'");
  return out;
}

// One polynomial as {"vars", "degree", "terms": [{"exp", "coef"}]}.  Terms
// not listed are zero; duplicate exponents accumulate.
inline nlohmann::json poly_to_json(const HomoPoly& p) {
  MonomialBasis basis = enumerate_basis(p.vars, p.degree);
  nlohmann::json terms = nlohmann::json::array();
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    if (p.coeffs(i) == 0.0) continue;
    terms.push_back({{"exp", basis.index_at(i).exponents},
                     {"coef", p.coeffs(i)}});
  }
  return {{"vars", p.vars}, {"degree", p.degree}, {"terms", terms}};
}

inline HomoPoly poly_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vars") || !j.contains("degree") ||
      !j.contains("terms"))
    throw parse_error("polynomial needs fields vars, degree, terms");
  if (!j["vars"].is_number_integer() || !j["degree"].is_number_integer() ||
      !j["terms"].is_array())
    throw parse_error("polynomial field types: vars int, degree int, "
                      "terms array");
  const int vars = j["vars"].get<int>();
  const int degree = j["degree"].get<int>();
  if (vars < 1) throw parse_error("polynomial vars must be >= 1");
  if (degree < 0) throw parse_error("polynomial degree must be >= 0");

  MonomialBasis basis = enumerate_basis(vars, degree);
  HomoPoly p = HomoPoly::zero(vars, degree);
  for (const nlohmann::json& term : j["terms"]) {
    if (!term.is_object() || !term.contains("exp") || !term.contains("coef"))
      throw parse_error("term needs fields exp, coef");
    if (!term["exp"].is_array() || !term["coef"].is_number())
      throw parse_error("term field types: exp int array, coef number");
    std::vector<int> e;
    for (const nlohmann::json& x : term["exp"]) {
      if (!x.is_number_integer() || x.get<int>() < 0)
        throw parse_error("exponents must be non-negative integers");
      e.push_back(x.get<int>());
    }
    MultiIndex m{std::move(e)};
    if (static_cast<int>(m.exponents.size()) != vars ||
        m.degree() != degree)
      throw parse_error("term exponents must have length vars and sum to "
                        "the polynomial degree");
    p.coeffs(basis.position_of(m)) += term["coef"].get<double>();
  }
  return p;
}

inline nlohmann::json polys_to_json(const std::vector<HomoPoly>& polys) {
  nlohmann::json out = nlohmann::json::array();
  for (const HomoPoly& p : polys) out.push_back(poly_to_json(p));
  return out;
}

inline std::vector<HomoPoly> polys_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw parse_error("expected a non-empty polynomial array");
  std::vector<HomoPoly> out;
  for (const nlohmann::json& item : j) out.push_back(poly_from_json(item));
  for (const HomoPoly& p : out)
    if (p.vars != out.front().vars)
      throw parse_error("polynomials disagree on the variable count");
  return out;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw parse_error("invalid JSON in '" + path + "': " + ex.what());
  }
}

inline std::vector<HomoPoly> read_polys_file(const std::string& path) {
  return polys_from_json(load_json_file(path));
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

// Non-finite gaps (an undecided cut has none) serialize as null.
inline nlohmann::json diagnostics_to_json(const SaturationDiagnostics& diag) {
  nlohmann::json decisions = nlohmann::json::array();
  for (const RankDecision& d : diag.decisions) {
    nlohmann::json row = {{"degree", d.degree},
                          {"variable", d.variable},
                          {"stage", d.stage},
                          {"rows", d.rows},
                          {"cols", d.cols},
                          {"rank", d.rank},
                          {"tie_warning", d.tie_warning}};
    row["gap"] = std::isfinite(d.gap) ? nlohmann::json(d.gap)
                                      : nlohmann::json(nullptr);
    decisions.push_back(std::move(row));
  }
  return {{"N", diag.N},
          {"conjectural_bound", diag.conjectural_bound},
          {"gap_warning", diag.gap_warning},
          {"mode",
           diag.mode == ReduceMode::kTruncate ? "truncate" : "surplus"},
          {"decisions", decisions}};
}

inline nlohmann::json saturation_to_json(const SaturationResult& result) {
  return {{"generators", polys_to_json(result.generators)},
          {"diagnostics", diagnostics_to_json(result.diagnostics)}};
}

inline nlohmann::json degree_bound_to_json(const DegreeBound& b) {
  return {{"N", b.n},
          {"conjectural", b.conjectural},
          {"span_guaranteed", b.span_guaranteed},
          {"k_min", b.k_min},
          {"series", b.series}};
}

// Sample matrix, one observation per line, comma-separated variables.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": not a number: '" + cell + "'");
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(
                                       cell[used])))
        ++used;
      if (used != cell.size())
        throw parse_error(path + ":" + std::to_string(line_no) +
                          ": not a number: '" + cell + "'");
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": ragged row, expected " +
                        std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error(path + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)]
                    [static_cast<std::size_t>(j)];
  return m;
}

inline std::vector<EpochData> epochs_from_json(const nlohmann::json& j,
                                               const std::string& path) {
  if (!j.is_array() || j.empty())
    throw parse_error(path + ": expected a non-empty array of epochs");
  std::vector<EpochData> out;
  for (const nlohmann::json& item : j) {
    if (!item.is_object() || !item.contains("mean") ||
        !item.contains("covariance"))
      throw parse_error(path + ": epoch needs fields mean, covariance");
    const nlohmann::json& jm = item["mean"];
    const nlohmann::json& jc = item["covariance"];
    if (!jm.is_array() || !jc.is_array())
      throw parse_error(path + ": mean must be an array, covariance a "
                        "2-D array");
    const Eigen::Index n = static_cast<Eigen::Index>(jm.size());
    Eigen::VectorXd mean(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!jm[static_cast<std::size_t>(i)].is_number())
        throw parse_error(path + ": mean entries must be numbers");
      mean(i) = jm[static_cast<std::size_t>(i)].get<double>();
    }
    if (static_cast<Eigen::Index>(jc.size()) != n)
      throw parse_error(path + ": covariance must be " + std::to_string(n) +
                        " rows");
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const nlohmann::json& jrow = jc[static_cast<std::size_t>(i)];
      if (!jrow.is_array() || static_cast<Eigen::Index>(jrow.size()) != n)
        throw parse_error(path + ": covariance rows must have length " +
                          std::to_string(n));
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!jrow[static_cast<std::size_t>(k)].is_number())
          throw parse_error(path + ": covariance entries must be numbers");
        cov(i, k) = jrow[static_cast<std::size_t>(k)].get<double>();
      }
    }
    try {
      out.push_back(EpochData::from_moments(std::move(mean), std::move(cov)));
    } catch (const std::invalid_argument& ex) {
      throw parse_error(path + ": " + ex.what());
    }
  }
  return out;
}

// Each .json file contributes a list of moment epochs; any other extension
// is one CSV sample matrix per epoch, observations in rows.
inline std::vector<EpochData> read_epochs(
    const std::vector<std::string>& paths) {
  std::vector<EpochData> out;
  for (const std::string& path : paths) {
    const bool json = path.size() >= 5 &&
                      path.compare(path.size() - 5, 5, ".json") == 0;
    if (json) {
      std::vector<EpochData> part =
          epochs_from_json(load_json_file(path), path);
      out.insert(out.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
    } else {
      out.push_back(EpochData::from_samples(read_csv_matrix(path)));
    }
  }
  return out;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "trial,d,sigma,angle_rad,runtime_ms\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.d);
    out += ',';
    out += format_double(r.sigma);
    out += ',';
    out += format_double(r.angle_rad);
    out += ',';
    out += format_double(r.runtime_ms);
    out += '\n';
  }
  return out;
}

// NaN quantiles (an all-failed level) serialize as null.
inline nlohmann::json summary_to_json(
    const std::vector<SweepSummary>& summaries) {
  auto cell = [](double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
  };
  nlohmann::json out = nlohmann::json::array();
  for (const SweepSummary& s : summaries)
    out.push_back({{"sigma", s.sigma},
                   {"q1", cell(s.q1)},
                   {"median", cell(s.median)},
                   {"q3", cell(s.q3)}});
  return out;
}

}  // namespace idealreg
