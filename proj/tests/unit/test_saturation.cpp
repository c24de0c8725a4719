#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "idealreg/errors.hpp"
#include "idealreg/monomials.hpp"
#include "idealreg/polyspace.hpp"
#include "idealreg/rng.hpp"
#include "idealreg/saturation.hpp"
#include "idealreg/series.hpp"

using idealreg::CoeffMatrix;
using idealreg::HomoPoly;
using idealreg::MultiIndex;
using idealreg::RankDecision;
using idealreg::ReduceMode;
using idealreg::Rng;
using idealreg::SaturationResult;
using idealreg::approx_saturation;
using idealreg::build_macaulay;
using idealreg::enumerate_basis;
using idealreg::evaluate;
using idealreg::multiply_by_monomial;
using idealreg::munchhausen;
using idealreg::reduce_degree;
using idealreg::reduce_degree_hom;
using idealreg::simplex_number;

namespace {

HomoPoly poly_times_linear(const HomoPoly& p, const Eigen::VectorXd& g) {
  HomoPoly out = HomoPoly::zero(p.vars, p.degree + 1);
  for (int v = 0; v < p.vars; ++v) {
    if (g(v) == 0.0) continue;
    std::vector<int> e(static_cast<std::size_t>(p.vars), 0);
    e[static_cast<std::size_t>(v)] = 1;
    out.coeffs += g(v) * multiply_by_monomial(p, MultiIndex{e}).coeffs;
  }
  return out;
}

struct ExactInstance {
  Eigen::MatrixXd s_basis;     // d x D orthonormal rows spanning S
  Eigen::MatrixXd perp_basis;  // (D-d) x D orthonormal rows spanning S-perp
  std::vector<HomoPoly> polys;
};

// Quadratics vanishing exactly on S: sums of products of a complement form
// with a random linear form.
ExactInstance exact_quadratics(int D, int d, int n, Rng& rng) {
  Eigen::MatrixXd q = idealreg::random_orthogonal(D, rng);
  ExactInstance inst;
  inst.s_basis = q.transpose().topRows(d);
  inst.perp_basis = q.transpose().bottomRows(D - d);
  for (int i = 0; i < n; ++i) {
    HomoPoly f = HomoPoly::zero(D, 2);
    for (int j = 0; j < D - d; ++j) {
      HomoPoly ell(D, 1, inst.perp_basis.row(j).transpose());
      Eigen::VectorXd g(D);
      for (int v = 0; v < D; ++v) g(v) = rng.gaussian();
      f.coeffs += poly_times_linear(ell, g).coeffs;
    }
    inst.polys.push_back(std::move(f));
  }
  return inst;
}

Eigen::MatrixXd orthonormal_rows(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  double s0 = svd.singularValues()(0);
  Eigen::Index r = 0;
  while (r < svd.singularValues().size() &&
         svd.singularValues()(r) > 1e-12 * s0)
    ++r;
  return svd.matrixV().leftCols(r).transpose();
}

// Largest principal angle between equal-dimension row spans, via the sine
// of the projection residual so tiny angles stay resolvable.
double span_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd ao = orthonormal_rows(a);
  Eigen::MatrixXd bo = orthonormal_rows(b);
  REQUIRE(ao.rows() == bo.rows());
  Eigen::MatrixXd resid = bo - bo * ao.transpose() * ao;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  double s = std::min(1.0, svd.singularValues()(0));
  return std::asin(s);
}

Eigen::MatrixXd generator_matrix(const SaturationResult& res, int degree) {
  std::vector<Eigen::VectorXd> rows;
  for (const HomoPoly& p : res.generators)
    if (p.degree == degree) rows.push_back(p.coeffs);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

}  // namespace

TEST_CASE("degree reduction recovers the quadratic piece exactly") {
  // S = span{(1,1,1)}: complement forms T1-T2 and T2-T3.
  Rng rng(71);
  Eigen::MatrixXd perp(2, 3);
  perp << 1, -1, 0, 0, 1, -1;
  std::vector<HomoPoly> polys;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd combo = perp.transpose() * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
    HomoPoly ell(3, 1, combo);
    Eigen::VectorXd g(3);
    for (int v = 0; v < 3; ++v) g(v) = rng.gaussian();
    polys.push_back(poly_times_linear(ell, g));
  }
  CoeffMatrix q = build_macaulay(polys, 3);
  REQUIRE(q.rows.rows() == 12);
  REQUIRE(q.rows.cols() == 10);

  std::vector<RankDecision> log;
  CoeffMatrix reduced = reduce_degree(q, 1, ReduceMode::kTruncate, &log);
  REQUIRE(reduced.degree == 2);
  REQUIRE(reduced.rows.rows() == 5);  // dim of the quadratic piece

  // Direct quadratic basis: all products of complement forms with variables.
  std::vector<HomoPoly> direct;
  for (int a = 0; a < 2; ++a) {
    HomoPoly ell(3, 1, perp.row(a).transpose());
    for (int v = 0; v < 3; ++v) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
      g(v) = 1.0;
      direct.push_back(poly_times_linear(ell, g));
    }
  }
  Eigen::MatrixXd direct_rows(6, 6);
  for (int i = 0; i < 6; ++i) direct_rows.row(i) = direct[static_cast<std::size_t>(i)].coeffs.transpose();
  REQUIRE(span_angle(reduced.rows, direct_rows) < 1e-9);

  // Documented left-null rank: 12 - 10 + 1 + 6 - 1 = 8 per variable branch.
  int checked = 0;
  for (const RankDecision& dec : log) {
    if (dec.stage == "left-null") {
      REQUIRE(dec.rank == 8);
      REQUIRE(dec.rows == 12);
      REQUIRE(dec.cols == 4);  // degree-3 monomials in the other 2 variables
      ++checked;
    }
  }
  REQUIRE(checked == 3);
}

TEST_CASE("left-null rank formula at the five-quadratics scale") {
  Rng rng(72);
  ExactInstance inst = exact_quadratics(6, 3, 5, rng);
  CoeffMatrix q = build_macaulay(inst.polys, 5);
  REQUIRE(q.rows.rows() == 280);
  std::vector<RankDecision> log;
  reduce_degree(q, 3, ReduceMode::kTruncate, &log);
  for (const RankDecision& dec : log)
    if (dec.stage == "left-null") REQUIRE(dec.rank == 160);
}

TEST_CASE("per-variable column restriction has the predicted rank") {
  // On an exact degree-N span, dropping the columns divisible by T_i leaves
  // rank dim(k) - dim(k-1); the left null space the algorithm asks for is
  // everything else.
  Rng rng(73);
  for (int D = 3; D <= 5; ++D) {
    for (int d = 1; d < D; ++d) {
      std::vector<int> degrees(static_cast<std::size_t>(D + 1), 2);
      idealreg::DegreeBound bound = idealreg::degree_bound(degrees, D, d);
      int k = bound.n;
      if (k < 2 || k > 4) continue;
      ExactInstance inst = exact_quadratics(D, d, D + 1, rng);
      CoeffMatrix q = build_macaulay(inst.polys, k);
      idealreg::MonomialBasis basis = enumerate_basis(D, k);
      std::int64_t want = (simplex_number(k, D) - simplex_number(k, d)) -
                          (simplex_number(k - 1, D) - simplex_number(k - 1, d));
      for (int v = 0; v < D; ++v) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index j = 0; j < basis.size(); ++j)
          if (basis.index_at(j).exponents[static_cast<std::size_t>(v)] == 0)
            keep.push_back(j);
        Eigen::MatrixXd qi(q.rows.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
          qi.col(static_cast<Eigen::Index>(j)) = q.rows.col(keep[j]);
        REQUIRE(idealreg::numerical_rank(qi, 1e-9) == want);
      }
    }
  }
}

TEST_CASE("intermediate rows keep vanishing on the subspace") {
  Rng rng(74);
  ExactInstance inst = exact_quadratics(5, 2, 6, rng);
  std::vector<int> degrees(6, 2);
  int n_bound = idealreg::degree_bound(degrees, 5, 2).n;
  CoeffMatrix q = build_macaulay(inst.polys, n_bound);
  for (int k = n_bound; k >= 2; --k) {
    q = reduce_degree(q, 2, ReduceMode::kTruncate);
    for (int pt = 0; pt < 20; ++pt) {
      Eigen::VectorXd c(2);
      c << rng.gaussian(), rng.gaussian();
      Eigen::VectorXd x = inst.s_basis.transpose() * c;
      for (Eigen::Index r = 0; r < q.rows.rows(); ++r) {
        HomoPoly row(5, q.degree, q.rows.row(r).transpose());
        REQUIRE(std::abs(evaluate(row, x)) < 1e-7 * std::max(1.0, x.norm()));
      }
    }
  }
}

TEST_CASE("degree reduction input validation") {
  Rng rng(75);
  Eigen::MatrixXd small = idealreg::random_gaussian_matrix(5, 10, rng);
  CoeffMatrix q(3, 3, small);
  REQUIRE_THROWS_AS(reduce_degree(q, 1), idealreg::DomainError);  // 5 < 9 rows

  CoeffMatrix linear(3, 1, idealreg::random_gaussian_matrix(4, 3, rng));
  REQUIRE_THROWS_AS(reduce_degree(linear, 1), std::invalid_argument);

  CoeffMatrix ok(3, 2, idealreg::random_gaussian_matrix(8, 6, rng));
  REQUIRE_THROWS_AS(reduce_degree(ok, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(reduce_degree(ok, 3), std::invalid_argument);
}

TEST_CASE("pipeline recovers the complement of span{(1,1,1)}") {
  Rng rng(76);
  Eigen::MatrixXd perp(2, 3);
  perp << 1, -1, 0, 0, 1, -1;
  std::vector<HomoPoly> polys;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd combo =
        perp.transpose() * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
    Eigen::VectorXd g(3);
    for (int v = 0; v < 3; ++v) g(v) = rng.gaussian();
    polys.push_back(poly_times_linear(HomoPoly(3, 1, combo), g));
  }
  SaturationResult res = munchhausen(polys, 1);
  REQUIRE(res.generators.size() == 2);
  Eigen::Vector3d point(1.0, 1.0, 1.0);
  for (const HomoPoly& ell : res.generators) {
    REQUIRE(ell.degree == 1);
    REQUIRE(std::abs(evaluate(ell, point)) < 1e-9);
  }
  Eigen::MatrixXd found = generator_matrix(res, 1);
  REQUIRE(span_angle(found, perp) < 1e-9);
  // Orthonormal output rows.
  REQUIRE((found * found.transpose() - Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("already-linear inputs pass straight through") {
  Eigen::VectorXd t1(2);
  t1 << 1.0, 0.0;
  std::vector<HomoPoly> polys{HomoPoly(2, 1, t1), HomoPoly(2, 1, t1),
                              HomoPoly(2, 1, t1)};
  SaturationResult res = munchhausen(polys, 1);
  REQUIRE(res.diagnostics.N == 1);
  REQUIRE(res.generators.size() == 1);
  REQUIRE_THAT(res.generators[0].coeffs(0),
               Catch::Matchers::WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(res.generators[0].coeffs(1),
               Catch::Matchers::WithinAbs(0.0, 1e-14));
}

TEST_CASE("pipeline preconditions") {
  Rng rng(77);
  ExactInstance inst = exact_quadratics(4, 2, 4, rng);  // n = D, too few
  REQUIRE_THROWS_MATCHES(
      munchhausen(inst.polys, 2), idealreg::DomainError,
      Catch::Matchers::Predicate<idealreg::DomainError>(
          [](const idealreg::DomainError& e) {
            return std::string(e.code()) == "identifiability-violation";
          }));
  ExactInstance ok = exact_quadratics(4, 2, 5, rng);
  REQUIRE_THROWS_AS(munchhausen(ok.polys, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(munchhausen(ok.polys, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(munchhausen({}, 1), std::invalid_argument);
}

TEST_CASE("exact recovery across subspace dimensions at D=10") {
  for (int d : {1, 5, 9}) {
    Rng rng(780 + d);
    ExactInstance inst = exact_quadratics(10, d, 25, rng);
    SaturationResult res = munchhausen(inst.polys, d);
    REQUIRE(res.diagnostics.N == (d <= 7 ? 3 : 2));
    Eigen::MatrixXd found = generator_matrix(res, 1);
    REQUIRE(found.rows() == 10 - d);
    REQUIRE(span_angle(found, inst.perp_basis) < 1e-6);
  }
}

TEST_CASE("single-pivot reduction divides a pure power") {
  Eigen::MatrixXd row(1, 3);
  row << 1.0, 0.0, 0.0;  // T1^2 in two variables
  CoeffMatrix q(2, 2, row);
  CoeffMatrix out = reduce_degree_hom(q, 0, 1e-8);
  REQUIRE(out.degree == 1);
  REQUIRE(out.rows.rows() == 1);
  REQUIRE_THAT(out.rows(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(out.rows(0, 1), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("single-pivot reduction returns empty when nothing divides") {
  Eigen::MatrixXd row(1, 3);
  row << 0.0, 0.0, 1.0;  // T2^2, pivot T1
  CoeffMatrix q(2, 2, row);
  CoeffMatrix out = reduce_degree_hom(q, 0, 1e-8);
  REQUIRE(out.rows.rows() == 0);
  REQUIRE(out.rows.cols() == 2);
}

TEST_CASE("single-pivot reduction agrees with the linear-case step") {
  Rng rng(79);
  ExactInstance inst = exact_quadratics(3, 1, 4, rng);
  CoeffMatrix q = build_macaulay(inst.polys, 3);
  CoeffMatrix fixed_rank = reduce_degree(q, 1);
  for (int pivot = 0; pivot < 3; ++pivot) {
    CoeffMatrix thresholded = reduce_degree_hom(q, pivot, 1e-8);
    REQUIRE(thresholded.rows.rows() == fixed_rank.rows.rows());
    REQUIRE(span_angle(thresholded.rows, fixed_rank.rows) < 1e-9);
  }
}

TEST_CASE("general saturation divides out the pivot from monomial input") {
  // (<T1 T2, T1 T3> : T1) contains T2 and T3.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
  idealreg::MonomialBasis basis = enumerate_basis(3, 2);
  a(basis.position_of(MultiIndex{{1, 1, 0}})) = 1.0;  // T1 T2
  b(basis.position_of(MultiIndex{{1, 0, 1}})) = 1.0;  // T1 T3
  std::vector<HomoPoly> polys{HomoPoly(3, 2, a), HomoPoly(3, 2, b)};
  SaturationResult res = approx_saturation(polys, 2, 1e-8, 0);
  Eigen::MatrixXd linear = generator_matrix(res, 1);
  REQUIRE(linear.rows() == 2);
  Eigen::MatrixXd want(2, 3);
  want << 0, 1, 0, 0, 0, 1;
  REQUIRE(span_angle(linear, want) < 1e-8);
  REQUIRE(generator_matrix(res, 2).rows() == 2);
}

TEST_CASE("general saturation validates input") {
  REQUIRE_THROWS_AS(approx_saturation({}, 2, 1e-8), std::invalid_argument);
  Eigen::VectorXd t1(2);
  t1 << 1.0, 0.0;
  std::vector<HomoPoly> polys{HomoPoly(2, 1, t1)};
  REQUIRE_THROWS_AS(approx_saturation(polys, 1, 1e-8, 5),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(approx_saturation(polys, 1, 0.0), std::invalid_argument);
}

TEST_CASE("general saturation matches the linear pipeline on linear ideals") {
  Rng rng(80);
  for (int c = 0; c < 3; ++c) {
    ExactInstance inst = exact_quadratics(4, 2, 6, rng);
    std::vector<int> degrees(6, 2);
    int n_bound = idealreg::degree_bound(degrees, 4, 2).n;
    SaturationResult lin = munchhausen(inst.polys, 2);
    SaturationResult gen = approx_saturation(inst.polys, n_bound, 1e-8);
    Eigen::MatrixXd lin_rows = generator_matrix(lin, 1);
    Eigen::MatrixXd gen_rows = generator_matrix(gen, 1);
    REQUIRE(gen_rows.rows() == 2);
    REQUIRE(span_angle(gen_rows, lin_rows) < 1e-8);
  }
}

TEST_CASE("diagnostics trace every rank decision") {
  Rng rng(81);
  ExactInstance inst = exact_quadratics(4, 1, 5, rng);
  SaturationResult res = munchhausen(inst.polys, 1);
  REQUIRE(res.diagnostics.N >= 2);
  REQUIRE(!res.diagnostics.conjectural_bound);  // quadratics at D=4
  // Per reduction step: D left-null + D row-span + 1 stack; final extraction.
  std::size_t per_step = 2 * 4 + 1;
  REQUIRE(res.diagnostics.decisions.size() ==
          per_step * static_cast<std::size_t>(res.diagnostics.N - 1) + 1);
  REQUIRE(res.diagnostics.decisions.back().stage == "generators");
}

TEST_CASE("surplus mode is available and audited") {
  Rng rng(82);
  ExactInstance inst = exact_quadratics(4, 1, 5, rng);
  SaturationResult res =
      munchhausen(inst.polys, 1, std::nullopt, ReduceMode::kSurplus);
  REQUIRE(res.diagnostics.mode == ReduceMode::kSurplus);
  REQUIRE(res.generators.size() == 3);
}
