#pragma once

// Stationary-subspace estimation end to end: cumulant differences across
// epochs feed the degree-descent pipeline, whose degree-1 generators cut out
// the subspace on which all epochs share their marginals.  Also the
// principal-angle metric and the synthetic benchmark generator.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "idealreg/cumulants.hpp"
#include "idealreg/errors.hpp"
#include "idealreg/log.hpp"
#include "idealreg/rng.hpp"
#include "idealreg/saturation.hpp"

namespace idealreg {

struct SubspaceEstimate {
  Eigen::MatrixXd complement_basis;  // (D-d) x D, orthonormal rows
  Eigen::MatrixXd subspace_basis;    // d x D, orthonormal null of the above
  Eigen::MatrixXd projection;        // d x D, rows of subspace_basis
  SaturationDiagnostics diagnostics;
};

// Largest principal angle between equal-dimensional row spans, in [0, pi/2].
// Small angles come from the sine of the projection residual, which stays
// accurate where the cosine saturates at 1.
inline double subspace_angle(const Eigen::MatrixXd& u,
                             const Eigen::MatrixXd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw std::invalid_argument("subspace_angle: shape mismatch");
  if (u.rows() < 1 || u.rows() > u.cols())
    throw std::invalid_argument("subspace_angle: need a k x D basis, k <= D");

  auto orthonormalize = [](const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0))
      throw std::invalid_argument("subspace_angle: rank-deficient basis");
    return Eigen::MatrixXd(svd.matrixV().leftCols(a.rows()).transpose());
  };
  Eigen::MatrixXd a = orthonormalize(u);
  Eigen::MatrixXd b = orthonormalize(v);

  Eigen::JacobiSVD<Eigen::MatrixXd> overlap(a * b.transpose());
  double cos_max =
      std::clamp(overlap.singularValues().minCoeff(), 0.0, 1.0);
  if (cos_max < 0.7) return std::acos(cos_max);

  Eigen::MatrixXd residual = b - (b * a.transpose()) * a;
  Eigen::JacobiSVD<Eigen::MatrixXd> res_svd(residual);
  double sin_max = std::clamp(res_svd.singularValues()(0), 0.0, 1.0);
  return std::asin(sin_max);
}

// Cumulant differences -> degree descent -> linear generators; the estimated
// subspace is their common zero set.  Exactly-zero difference polynomials
// (identical means, say) carry no constraint and are dropped.
inline SubspaceEstimate estimate_projection(
    const std::vector<EpochData>& epochs, int d,
    std::vector<int> orders = {2},
    PairScheme scheme = PairScheme::kLastReference) {
  const int D = epochs.empty() ? 0 : epochs.front().dim();
  if (d < 1 || d > D - 1)
    throw std::invalid_argument("estimate_projection: need 1 <= d <= D-1");

  std::vector<HomoPoly> diffs =
      difference_polynomials(epochs, std::move(orders), scheme);
  if (static_cast<int>(diffs.size()) <= D)
    throw identifiability_violation(
        "estimate_projection: " + std::to_string(diffs.size()) +
        " difference polynomials for " + std::to_string(D) +
        " variables; need at least D+1");
  std::vector<HomoPoly> polys;
  polys.reserve(diffs.size());
  for (HomoPoly& f : diffs)
    if (!f.is_zero()) polys.push_back(std::move(f));
  if (polys.empty())
    throw degenerate_input(
        "estimate_projection: all difference polynomials vanish");

  SaturationResult sat = munchhausen(polys, d);

  SubspaceEstimate est;
  est.diagnostics = std::move(sat.diagnostics);
  est.complement_basis = Eigen::MatrixXd(D - d, D);
  for (Eigen::Index i = 0; i < est.complement_basis.rows(); ++i)
    est.complement_basis.row(i) =
        sat.generators[static_cast<std::size_t>(i)].coeffs.transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(est.complement_basis,
                                        Eigen::ComputeFullV);
  est.subspace_basis = svd.matrixV().rightCols(d).transpose();
  detail::fix_row_signs(est.subspace_basis);
  est.projection = est.subspace_basis;
  return est;
}

struct SimulationConfig {
  int D = 10;
  int d = 0;  // 0 draws d uniformly from 1..D-1
  int epochs = 26;
  double sigma = 0.0;
  int trials = 1;
  std::uint64_t seed = 0xC0FFEE;
};

struct SyntheticInstance {
  std::vector<EpochData> epochs;
  Eigen::MatrixXd truth;  // d x D orthonormal basis of the stationary subspace
  int d = 0;
};

namespace detail {

// One benchmark instance before noise is applied: epoch covariances share
// their restriction to the subspace and are generic elsewhere, plus one
// symmetric noise direction per epoch whose scale the caller picks later.
struct SyntheticSkeleton {
  int D = 0;
  int d = 0;
  Eigen::MatrixXd truth;
  std::vector<Eigen::MatrixXd> base_cov;
  std::vector<Eigen::MatrixXd> noise_dir;

  std::vector<EpochData> materialize(double sigma) const {
    std::vector<EpochData> epochs;
    epochs.reserve(base_cov.size());
    for (std::size_t i = 0; i < base_cov.size(); ++i) {
      Eigen::MatrixXd cov = base_cov[i];
      if (sigma > 0.0) {
        cov += sigma * noise_dir[i];
        // Back into the positive-definite cone.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(1e-6);
        cov = eig.eigenvectors() * lambda.asDiagonal() *
              eig.eigenvectors().transpose();
      }
      cov = (0.5 * (cov + cov.transpose())).eval();
      epochs.push_back(
          EpochData::from_moments(Eigen::VectorXd::Zero(D), std::move(cov)));
    }
    return epochs;
  }
};

inline SyntheticSkeleton make_skeleton(const SimulationConfig& cfg, Rng rng) {
  if (cfg.D < 2) throw std::invalid_argument("generate_synthetic: D >= 2");
  if (cfg.d < 0 || cfg.d > cfg.D - 1)
    throw std::invalid_argument("generate_synthetic: need 1 <= d <= D-1 or 0");
  if (cfg.epochs < 2)
    throw std::invalid_argument("generate_synthetic: need >= 2 epochs");
  if (!(cfg.sigma >= 0.0))
    throw std::invalid_argument("generate_synthetic: sigma >= 0");

  SyntheticSkeleton sk;
  sk.D = cfg.D;
  sk.d = cfg.d > 0 ? cfg.d
                   : static_cast<int>(rng.uniform_int(1, cfg.D - 1));
  const int D = sk.D, d = sk.d;

  Eigen::MatrixXd b = random_orthogonal(D, rng);
  sk.truth = b.topRows(d);

  // Shared restriction to the subspace; epoch blocks generic but bounded.
  Eigen::MatrixXd c_shared = random_spd(d, 0.5, 2.0, rng);
  Eigen::MatrixXd c_inv = c_shared.inverse();

  for (int i = 0; i < cfg.epochs; ++i) {
    Eigen::MatrixXd g = 0.3 * random_gaussian_matrix(d, D - d, rng);
    Eigen::MatrixXd h = random_spd(D - d, 0.5, 2.0, rng);
    // Schur complement of the subspace block stays positive-definite.
    h += g.transpose() * c_inv * g;

    Eigen::MatrixXd block(D, D);
    block.topLeftCorner(d, d) = c_shared;
    block.topRightCorner(d, D - d) = g;
    block.bottomLeftCorner(D - d, d) = g.transpose();
    block.bottomRightCorner(D - d, D - d) = h;
    sk.base_cov.push_back(b.transpose() * block * b);

    Eigen::MatrixXd e = random_gaussian_matrix(D, D, rng);
    sk.noise_dir.push_back(0.5 * (e + e.transpose()));
  }
  return sk;
}

}  // namespace detail

inline SyntheticInstance generate_synthetic(const SimulationConfig& cfg) {
  detail::SyntheticSkeleton sk = detail::make_skeleton(cfg, Rng(cfg.seed));
  SyntheticInstance inst;
  inst.epochs = sk.materialize(cfg.sigma);
  inst.truth = std::move(sk.truth);
  inst.d = sk.d;
  return inst;
}

struct SweepRow {
  int trial = 0;
  int d = 0;
  double sigma = 0.0;
  double angle_rad = 0.0;
  double runtime_ms = 0.0;
};

struct SweepSummary {
  double sigma = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Noise sweep over seeded trials.  Rows come back sigma-major, trial-minor.
// Each trial draws one instance from substream(seed, trial) and reuses it
// for every noise level, so a level only changes the disturbance scale; the
// ordering and values are independent of the thread count.  Runtimes are
// reported as zero unless timing is requested, keeping output byte-stable.
inline std::vector<SweepRow> run_sweep(const SimulationConfig& base,
                                       const std::vector<double>& sigmas,
                                       int jobs = 1, bool timing = false) {
  if (base.trials < 0)
    throw std::invalid_argument("run_sweep: trials must be >= 0");
  if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");
  for (double s : sigmas)
    if (!(s >= 0.0))
      throw std::invalid_argument("run_sweep: sigma must be >= 0");

  const std::size_t cells = sigmas.size() * static_cast<std::size_t>(base.trials);
  std::vector<SweepRow> rows(cells);
  if (cells == 0) return rows;

  std::atomic<int> next_trial{0};
  auto worker = [&]() {
    for (;;) {
      const int trial = next_trial.fetch_add(1);
      if (trial >= base.trials) return;
      detail::SyntheticSkeleton sk = detail::make_skeleton(
          base, substream(base.seed, static_cast<std::uint64_t>(trial)));
      for (std::size_t si = 0; si < sigmas.size(); ++si) {
        SweepRow row;
        row.trial = trial;
        row.d = sk.d;
        row.sigma = sigmas[si];
        const auto start = std::chrono::steady_clock::now();
        try {
          std::vector<EpochData> epochs = sk.materialize(sigmas[si]);
          SubspaceEstimate est = estimate_projection(epochs, sk.d);
          row.angle_rad = subspace_angle(est.subspace_basis, sk.truth);
        } catch (const std::exception& ex) {
          log_error("sweep trial %d sigma %g failed: %s", trial,
                    sigmas[si], ex.what());
          row.angle_rad = std::numeric_limits<double>::quiet_NaN();
        }
        if (timing) {
          row.runtime_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        }
        rows[si * static_cast<std::size_t>(base.trials) +
             static_cast<std::size_t>(trial)] = row;
      }
    }
  };

  const int threads = std::min(jobs, std::max(base.trials, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

// Quartiles with linear interpolation between order statistics.
inline std::vector<SweepSummary> summarize_sweep(
    const std::vector<SweepRow>& rows, const std::vector<double>& sigmas) {
  auto quantile = [](std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
  };

  std::vector<SweepSummary> out;
  out.reserve(sigmas.size());
  for (double s : sigmas) {
    std::vector<double> angles;
    for (const SweepRow& r : rows)
      if (r.sigma == s && std::isfinite(r.angle_rad))
        angles.push_back(r.angle_rad);
    std::sort(angles.begin(), angles.end());
    SweepSummary sum;
    sum.sigma = s;
    sum.q1 = quantile(angles, 0.25);
    sum.median = quantile(angles, 0.5);
    sum.q3 = quantile(angles, 0.75);
    out.push_back(sum);
  }
  return out;
}

}  // namespace idealreg
