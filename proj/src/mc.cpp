#include "polent/mc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "polent/errors.hpp"

namespace polent::mc {

namespace detail {

std::uint64_t splitmix64_at(std::uint64_t stream, std::uint64_t i) {
  std::uint64_t z = stream + (i + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t shard_stream(std::uint64_t seed, std::uint64_t shard) {
  return splitmix64_at(seed, shard);
}

double to_unit_interval(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

namespace {

// Box-Muller pair from two counter positions of the stream.
inline void gauss_pair(std::uint64_t stream, std::uint64_t counter, double& z0,
                       double& z1) {
  const double u1 = to_unit_interval(splitmix64_at(stream, counter));
  const double u2 = to_unit_interval(splitmix64_at(stream, counter + 1));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(phase);
  z1 = radius * std::sin(phase);
}

}  // namespace

double shard_second_moment(std::uint64_t stream, long long count,
                           const Eigen::MatrixXd& factor,
                           const Eigen::MatrixXd& map,
                           const Eigen::VectorXd& weights) {
  const Eigen::Index n = factor.cols();
  // Fold w . M into one output functional; samples are still drawn in the
  // full input space and pushed through it.
  const Eigen::VectorXd folded = map.transpose() * weights;
  Eigen::VectorXd z(n);
  const auto normals_per_sample =
      static_cast<std::uint64_t>(n + (n % 2));  // Box-Muller draws in pairs
  double sum = 0.0;
  for (long long s = 0; s < count; ++s) {
    std::uint64_t counter = static_cast<std::uint64_t>(s) * normals_per_sample;
    for (Eigen::Index k = 0; k < n; k += 2) {
      double z0 = 0.0;
      double z1 = 0.0;
      gauss_pair(stream, counter + static_cast<std::uint64_t>(k), z0, z1);
      z[k] = z0;
      if (k + 1 < n) z[k + 1] = z1;
    }
    const double projected = folded.dot(factor * z);
    sum += projected * projected;
  }
  return sum;
}

}  // namespace detail

Eigen::MatrixXd psd_factor(const CovarianceModel& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalError("psd_factor: eigendecomposition failed");
  }
  Eigen::VectorXd vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-9) {
      throw NumericalError("psd_factor: eigenvalue " + std::to_string(vals[i]) +
                           " below tolerance");
    }
    if (vals[i] < 0.0) vals[i] = 0.0;
  }
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

double empirical_combo_second_moment(const Eigen::MatrixXd& factor,
                                     const Eigen::MatrixXd& map,
                                     const Eigen::VectorXd& weights,
                                     const McConfig& cfg, Exec exec) {
  if (cfg.samples < 10'000) {
    throw std::invalid_argument("McConfig: samples must be >= 10000");
  }
  const long long n_shards =
      (cfg.samples + detail::kShardSize - 1) / detail::kShardSize;
  std::vector<double> partial(static_cast<std::size_t>(n_shards), 0.0);

  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (long long shard = 0; shard < n_shards; ++shard) {
      const long long lo = shard * detail::kShardSize;
      const long long count = std::min(detail::kShardSize, cfg.samples - lo);
      partial[static_cast<std::size_t>(shard)] = detail::shard_second_moment(
          detail::shard_stream(cfg.seed, static_cast<std::uint64_t>(shard)),
          count, factor, map, weights);
    }
  } else {
    for (long long shard = 0; shard < n_shards; ++shard) {
      const long long lo = shard * detail::kShardSize;
      const long long count = std::min(detail::kShardSize, cfg.samples - lo);
      partial[static_cast<std::size_t>(shard)] = detail::shard_second_moment(
          detail::shard_stream(cfg.seed, static_cast<std::uint64_t>(shard)),
          count, factor, map, weights);
    }
  }

  // Merge in shard order; the summation order is part of the determinism
  // contract.
  double total = 0.0;
  for (long long shard = 0; shard < n_shards; ++shard) {
    total += partial[static_cast<std::size_t>(shard)];
  }
  return total / static_cast<double>(cfg.samples);
}

McReport mc_validate(const CovarianceModel& cov, const LinearMap& map,
                     const Eigen::VectorXd& weights, const McConfig& cfg,
                     Exec exec) {
  const Eigen::MatrixXd factor = psd_factor(cov);
  const double shot_reference = weights.squaredNorm();
  if (shot_reference == 0.0) {
    throw std::domain_error("mc_validate: all-zero weights");
  }

  McReport report;
  report.analytic = normalized_combo_variance(propagate(map, cov), weights);
  report.empirical =
      empirical_combo_second_moment(factor, map.matrix(), weights, cfg, exec) /
      shot_reference;

  // Var of the known-mean second-moment estimator is 2 sigma^4 / N.
  const double scale = std::max(report.analytic, 1e-300);
  const double standard_error =
      scale * std::sqrt(2.0 / static_cast<double>(cfg.samples));
  report.z_score = (report.empirical - report.analytic) / standard_error;
  return report;
}

}  // namespace polent::mc
