#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "polent/gaussian.hpp"

namespace polent::mc {

/// Monte Carlo settings. `samples` must be >= 10000; the seed is recorded in
/// every report file so runs can be replayed bit-exactly.
struct McConfig {
  long long samples = 1'000'000;
  std::uint64_t seed = 0;
};

/// Which orchestration runs the shard loop. Both produce bit-identical
/// results for the same seed; `serial` is the reference implementation kept
/// for testing and benchmarking the OpenMP kernel.
enum class Exec { serial, openmp };

struct McReport {
  double analytic = 0.0;    // closed-form normalized combo variance
  double empirical = 0.0;   // sampled normalized combo variance
  double z_score = 0.0;     // (empirical - analytic) / SE(empirical)
};

/// Symmetric factor F with F * F^T = Sigma via eigendecomposition.
/// Eigenvalues in [-1e-9, 0) are clamped to zero; anything lower throws
/// NumericalError (a rounding artifact is tolerated, a modeling bug is not).
Eigen::MatrixXd psd_factor(const CovarianceModel& cov);

/// Mean of (w . M x)^2 over `samples` draws x ~ N(0, F F^T), the known-zero-mean
/// second-moment estimator. Deterministic for a fixed seed regardless of Exec
/// and thread count: samples are split into fixed-size shards, each shard's
/// substream is derived from (seed, shard index), and partial sums are merged
/// in shard order.
double empirical_combo_second_moment(const Eigen::MatrixXd& factor,
                                     const Eigen::MatrixXd& map,
                                     const Eigen::VectorXd& weights,
                                     const McConfig& cfg,
                                     Exec exec = Exec::openmp);

/// Closed form vs sampled normalized combo variance for `weights` on the
/// output of `map` applied to `cov`, with agreement expressed as a z-score
/// against the estimator's standard error sqrt(2/N) * analytic.
McReport mc_validate(const CovarianceModel& cov, const LinearMap& map,
                     const Eigen::VectorXd& weights, const McConfig& cfg,
                     Exec exec = Exec::openmp);

namespace detail {

/// splitmix64 output for counter i of `stream`. Counter-based: the k-th
/// output is a pure function of (stream, k), which is what makes shard
/// substreams reproducible and order-independent.
std::uint64_t splitmix64_at(std::uint64_t stream, std::uint64_t i);

/// Substream identifier for one shard of one seeded run.
std::uint64_t shard_stream(std::uint64_t seed, std::uint64_t shard);

/// Uniform double in (0, 1] from 53 bits of x.
double to_unit_interval(std::uint64_t x);

constexpr long long kShardSize = 8192;

/// Sum of (w . M F z)^2 over the `count` samples of one shard; pure in
/// (stream, count) and the matrices, hence identical under any scheduling.
double shard_second_moment(std::uint64_t stream, long long count,
                           const Eigen::MatrixXd& factor,
                           const Eigen::MatrixXd& map,
                           const Eigen::VectorXd& weights);

}  // namespace detail

}  // namespace polent::mc
