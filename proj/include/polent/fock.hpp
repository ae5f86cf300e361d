#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "polent/stokes.hpp"

namespace polent::fock {

/// Two bosonic modes, each truncated at n_max photons. Basis ordering is
/// row-major over (n_x, n_y): index = n_x * (n_max + 1) + n_y.
struct TruncatedTwoModeSpace {
  int n_max = 1;

  /// Throws std::invalid_argument outside 1 <= n_max <= 32 (dense oracle
  /// scale, not production scale).
  explicit TruncatedTwoModeSpace(int n);

  int levels() const noexcept { return n_max + 1; }
  int dim() const noexcept { return levels() * levels(); }
  int index(int n_x, int n_y) const noexcept { return n_x * levels() + n_y; }

  /// Total photon number of basis state i.
  int total_photons(int i) const noexcept {
    return i / levels() + i % levels();
  }
};

/// The four Stokes operators assembled from truncated creation/annihilation
/// matrices. All four are Hermitian to 1e-12 by construction (validated).
struct StokesMatrices {
  Eigen::MatrixXcd s0;
  Eigen::MatrixXcd s1;
  Eigen::MatrixXcd s2;
  Eigen::MatrixXcd s3;

  /// cos(theta) S1 + sin(theta) S2.
  Eigen::MatrixXcd dark_plane(double theta) const;
};

StokesMatrices build_stokes_matrices(const TruncatedTwoModeSpace& space);

/// Max-norm of [S_k, S_l] - 2i eps_klm S_m restricted to the protected
/// subspace n_x + n_y <= n_max - 1, where the truncated algebra is exact.
/// (k, l, m) must be a permutation of (1, 2, 3); eps is its sign.
double commutator_residual(const TruncatedTwoModeSpace& space, int k, int l,
                           int m);

/// Max-norm of [S0, S_k] on the protected subspace, k in {1, 2, 3}.
double s0_commutator_residual(const TruncatedTwoModeSpace& space, int k);

/// Normalized truncated two-mode coherent state with a_x = alpha / sqrt(2),
/// a_y = i alpha / sqrt(2) (fully circular carrier, <S3> = |alpha|^2).
/// Refuses (TruncationError) when the per-mode Poisson tail above n_max
/// reaches 1e-6, so that expectation values are trustworthy.
Eigen::VectorXcd circular_coherent_state(std::complex<double> alpha,
                                         const TruncatedTwoModeSpace& space);

StokesMean stokes_means(const StokesMatrices& ops,
                        const Eigen::VectorXcd& state);

struct CoherentDarkPlaneResult {
  double variance = 0.0;   // exact Delta^2 S(theta) on the truncated state
  double s3_abs = 0.0;     // |<S3>|, the shot-noise reference
  /// variance / |<S3>|; absent when the carrier vanishes and the
  /// normalization is degenerate.
  std::optional<double> shot_ratio;
};

/// Exact dark-plane variance of the circular coherent state, which
/// establishes the shot-noise reference "variance = |<S3>|" used by the
/// Gaussian model. Precondition |alpha|^2 <= n_max / 4 (tail negligibility).
CoherentDarkPlaneResult coherent_dark_plane_variance(
    std::complex<double> alpha, double theta,
    const TruncatedTwoModeSpace& space);

}  // namespace polent::fock
