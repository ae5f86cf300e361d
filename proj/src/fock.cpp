#include "polent/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "polent/errors.hpp"

namespace polent::fock {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

constexpr double kHermitianTol = 1e-12;
constexpr double kTailThreshold = 1e-6;

MatrixXcd annihilation(int levels) {
  MatrixXcd a = MatrixXcd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void require_hermitian(const MatrixXcd& m, const char* name) {
  const double residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (residual > kHermitianTol) {
    throw NumericalError(std::string("build_stokes_matrices: ") + name +
                         " not Hermitian, residual " + std::to_string(residual));
  }
}

// Max |entry| over rows and columns inside the protected subspace
// n_x + n_y <= n_max - 1.
double protected_max_norm(const MatrixXcd& m,
                          const TruncatedTwoModeSpace& space) {
  double worst = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    if (space.total_photons(i) > space.n_max - 1) continue;
    for (int j = 0; j < space.dim(); ++j) {
      if (space.total_photons(j) > space.n_max - 1) continue;
      worst = std::max(worst, std::abs(m(i, j)));
    }
  }
  return worst;
}

// Truncated single-mode coherent amplitudes; refuses when the Poisson tail
// above n_max reaches the threshold.
Eigen::VectorXcd coherent_amplitudes(cd alpha, int n_max) {
  Eigen::VectorXcd c(n_max + 1);
  const double mean = std::norm(alpha);
  double kept_probability = 0.0;
  c[0] = std::exp(-mean / 2.0);
  kept_probability += std::norm(c[0]);
  for (int n = 1; n <= n_max; ++n) {
    c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    kept_probability += std::norm(c[n]);
  }
  const double tail = 1.0 - kept_probability;
  if (tail >= kTailThreshold) {
    throw TruncationError("coherent state tail mass " + std::to_string(tail) +
                          " above n_max = " + std::to_string(n_max) +
                          " exceeds 1e-6");
  }
  return c;
}

double expectation(const MatrixXcd& op, const VectorXcd& psi) {
  return (psi.adjoint() * op * psi)(0, 0).real();
}

}  // namespace

TruncatedTwoModeSpace::TruncatedTwoModeSpace(int n) : n_max(n) {
  if (n < 1 || n > 32) {
    throw std::invalid_argument(
        "TruncatedTwoModeSpace: n_max must be in [1, 32]");
  }
}

Eigen::MatrixXcd StokesMatrices::dark_plane(double theta) const {
  return std::cos(theta) * s1 + std::sin(theta) * s2;
}

StokesMatrices build_stokes_matrices(const TruncatedTwoModeSpace& space) {
  const int levels = space.levels();
  const MatrixXcd eye = MatrixXcd::Identity(levels, levels);
  const MatrixXcd a = annihilation(levels);
  const MatrixXcd a_x = kron(a, eye);
  const MatrixXcd a_y = kron(eye, a);

  StokesMatrices ops;
  const MatrixXcd n_x = a_x.adjoint() * a_x;
  const MatrixXcd n_y = a_y.adjoint() * a_y;
  ops.s0 = n_x + n_y;
  ops.s1 = n_x - n_y;
  ops.s2 = a_x.adjoint() * a_y + a_y.adjoint() * a_x;
  ops.s3 = cd(0.0, 1.0) * (a_y.adjoint() * a_x - a_x.adjoint() * a_y);

  require_hermitian(ops.s0, "S0");
  require_hermitian(ops.s1, "S1");
  require_hermitian(ops.s2, "S2");
  require_hermitian(ops.s3, "S3");
  return ops;
}

double commutator_residual(const TruncatedTwoModeSpace& space, int k, int l,
                           int m) {
  // Permutation sign of (k, l, m) over (1, 2, 3); rejects repeats.
  const bool valid = (k >= 1 && k <= 3) && (l >= 1 && l <= 3) &&
                     (m >= 1 && m <= 3) && (k != l) && (l != m) && (k != m);
  if (!valid) {
    throw std::invalid_argument(
        "commutator_residual: (k, l, m) must be a permutation of (1, 2, 3)");
  }
  const bool cyclic = (k == 1 && l == 2 && m == 3) ||
                      (k == 2 && l == 3 && m == 1) ||
                      (k == 3 && l == 1 && m == 2);
  const double eps = cyclic ? 1.0 : -1.0;

  const StokesMatrices ops = build_stokes_matrices(space);
  const MatrixXcd* s[4] = {&ops.s0, &ops.s1, &ops.s2, &ops.s3};
  const MatrixXcd lhs = (*s[k]) * (*s[l]) - (*s[l]) * (*s[k]);
  const MatrixXcd residual = lhs - cd(0.0, 2.0 * eps) * (*s[m]);
  return protected_max_norm(residual, space);
}

double s0_commutator_residual(const TruncatedTwoModeSpace& space, int k) {
  if (k < 1 || k > 3) {
    throw std::invalid_argument("s0_commutator_residual: k must be 1, 2 or 3");
  }
  const StokesMatrices ops = build_stokes_matrices(space);
  const MatrixXcd* s[4] = {&ops.s0, &ops.s1, &ops.s2, &ops.s3};
  const MatrixXcd residual = ops.s0 * (*s[k]) - (*s[k]) * ops.s0;
  return protected_max_norm(residual, space);
}

Eigen::VectorXcd circular_coherent_state(std::complex<double> alpha,
                                         const TruncatedTwoModeSpace& space) {
  const cd alpha_x = alpha / std::sqrt(2.0);
  const cd alpha_y = cd(0.0, 1.0) * alpha / std::sqrt(2.0);
  const VectorXcd cx = coherent_amplitudes(alpha_x, space.n_max);
  const VectorXcd cy = coherent_amplitudes(alpha_y, space.n_max);

  VectorXcd psi(space.dim());
  for (int nx = 0; nx < space.levels(); ++nx) {
    for (int ny = 0; ny < space.levels(); ++ny) {
      psi[space.index(nx, ny)] = cx[nx] * cy[ny];
    }
  }
  psi.normalize();
  return psi;
}

StokesMean stokes_means(const StokesMatrices& ops,
                        const Eigen::VectorXcd& state) {
  return StokesMean{expectation(ops.s0, state), expectation(ops.s1, state),
                    expectation(ops.s2, state), expectation(ops.s3, state)};
}

CoherentDarkPlaneResult coherent_dark_plane_variance(
    std::complex<double> alpha, double theta,
    const TruncatedTwoModeSpace& space) {
  if (std::norm(alpha) > static_cast<double>(space.n_max) / 4.0) {
    throw std::invalid_argument(
        "coherent_dark_plane_variance: |alpha|^2 must be <= n_max / 4");
  }
  const VectorXcd psi = circular_coherent_state(alpha, space);
  const StokesMatrices ops = build_stokes_matrices(space);
  const MatrixXcd observable = ops.dark_plane(theta);

  const double mean = expectation(observable, psi);
  const double second_moment = expectation(observable * observable, psi);

  CoherentDarkPlaneResult result;
  result.variance = second_moment - mean * mean;
  result.s3_abs = std::abs(expectation(ops.s3, psi));
  if (result.s3_abs > 1e-9) {
    result.shot_ratio = result.variance / result.s3_abs;
  }
  return result;
}

}  // namespace polent::fock
