#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "polent/stokes.hpp"

namespace polent {

/// One dark-plane Stokes fluctuation coordinate: which beam, which direction.
struct CoordLabel {
  std::string beam;
  double angle = 0.0;  // dark-plane direction, radians

  bool matches(const CoordLabel& other) const;
};

/// Ordered basis of fluctuation coordinates. The standard input basis is
/// [A(theta_sq), A(theta_sq+pi/2), B(theta_sq), B(theta_sq+pi/2)].
class FluctuationBasis {
 public:
  FluctuationBasis() = default;
  /// Throws std::invalid_argument on duplicate labels.
  explicit FluctuationBasis(std::vector<CoordLabel> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const CoordLabel& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<CoordLabel>& labels() const noexcept { return labels_; }

  /// Index of the coordinate matching `want` (beam equal, angle equal up to
  /// wrapping tolerance). Throws std::invalid_argument if absent.
  std::size_t index_of(const CoordLabel& want) const;

  bool same_as(const FluctuationBasis& other) const;

  /// [A(theta), A(theta+pi/2), B(theta), B(theta+pi/2)] for beams a/b.
  static FluctuationBasis pair_basis(const std::string& beam_a,
                                     const std::string& beam_b, double theta);

 private:
  std::vector<CoordLabel> labels_;
};

/// Zero-mean Gaussian model of dark-plane Stokes fluctuations: a symmetric
/// positive-semidefinite matrix in shot-noise units over an ordered basis.
/// Dark-plane means vanish identically, so only second moments are carried.
class CovarianceModel {
 public:
  /// Validates symmetry to 1e-12 (std::invalid_argument) and positive
  /// semidefiniteness to -1e-9 on the smallest eigenvalue (NumericalError),
  /// then stores the exactly symmetrized matrix.
  CovarianceModel(FluctuationBasis basis, Eigen::MatrixXd sigma);

  const FluctuationBasis& basis() const noexcept { return basis_; }
  const Eigen::MatrixXd& matrix() const noexcept { return sigma_; }
  std::size_t size() const noexcept { return basis_.size(); }

  double variance_of(const CoordLabel& label) const;
  double covariance_of(const CoordLabel& a, const CoordLabel& b) const;

  /// Identity covariance: independent coherent (shot-noise) coordinates.
  static CovarianceModel shot_noise(FluctuationBasis basis);

 private:
  FluctuationBasis basis_;
  Eigen::MatrixXd sigma_;
};

/// Real linear map between fluctuation coordinate systems (beam splitters,
/// dark-plane rotations, gain networks).
class LinearMap {
 public:
  /// Throws std::invalid_argument if matrix dimensions disagree with bases.
  LinearMap(Eigen::MatrixXd matrix, FluctuationBasis input,
            FluctuationBasis output);

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  const FluctuationBasis& input_basis() const noexcept { return in_; }
  const FluctuationBasis& output_basis() const noexcept { return out_; }

  /// this(other(x)); bases must chain.
  LinearMap compose(const LinearMap& inner) const;

  /// Max-norm of M * M^T - I; 0 for orthogonal maps.
  double orthogonality_residual() const;

  static LinearMap identity(const FluctuationBasis& basis);

 private:
  Eigen::MatrixXd m_;
  FluctuationBasis in_;
  FluctuationBasis out_;
};

/// Labeled dark-plane rotation for one beam: coordinates
/// (S(theta), S(theta+pi/2)) -> (S(theta+delta), S(theta+delta+pi/2)).
LinearMap dark_plane_rotation_map(const std::string& beam, DarkPlaneAngle theta,
                                  double delta);

/// Block-diagonal map applying a dark-plane rotation per beam to a basis of
/// conjugate coordinate pairs (beam-grouped, angles pi/2 apart). Beams
/// without an entry in `deltas` get delta = 0. Output labels are unchanged:
/// the rotated coordinates land in the original measurement slots.
LinearMap per_beam_rotation(const FluctuationBasis& basis,
                            const std::map<std::string, double>& deltas);

/// M * Sigma * M^T with basis bookkeeping. Basis mismatch throws
/// std::invalid_argument; a PSD violation beyond tolerance in the result
/// throws NumericalError.
CovarianceModel propagate(const LinearMap& map, const CovarianceModel& cov);

/// w^T Sigma w (unnormalized). Weight length must equal the basis size.
double combo_variance(const CovarianceModel& cov, const Eigen::VectorXd& weights);

/// w^T Sigma w / sum_i w_i^2: the measured combination in shot-noise units
/// (each unit weight contributes one unit of shot noise to the reference).
/// All-zero weights throw std::domain_error.
double normalized_combo_variance(const CovarianceModel& cov,
                                 const Eigen::VectorXd& weights);

}  // namespace polent
