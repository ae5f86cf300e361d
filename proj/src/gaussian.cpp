#include "polent/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polent/errors.hpp"

namespace polent {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = -1e-9;
constexpr double kAngleTol = 1e-9;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

bool angles_match(double a, double b) {
  double d = std::abs(wrap_angle(a) - wrap_angle(b));
  if (d > std::numbers::pi) d = kTwoPi - d;
  return d <= kAngleTol;
}

}  // namespace

bool CoordLabel::matches(const CoordLabel& other) const {
  return beam == other.beam && angles_match(angle, other.angle);
}

FluctuationBasis::FluctuationBasis(std::vector<CoordLabel> labels)
    : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (std::size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i].matches(labels_[j])) {
        throw std::invalid_argument("FluctuationBasis: duplicate label " +
                                    labels_[i].beam);
      }
    }
  }
}

std::size_t FluctuationBasis::index_of(const CoordLabel& want) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].matches(want)) return i;
  }
  throw std::invalid_argument("FluctuationBasis: no coordinate for beam '" +
                              want.beam + "'");
}

bool FluctuationBasis::same_as(const FluctuationBasis& other) const {
  if (labels_.size() != other.labels_.size()) return false;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!labels_[i].matches(other.labels_[i])) return false;
  }
  return true;
}

FluctuationBasis FluctuationBasis::pair_basis(const std::string& beam_a,
                                              const std::string& beam_b,
                                              double theta) {
  const double conj = theta + std::numbers::pi / 2.0;
  return FluctuationBasis({{beam_a, theta},
                           {beam_a, conj},
                           {beam_b, theta},
                           {beam_b, conj}});
}

CovarianceModel::CovarianceModel(FluctuationBasis basis, Eigen::MatrixXd sigma)
    : basis_(std::move(basis)), sigma_(std::move(sigma)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (sigma_.rows() != n || sigma_.cols() != n) {
    throw std::invalid_argument("CovarianceModel: matrix size vs basis size");
  }
  const double asym = (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw std::invalid_argument("CovarianceModel: matrix not symmetric (|A - A^T| = " +
                                std::to_string(asym) + ")");
  }
  sigma_ = ((sigma_ + sigma_.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_,
                                                    Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kPsdTol) {
    throw NumericalError("CovarianceModel: not positive semidefinite (min eigenvalue " +
                         std::to_string(min_eig) + ")");
  }
}

double CovarianceModel::variance_of(const CoordLabel& label) const {
  const auto i = static_cast<Eigen::Index>(basis_.index_of(label));
  return sigma_(i, i);
}

double CovarianceModel::covariance_of(const CoordLabel& a,
                                      const CoordLabel& b) const {
  const auto i = static_cast<Eigen::Index>(basis_.index_of(a));
  const auto j = static_cast<Eigen::Index>(basis_.index_of(b));
  return sigma_(i, j);
}

CovarianceModel CovarianceModel::shot_noise(FluctuationBasis basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  return CovarianceModel(std::move(basis),
                         Eigen::MatrixXd::Identity(n, n));
}

LinearMap::LinearMap(Eigen::MatrixXd matrix, FluctuationBasis input,
                     FluctuationBasis output)
    : m_(std::move(matrix)), in_(std::move(input)), out_(std::move(output)) {
  if (m_.rows() != static_cast<Eigen::Index>(out_.size()) ||
      m_.cols() != static_cast<Eigen::Index>(in_.size())) {
    throw std::invalid_argument("LinearMap: matrix shape vs declared bases");
  }
}

LinearMap LinearMap::compose(const LinearMap& inner) const {
  if (!in_.same_as(inner.out_)) {
    throw std::invalid_argument("LinearMap::compose: bases do not chain");
  }
  return LinearMap(m_ * inner.m_, inner.in_, out_);
}

double LinearMap::orthogonality_residual() const {
  const Eigen::MatrixXd gram = m_ * m_.transpose();
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

LinearMap LinearMap::identity(const FluctuationBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  return LinearMap(Eigen::MatrixXd::Identity(n, n), basis, basis);
}

LinearMap dark_plane_rotation_map(const std::string& beam, DarkPlaneAngle theta,
                                  double delta) {
  FluctuationBasis in({{beam, theta.radians},
                       {beam, theta.conjugate().radians}});
  FluctuationBasis out({{beam, theta.radians + delta},
                        {beam, theta.conjugate().radians + delta}});
  return LinearMap(dark_plane_rotation(delta), std::move(in), std::move(out));
}

LinearMap per_beam_rotation(const FluctuationBasis& basis,
                            const std::map<std::string, double>& deltas) {
  const std::size_t n = basis.size();
  if (n % 2 != 0) {
    throw std::invalid_argument("per_beam_rotation: basis is not paired");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; p += 2) {
    const CoordLabel& first = basis.label(p);
    const CoordLabel& second = basis.label(p + 1);
    if (first.beam != second.beam ||
        !angles_match(second.angle, first.angle + std::numbers::pi / 2.0)) {
      throw std::invalid_argument(
          "per_beam_rotation: expected beam-grouped conjugate pairs");
    }
    double delta = 0.0;
    if (auto it = deltas.find(first.beam); it != deltas.end()) {
      delta = it->second;
    }
    m.block<2, 2>(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) =
        dark_plane_rotation(delta);
  }
  return LinearMap(std::move(m), basis, basis);
}

CovarianceModel propagate(const LinearMap& map, const CovarianceModel& cov) {
  if (!map.input_basis().same_as(cov.basis())) {
    throw std::invalid_argument("propagate: map input basis != covariance basis");
  }
  Eigen::MatrixXd out = map.matrix() * cov.matrix() * map.matrix().transpose();
  // M Sigma M^T is symmetric algebraically; remove the product's rounding
  // asymmetry so the validation tolerance is reserved for caller data.
  out = ((out + out.transpose()) / 2.0).eval();
  return CovarianceModel(map.output_basis(), std::move(out));
}

double combo_variance(const CovarianceModel& cov,
                      const Eigen::VectorXd& weights) {
  if (weights.size() != static_cast<Eigen::Index>(cov.size())) {
    throw std::invalid_argument("combo_variance: weight length vs basis size");
  }
  return weights.dot(cov.matrix() * weights);
}

double normalized_combo_variance(const CovarianceModel& cov,
                                 const Eigen::VectorXd& weights) {
  const double shot_reference = weights.squaredNorm();
  if (shot_reference == 0.0) {
    throw std::domain_error(
        "normalized_combo_variance: all-zero weights have no shot reference");
  }
  return combo_variance(cov, weights) / shot_reference;
}

}  // namespace polent
