#include "polent/entangle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "polent/errors.hpp"

namespace polent {

namespace {

constexpr double kPhaseTol = 1e-12;
constexpr double kMapTol = 1e-12;
constexpr double kAngleMatchTol = 1e-9;

void require_pi_half_phase(const BeamSplitterSpec& bs) {
  if (std::abs(bs.relative_phase - std::numbers::pi / 2.0) > kPhaseTol) {
    throw UnsupportedConfigError(
        "beam splitter: only the locked pi/2 relative phase is modeled");
  }
}

FluctuationBasis output_basis(double theta_sq) {
  return FluctuationBasis::pair_basis("C", "D", theta_sq);
}

}  // namespace

BeamSplitterSpec::BeamSplitterSpec(double transmittance, double phase)
    : t(transmittance), relative_phase(phase) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("BeamSplitterSpec: t must lie in [0, 1]");
  }
}

void DetectionImperfections::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(efficiency_c) || !in_unit(efficiency_d)) {
    throw std::invalid_argument("DetectionImperfections: efficiency outside [0, 1]");
  }
  if (!in_unit(visibility)) {
    throw std::invalid_argument("DetectionImperfections: visibility outside [0, 1]");
  }
}

CovarianceModel input_covariance(const PolSqueezedSource& a,
                                 const PolSqueezedSource& b) {
  if (std::abs(a.theta_sq().radians - b.theta_sq().radians) > kAngleMatchTol) {
    throw std::invalid_argument(
        "input_covariance: sources must share the squeezing angle");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(4, 4);
  sigma.diagonal() << a.v_sq(), a.v_asq(), b.v_sq(), b.v_asq();
  return CovarianceModel(
      FluctuationBasis::pair_basis("A", "B", a.theta_sq().radians),
      std::move(sigma));
}

LinearMap entangling_bs_map(const BeamSplitterSpec& bs, double theta_sq) {
  require_pi_half_phase(bs);
  const double t = bs.t;
  const double r = bs.r();
  const double rt = std::sqrt(r * t);

  Eigen::MatrixXd m(4, 4);
  // Rows: C(sq), C(asq), D(sq), D(asq); columns: A(sq), A(asq), B(sq), B(asq).
  m << t, rt, r, -rt,
      -rt, t, rt, r,
      r, -rt, t, rt,
      rt, r, -rt, t;

  LinearMap map(std::move(m), FluctuationBasis::pair_basis("A", "B", theta_sq),
                output_basis(theta_sq));
  const double residual = map.orthogonality_residual();
  if (residual > kMapTol) {
    throw NumericalError("entangling_bs_map: orthogonality residual " +
                         std::to_string(residual));
  }
  return map;
}

double optimized_gamma(const BeamSplitterSpec& bs) {
  return std::acos(std::sqrt(bs.t));
}

LinearMap optimized_direction_map(const BeamSplitterSpec& bs, double theta_sq) {
  require_pi_half_phase(bs);
  const double st = std::sqrt(bs.t);
  const double sr = std::sqrt(bs.r());
  const double gamma = optimized_gamma(bs);

  Eigen::MatrixXd m(4, 4);
  // Rows: C(opt), C(opt+), D(opt), D(opt+); columns as in entangling_bs_map.
  m << st, 0, 0, -sr,
      0, st, sr, 0,
      0, -sr, st, 0,
      sr, 0, 0, st;

  const double opt = theta_sq - gamma;
  LinearMap map(std::move(m), FluctuationBasis::pair_basis("A", "B", theta_sq),
                FluctuationBasis::pair_basis("C", "D", opt));

  // Must coincide with the beam-splitter map followed by rotating each output
  // beam's observation axes by -gamma.
  const LinearMap via_rotation =
      per_beam_rotation(output_basis(theta_sq), {{"C", -gamma}, {"D", -gamma}})
          .compose(entangling_bs_map(bs, theta_sq));
  const double mismatch =
      (map.matrix() - via_rotation.matrix()).cwiseAbs().maxCoeff();
  if (mismatch > kMapTol) {
    throw NumericalError("optimized_direction_map: disagrees with rotated "
                         "beam-splitter map by " + std::to_string(mismatch));
  }
  const double residual = map.orthogonality_residual();
  if (residual > kMapTol) {
    throw NumericalError("optimized_direction_map: orthogonality residual " +
                         std::to_string(residual));
  }
  return map;
}

CovarianceModel apply_detection(const CovarianceModel& cov,
                                const DetectionImperfections& imp) {
  imp.validate();
  if (cov.size() != 4) {
    throw std::invalid_argument("apply_detection: expected a 4-coordinate "
                                "two-beam output covariance");
  }
  const std::string beam_c = cov.basis().label(0).beam;
  const std::string beam_d = cov.basis().label(2).beam;

  Eigen::MatrixXd sigma = cov.matrix();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);

  // Mode mismatch at the entangling splitter: the interfered fluctuations are
  // attenuated by v with the complementary power arriving as an independent
  // vacuum-like mode. Cross terms scale by v^2.
  const double v2 = imp.visibility * imp.visibility;
  sigma = v2 * sigma + (1.0 - v2) * eye;

  // Wave-plate missets rotate the measured axes of each beam.
  const LinearMap misset =
      per_beam_rotation(cov.basis(), {{beam_c, imp.angle_error_c},
                                      {beam_d, imp.angle_error_d}});
  sigma = misset.matrix() * sigma * misset.matrix().transpose();
  sigma = ((sigma + sigma.transpose()) / 2.0).eval();

  // Detector loss: V -> eta V + (1 - eta) per beam, cross terms by
  // sqrt(eta_c eta_d).
  Eigen::Vector4d root_eta;
  root_eta << std::sqrt(imp.efficiency_c), std::sqrt(imp.efficiency_c),
      std::sqrt(imp.efficiency_d), std::sqrt(imp.efficiency_d);
  sigma = root_eta.asDiagonal() * sigma * root_eta.asDiagonal();
  sigma += eye - root_eta.cwiseAbs2().asDiagonal().toDenseMatrix();

  return CovarianceModel(cov.basis(), std::move(sigma));
}

double forward_blocked(double v_in, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("forward_blocked: t must lie in [0, 1]");
  }
  return t * v_in + (1.0 - t);
}

double blocked_arm_inference(double measured, double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::invalid_argument("blocked_arm_inference: t must lie in (0, 1]");
  }
  if (!(measured > 1.0 - t)) {
    throw std::domain_error(
        "blocked_arm_inference: measured variance does not exceed the "
        "beam-splitter vacuum contribution " + std::to_string(1.0 - t));
  }
  return (measured - (1.0 - t)) / t;
}

SplitRatio infer_splitting_from_asq_correlation(double measured_norm,
                                                const PolSqueezedSource& a,
                                                const PolSqueezedSource& b) {
  const double sum_sq = a.v_sq() + b.v_sq();
  const double sum_asq = a.v_asq() + b.v_asq();
  const double floor = sum_sq / 2.0;
  const double ceiling = sum_asq / 2.0;
  if (measured_norm < floor - 1e-12) {
    throw NumericalError(
        "infer_splitting: measured " + std::to_string(measured_norm) +
        " lies below the symmetric-splitter floor " + std::to_string(floor));
  }
  if (measured_norm > ceiling + 1e-12) {
    throw NumericalError(
        "infer_splitting: measured " + std::to_string(measured_norm) +
        " exceeds the fully asymmetric ceiling " + std::to_string(ceiling));
  }
  const double imbalance_sq =
      std::clamp((2.0 * measured_norm - sum_sq) / (sum_asq - sum_sq), 0.0, 1.0);
  const double t = (1.0 + std::sqrt(imbalance_sq)) / 2.0;
  return SplitRatio{t, 1.0 - t};
}

}  // namespace polent
