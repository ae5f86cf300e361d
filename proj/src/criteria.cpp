#include "polent/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "polent/errors.hpp"

namespace polent {

namespace {

constexpr double kFlatTol = 1e-12;
constexpr double kLogGainLo = -3.0;  // log10 of the gain search range
constexpr double kLogGainHi = 3.0;
constexpr double kGainRelTol = 1e-10;

CorrelationCombo with_gains(CorrelationCombo combo, double g1, double g2) {
  combo.gain_first = g1;
  combo.gain_second = g2;
  return combo;
}

double eval_combo(const CovarianceModel& cov, const CorrelationCombo& combo) {
  return normalized_combo_variance(cov, combo_weights(cov.basis(), combo));
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

void CorrelationCombo::validate() const {
  if (!(gain_first > 0.0) || !(gain_second > 0.0)) {
    throw std::invalid_argument("CorrelationCombo: gains must be > 0");
  }
}

Eigen::VectorXd combo_weights(const FluctuationBasis& basis,
                              const CorrelationCombo& combo) {
  combo.validate();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  w[static_cast<Eigen::Index>(basis.index_of(combo.first))] =
      combo.sign_first * combo.gain_first;
  w[static_cast<Eigen::Index>(basis.index_of(combo.second))] =
      combo.sign_second * combo.gain_second;
  return w;
}

WitnessReport witness_from_pair(double v1, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) {
    throw std::invalid_argument("witness_from_pair: variances must be > 0");
  }
  WitnessReport report;
  report.v1 = v1;
  report.v2 = v2;
  report.product_root = std::sqrt(v1 * v2);
  report.nonseparable = report.product_root < 1.0;
  return report;
}

WitnessReport nonseparability_product(const CovarianceModel& cov,
                                      const CorrelationCombo& combo1,
                                      const CorrelationCombo& combo2) {
  return witness_from_pair(eval_combo(cov, combo1), eval_combo(cov, combo2));
}

WitnessReport same_direction_witness(const CovarianceModel& cov, double theta,
                                     double g, double h) {
  const std::string beam_c = cov.basis().label(0).beam;
  const std::string beam_d = cov.basis().label(2).beam;
  const double conj = theta + std::numbers::pi / 2.0;
  const CorrelationCombo sum{{beam_c, theta}, {beam_d, theta}, 1.0, 1.0, 1.0, g};
  const CorrelationCombo diff{
      {beam_c, conj}, {beam_d, conj}, 1.0, -1.0, 1.0, h};
  return nonseparability_product(cov, sum, diff);
}

WitnessReport cross_direction_witness(const CovarianceModel& cov, double theta,
                                      double g, double h) {
  const std::string beam_d = cov.basis().label(2).beam;
  const CovarianceModel rotated = propagate(
      per_beam_rotation(cov.basis(), {{beam_d, std::numbers::pi / 2.0}}), cov);
  return same_direction_witness(rotated, theta, g, h);
}

GainOptResult optimize_gain(const CovarianceModel& cov,
                            const CorrelationCombo& combo,
                            GainCoupling coupling, std::size_t g_slot) {
  if (g_slot > 1) {
    throw std::invalid_argument("optimize_gain: g_slot must be 0 or 1");
  }
  auto eval_at = [&](double g) {
    const double partner =
        coupling == GainCoupling::g_and_inverse ? 1.0 / g : 1.0;
    return eval_combo(cov, g_slot == 0 ? with_gains(combo, g, partner)
                                       : with_gains(combo, partner, g));
  };

  // Sample the profile on a log grid; assert a single valley before trusting
  // golden-section search.
  constexpr int kGridPoints = 61;
  std::vector<std::pair<double, double>> samples;
  samples.reserve(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double lg = kLogGainLo + (kLogGainHi - kLogGainLo) * i /
                                       static_cast<double>(kGridPoints - 1);
    const double g = std::pow(10.0, lg);
    samples.emplace_back(g, eval_at(g));
  }

  double lo_value = samples.front().second;
  double hi_value = lo_value;
  std::size_t best = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    lo_value = std::min(lo_value, samples[i].second);
    hi_value = std::max(hi_value, samples[i].second);
    if (samples[i].second < samples[best].second) best = i;
  }

  const double scale = std::max(1.0, std::abs(hi_value));
  if (hi_value - lo_value <= kFlatTol * scale) {
    return GainOptResult{1.0, eval_at(1.0)};  // canonical representative
  }

  const double slack = kFlatTol * scale;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const bool before_valley = i + 1 <= best;
    const double step = samples[i + 1].second - samples[i].second;
    if (before_valley ? step > slack : step < -slack) {
      throw OptimizerAmbiguityError(
          "optimize_gain: gain-variance profile is not unimodal", samples);
    }
  }

  // Golden-section search on log10 g inside the bracketing grid cells.
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLogGainLo + (kLogGainHi - kLogGainLo) *
                              (best == 0 ? 0 : best - 1) /
                              static_cast<double>(kGridPoints - 1);
  double b = kLogGainLo + (kLogGainHi - kLogGainLo) *
                              std::min<std::size_t>(best + 1, kGridPoints - 1) /
                              static_cast<double>(kGridPoints - 1);
  double x1 = b - golden * (b - a);
  double x2 = a + golden * (b - a);
  double f1 = eval_at(std::pow(10.0, x1));
  double f2 = eval_at(std::pow(10.0, x2));
  while (b - a > kGainRelTol / 4.0) {  // log10 width; rel tol on g is ~2.3x
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = eval_at(std::pow(10.0, x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = eval_at(std::pow(10.0, x2));
    }
  }
  const double g_search = std::pow(10.0, (a + b) / 2.0);

  // The minimizer must dominate the canonical candidate g = 1.
  GainOptResult result{g_search, eval_at(g_search)};
  const double at_unity = eval_at(1.0);
  if (at_unity <= result.v_min) {
    result = GainOptResult{1.0, at_unity};
  }
  return result;
}

double closed_form_gain(double t, double r, double v_sq, double v_asq) {
  if (!(t > 0.0) || !(r > 0.0) || !(v_sq > 0.0) || !(v_asq > 0.0)) {
    throw std::invalid_argument("closed_form_gain: arguments must be > 0");
  }
  return std::pow((t * v_sq + r * v_asq) / (t * v_asq + r * v_sq), 0.25);
}

namespace {

double conditional_variance(const CovarianceModel& cov, const CoordLabel& u,
                            const CoordLabel& w) {
  const double v_w = cov.variance_of(w);
  if (!(v_w > 1e-300)) {
    throw std::domain_error(
        "epr_reid: conditioning variance vanishes, inference undefined");
  }
  const double c = cov.covariance_of(u, w);
  return cov.variance_of(u) - c * c / v_w;
}

}  // namespace

double epr_reid(const CovarianceModel& cov,
                const std::pair<CoordLabel, CoordLabel>& pair_x,
                const std::pair<CoordLabel, CoordLabel>& pair_p) {
  return conditional_variance(cov, pair_x.first, pair_x.second) *
         conditional_variance(cov, pair_p.first, pair_p.second);
}

std::optional<double> eof_symmetric(double v1, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) {
    throw std::invalid_argument("eof_symmetric: variances must be > 0");
  }
  const double delta = std::sqrt(v1 * v2);
  if (delta >= 1.0) return std::nullopt;
  const double root = std::sqrt(delta);
  const double c_plus = (1.0 / root + root) * (1.0 / root + root) / 4.0;
  const double c_minus = (1.0 / root - root) * (1.0 / root - root) / 4.0;
  return xlog2x(c_plus) - xlog2x(c_minus);
}

std::optional<double> eof_for_state(const CovarianceModel& cov,
                                    const CorrelationCombo& combo1,
                                    const CorrelationCombo& combo2, double v1,
                                    double v2) {
  for (const CorrelationCombo* combo : {&combo1, &combo2}) {
    const double a = cov.variance_of(combo->first);
    const double b = cov.variance_of(combo->second);
    const double asymmetry = std::abs(a - b) / ((a + b) / 2.0);
    if (asymmetry > 0.01) {
      throw NotApplicableError(
          "eof_for_state: beams are asymmetric (auto-variances differ by " +
          std::to_string(asymmetry * 100.0) + "%), the symmetric-state "
          "entanglement of formation does not apply");
    }
  }
  return eof_symmetric(v1, v2);
}

}  // namespace polent
