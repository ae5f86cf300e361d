#include "polent/metrology.hpp"

#include <cmath>
#include <stdexcept>

namespace polent {

double lin_to_db(double v) {
  if (!(v > 0.0)) {
    throw std::domain_error("lin_to_db: variance ratio must be > 0");
  }
  return 10.0 * std::log10(v);
}

double db_to_lin(double d) { return std::pow(10.0, d / 10.0); }

void PowerReading::validate() const {
  if (!(rbw_hz > 0.0) || !(vbw_hz > 0.0)) {
    throw std::invalid_argument("PowerReading: rbw and vbw must be > 0");
  }
}

double subtract_electronic_noise(const CalibratedTrace& trace,
                                 bool correct_shot) {
  trace.signal.validate();
  trace.shot_reference.validate();
  trace.electronic_floor.validate();

  // dBm -> linear milliwatts; the unit cancels in the ratio.
  const double p_signal = db_to_lin(trace.signal.dbm);
  const double p_shot = db_to_lin(trace.shot_reference.dbm);
  const double p_floor = db_to_lin(trace.electronic_floor.dbm);

  if (!(p_signal > p_floor) || !(p_shot > p_floor)) {
    throw std::domain_error(
        "subtract_electronic_noise: reading at or below the electronic "
        "floor, correction undefined");
  }
  const double shot_power = correct_shot ? p_shot - p_floor : p_shot;
  return (p_signal - p_floor) / shot_power;
}

Interval error_bar_propagation(double v, double sigma_db) {
  if (sigma_db < 0.0) {
    throw std::invalid_argument("error_bar_propagation: sigma_db must be >= 0");
  }
  return Interval{v * db_to_lin(-sigma_db), v * db_to_lin(sigma_db)};
}

}  // namespace polent
