#pragma once

namespace polent {

/// 10 * log10(v). v <= 0 throws std::domain_error.
double lin_to_db(double v);

/// 10^(d / 10). Round trip with lin_to_db is exact to 1e-12.
double db_to_lin(double d);

/// One spectrum-analyser reading. RBW/VBW/frequency are recorded metadata;
/// no spectral integration model is attached to them.
struct PowerReading {
  double dbm = 0.0;
  double rbw_hz = 300e3;
  double vbw_hz = 30.0;
  double frequency_hz = 17.5e6;

  /// Throws std::invalid_argument unless rbw and vbw are > 0.
  void validate() const;
};

/// Signal, shot-noise reference and electronic noise floor for one variance
/// measurement. A floor of -infinity dBm disables the correction.
struct CalibratedTrace {
  PowerReading signal;
  PowerReading shot_reference;
  PowerReading electronic_floor;
};

/// Shot-normalized variance with the electronic noise floor subtracted in
/// linear power: (P_sig - P_el) / (P_shot - P_el). Whether the shot trace is
/// floor-corrected too is ambiguous in practice; `correct_shot = false`
/// divides by the raw shot power instead. Readings at or below the floor
/// throw std::domain_error (correction undefined).
double subtract_electronic_noise(const CalibratedTrace& trace,
                                 bool correct_shot = true);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// [v * 10^(-sigma/10), v * 10^(+sigma/10)]: a +-sigma dB reporting
/// convention turned into a linear interval. All acceptance comparisons
/// against reported values use these intervals.
Interval error_bar_propagation(double v, double sigma_db);

}  // namespace polent
