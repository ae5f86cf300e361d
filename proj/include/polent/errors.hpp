#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polent {

/// The model produced numbers violating its own consistency guarantees
/// (PSD tolerance, orthogonality residuals, inference outside the physical range).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration the model deliberately does not cover (e.g. a beam splitter
/// phase other than pi/2).
class UnsupportedConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A truncated Fock computation would be dominated by discarded tail mass.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A witness precondition is not met (e.g. asymmetric state handed to the
/// symmetric-state entanglement measure).
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gain-variance profile was not unimodal; carries the sampled
/// (gain, normalized variance) profile for diagnosis.
class OptimizerAmbiguityError : public std::runtime_error {
 public:
  OptimizerAmbiguityError(const std::string& what,
                          std::vector<std::pair<double, double>> samples)
      : std::runtime_error(what), samples_(std::move(samples)) {}

  const std::vector<std::pair<double, double>>& samples() const noexcept {
    return samples_;
  }

 private:
  std::vector<std::pair<double, double>> samples_;
};

/// Config file rejected; carries the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace polent
