#include "salpchain/waveform.hpp"

#include <cmath>
#include <stdexcept>

namespace salpchain {

namespace {
constexpr double kEdgeTolerance = 1e-9;
}

Waveform Waveform::constant(double amplitude) {
  Waveform w;
  w.kind = Kind::Constant;
  w.amplitude = amplitude;
  return w;
}

Waveform Waveform::squareWave(double amplitude, double startTime, double onDuration,
                              double offDuration, double phaseOffset) {
  Waveform w;
  w.kind = Kind::SquareWave;
  w.amplitude = amplitude;
  w.startTime = startTime;
  w.onDuration = onDuration;
  w.offDuration = offDuration;
  w.phaseOffset = phaseOffset;
  return w;
}

double Waveform::value(double t) const {
  if (kind == Kind::Constant) return amplitude;
  const double tau = t - (startTime + phaseOffset);
  if (tau < -kEdgeTolerance) return 0.0;
  const double period = onDuration + offDuration;
  const double cycles = std::floor((tau + kEdgeTolerance) / period);
  const double phase = tau - cycles * period;
  return phase < onDuration - kEdgeTolerance ? amplitude : 0.0;
}

void Waveform::validate() const {
  if (!std::isfinite(amplitude)) throw std::invalid_argument("amplitude: must be finite");
  if (kind == Kind::SquareWave) {
    if (!(onDuration > 0.0)) throw std::invalid_argument("onDuration: must be positive");
    if (!(offDuration >= 0.0)) throw std::invalid_argument("offDuration: must be nonnegative");
    if (!std::isfinite(startTime) || !std::isfinite(phaseOffset)) {
      throw std::invalid_argument("startTime: must be finite");
    }
  }
}

ThrustProfile::ThrustProfile(std::vector<Waveform> links) : links_(std::move(links)) {}

Eigen::VectorXd ThrustProfile::at(double t) const {
  Eigen::VectorXd u(static_cast<Eigen::Index>(links_.size()));
  for (std::size_t i = 0; i < links_.size(); ++i) {
    u[static_cast<Eigen::Index>(i)] = links_[i].value(t);
  }
  return u;
}

}  // namespace salpchain
