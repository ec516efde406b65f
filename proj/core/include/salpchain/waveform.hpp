#pragma once

#include <Eigen/Dense>

#include <vector>

namespace salpchain {

/// Thrust magnitude of one link over time.
struct Waveform {
  enum class Kind { Constant, SquareWave };

  Kind kind = Kind::SquareWave;
  double amplitude = 1.0;  // N
  double startTime = 0.2;  // s
  double onDuration = 0.1;
  double offDuration = 0.2;
  double phaseOffset = 0.0;  // s, shifts the start of a square wave

  static Waveform constant(double amplitude);
  static Waveform squareWave(double amplitude, double startTime, double onDuration,
                             double offDuration, double phaseOffset = 0.0);

  /// Square waves are on for phase in [0, onDuration) of each period,
  /// evaluated with a 1e-9 s tolerance so grid-aligned edges are exact.
  double value(double t) const;
  void validate() const;
};

/// One waveform per link.
class ThrustProfile {
 public:
  ThrustProfile() = default;
  explicit ThrustProfile(std::vector<Waveform> links);

  Eigen::VectorXd at(double t) const;
  /// Thrust applied over (t0, t1]: the value at the interval midpoint.
  Eigen::VectorXd heldOver(double t0, double t1) const { return at(0.5 * (t0 + t1)); }

  const std::vector<Waveform>& links() const { return links_; }
  int linkCount() const { return static_cast<int>(links_.size()); }

 private:
  std::vector<Waveform> links_;
};

}  // namespace salpchain
