#include "salpchain/waveform.hpp"

#include <gtest/gtest.h>

namespace salpchain {
namespace {

TEST(Waveform, DefaultSquareWaveSchedule) {
  const Waveform w = Waveform::squareWave(1.0, 0.2, 0.1, 0.2);
  EXPECT_EQ(w.value(0.0), 0.0);
  EXPECT_EQ(w.value(0.19), 0.0);
  EXPECT_EQ(w.value(0.2), 1.0);
  EXPECT_EQ(w.value(0.25), 1.0);
  EXPECT_EQ(w.value(0.3), 0.0);
  EXPECT_EQ(w.value(0.35), 0.0);
  EXPECT_EQ(w.value(0.5), 1.0);
  EXPECT_EQ(w.value(0.55), 1.0);
  EXPECT_EQ(w.value(0.65), 0.0);
  EXPECT_EQ(w.value(0.8), 1.0);
  EXPECT_EQ(w.value(0.95), 0.0);
}

TEST(Waveform, GridAlignedEdgesAreExact) {
  const Waveform w = Waveform::squareWave(2.0, 0.2, 0.1, 0.2);
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    const int inCycle = (k - 20) % 30;
    const double expected = (k >= 20 && inCycle < 10) ? 2.0 : 0.0;
    EXPECT_EQ(w.value(t), expected) << "t=" << t;
  }
}

TEST(Waveform, PhaseOffsetShiftsSchedule) {
  const Waveform w = Waveform::squareWave(1.0, 0.2, 0.1, 0.2, 0.05);
  EXPECT_EQ(w.value(0.22), 0.0);
  EXPECT_EQ(w.value(0.27), 1.0);
  EXPECT_EQ(w.value(0.36), 0.0);
}

TEST(Waveform, ConstantIgnoresTime) {
  const Waveform w = Waveform::constant(-0.7);
  EXPECT_EQ(w.value(-5.0), -0.7);
  EXPECT_EQ(w.value(123.0), -0.7);
}

TEST(Waveform, Validation) {
  EXPECT_NO_THROW(Waveform::squareWave(1, 0, 0.1, 0).validate());
  EXPECT_THROW(Waveform::squareWave(1, 0, 0.0, 0.1).validate(), std::invalid_argument);
  EXPECT_THROW(Waveform::squareWave(1, 0, 0.1, -0.1).validate(), std::invalid_argument);
  EXPECT_THROW(Waveform::constant(std::nan("")).validate(), std::invalid_argument);
}

TEST(ThrustProfile, PerLinkAndHeldValue) {
  const ThrustProfile p({Waveform::constant(1.0), Waveform::squareWave(3.0, 0.2, 0.1, 0.2)});
  EXPECT_EQ(p.linkCount(), 2);
  EXPECT_EQ(p.at(0.25), Eigen::Vector2d(1.0, 3.0));
  // Interval (0.29, 0.30] is still on; (0.30, 0.31] is off.
  EXPECT_EQ(p.heldOver(0.29, 0.30)[1], 3.0);
  EXPECT_EQ(p.heldOver(0.30, 0.31)[1], 0.0);
  EXPECT_EQ(p.heldOver(0.19, 0.20)[1], 0.0);
  EXPECT_EQ(p.heldOver(0.20, 0.21)[1], 3.0);
}

}  // namespace
}  // namespace salpchain
