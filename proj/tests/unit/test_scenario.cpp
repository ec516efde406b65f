#include "salpchain/scenario.hpp"

#include "salpchain/artifacts_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace salpchain {
namespace {

std::string validationMessage(const Scenario& s) {
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

TEST(DefaultScenario, ReferenceValues) {
  const Scenario s = defaultReferenceScenario();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.linkCount(), 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(s.chain.halfLengths[i], 0.125);
    EXPECT_DOUBLE_EQ(s.chain.masses[i], 0.5);
    // slender rod of length 2l: m (2l)^2 / 12
    EXPECT_NEAR(s.chain.inertias[i], 0.5 * 0.25 * 0.25 / 12.0, 1e-5);
    EXPECT_DOUBLE_EQ(s.chain.inertias[i], 2.6e-3);
  }
  EXPECT_DOUBLE_EQ(s.chain.thrusterAngles[0], std::numbers::pi / 4);
  EXPECT_DOUBLE_EQ(s.chain.thrusterAngles[1], 2 * std::numbers::pi / 3);
  EXPECT_DOUBLE_EQ(s.chain.thrusterAngles[2], -std::numbers::pi / 2);
  EXPECT_EQ(s.sampleCount(), 101);
  EXPECT_EQ(s.substepsPerSample(), 10);
  EXPECT_DOUBLE_EQ(s.conditionTol(), 3e-9);
  EXPECT_EQ(s.mounts().size(), 3u);
  EXPECT_EQ(s.thrustProfile().at(0.25), Eigen::Vector3d::Ones());
}

TEST(RunSeed, XorOfMasterAndIndex) {
  EXPECT_EQ(runSeed(42, 0), 42u);
  EXPECT_EQ(runSeed(42, 1), 43u);
  EXPECT_EQ(runSeed(42, 2), 40u);
  EXPECT_NE(runSeed(7, 3), runSeed(7, 4));
}

TEST(RunScenario, GridAndTableShapes) {
  const Scenario s = defaultReferenceScenario();
  const ScenarioRun run = runScenario(s);
  ASSERT_EQ(run.times.size(), 101u);
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    EXPECT_DOUBLE_EQ(run.times[k], static_cast<double>(k) / 100.0);
  }
  const RunArtifacts& a = run.artifacts;
  EXPECT_EQ(a.truth.rows.size(), 101u);
  EXPECT_EQ(a.measurements.rows.size(), 101u);
  EXPECT_EQ(a.estimate.rows.size(), 101u);
  EXPECT_EQ(a.observability.rows.size(), 101u);
  EXPECT_EQ(a.truth.columns, truthColumns(3));
  EXPECT_EQ(a.truth.rows[0].size(), a.truth.columns.size());
  EXPECT_EQ(a.estimate.rows[0].size(), a.estimate.columns.size());
  EXPECT_EQ(a.seed, 42u);
}

TEST(RunScenario, HeldThrustMatchesSchedule) {
  const ScenarioRun run = runScenario(defaultReferenceScenario(), {0, false, false});
  EXPECT_EQ(run.thrust[20][0], 0.0);  // (0.19, 0.20]
  EXPECT_EQ(run.thrust[21][0], 1.0);  // (0.20, 0.21]
  EXPECT_EQ(run.thrust[30][0], 1.0);  // (0.29, 0.30]
  EXPECT_EQ(run.thrust[31][0], 0.0);
  EXPECT_TRUE(run.artifacts.estimate.rows.empty());
  EXPECT_TRUE(run.filter.beliefs.empty());
}

TEST(RunScenario, ZeroThrustKeepsChainAtRest) {
  Scenario s = defaultReferenceScenario();
  s.thrust.assign(3, Waveform::constant(0.0));
  const ScenarioRun run = runScenario(s);
  for (std::size_t k = 0; k < run.truth.size(); ++k) {
    EXPECT_EQ(run.truth[k].flatten(), s.initialState.flatten());
    EXPECT_FALSE(run.observability[k].report.observable);
  }
}

TEST(RunScenario, ObservableExactlyWhileThrusting) {
  const ScenarioRun run = runScenario(defaultReferenceScenario(), {0, false, false});
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const bool on = run.thrust[k].cwiseAbs().minCoeff() > 0.0;
    EXPECT_EQ(run.observability[k].report.observable, on) << "k=" << k;
    if (on) EXPECT_EQ(run.observability[k].report.rank, 12) << "k=" << k;
  }
}

TEST(RunScenario, DeterministicInScenarioAndRunIndex) {
  const Scenario s = defaultReferenceScenario();
  EXPECT_TRUE(runScenario(s).artifacts == runScenario(s).artifacts);
  RunOptions other;
  other.runIndex = 1;
  const ScenarioRun b = runScenario(s, other);
  EXPECT_EQ(b.artifacts.seed, 43u);
  EXPECT_FALSE(runScenario(s).artifacts.measurements == b.artifacts.measurements);
  // Truth does not depend on the seed.
  EXPECT_TRUE(runScenario(s).artifacts.truth == b.artifacts.truth);
}

TEST(RunScenario, MeasurementNoiseMatchesConfiguredSigma) {
  Scenario s = defaultReferenceScenario();
  s.thrust.assign(3, Waveform::constant(0.0));
  s.duration = 10.0;
  const ScenarioRun run = runScenario(s, {0, false, false});
  double accSq = 0, gyroSq = 0;
  for (const auto& z : run.measurements) {
    accSq += z.head(6).squaredNorm();
    gyroSq += z.tail(3).squaredNorm();
  }
  const double count = static_cast<double>(run.measurements.size());
  EXPECT_NEAR(std::sqrt(accSq / (6 * count)), 1e-2, 1e-3);
  EXPECT_NEAR(std::sqrt(gyroSq / (3 * count)), 1e-3, 1e-4);
}

TEST(Validate, FieldPrefixedMessages) {
  Scenario s = defaultReferenceScenario();
  s.chain.masses[1] = -1.0;
  EXPECT_EQ(validationMessage(s).rfind("chain.masses[1]", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.thrust.pop_back();
  EXPECT_EQ(validationMessage(s).rfind("thrust", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.thrust[2].onDuration = 0.0;
  EXPECT_EQ(validationMessage(s).rfind("thrust.links[2].onDuration", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.integratorDt = 3e-3;
  EXPECT_EQ(validationMessage(s).rfind("sim.integratorDt", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.imuNoise.sigmaGyro = -1;
  EXPECT_EQ(validationMessage(s).rfind("noise.imu.sigmaGyro", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.processStd.inertia = -1;
  EXPECT_EQ(validationMessage(s).rfind("noise.process.inertia", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.imuOffsets.assign(2, Eigen::Vector2d::Zero());
  EXPECT_EQ(validationMessage(s).rfind("imu.offsets", 0), 0u) << validationMessage(s);

  s = defaultReferenceScenario();
  s.initialState.theta.resize(2);
  EXPECT_EQ(validationMessage(s).rfind("initialState", 0), 0u) << validationMessage(s);
}

TEST(RunScenario, FailureNamesRunAndStep) {
  Scenario s = defaultReferenceScenario();
  s.initialStd.theta = 0.0;
  s.initialStd.thetaDot = 0.0;
  s.initialStd.mass = 0.0;
  s.initialStd.inertia = 0.0;
  RunOptions o;
  o.runIndex = 5;
  try {
    runScenario(s, o);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("run 5", 0), 0u) << e.what();
  }
}

TEST(ObservabilitySweep, NearestSampleAndRange) {
  const Scenario s = defaultReferenceScenario();
  const auto sweep = observabilitySweep(s, {0.25, 0.351, 1.0});
  ASSERT_EQ(sweep.size(), 3u);
  EXPECT_TRUE(sweep[0].report.observable);
  EXPECT_EQ(sweep[0].report.rank, 12);
  EXPECT_DOUBLE_EQ(sweep[1].time, 0.35);
  EXPECT_FALSE(sweep[1].report.observable);
  EXPECT_THROW(observabilitySweep(s, {1.5}), std::out_of_range);
  EXPECT_THROW(observabilitySweep(s, {-0.1}), std::out_of_range);
}

TEST(SnapshotTable, LinksJoinEndToEnd) {
  const Scenario s = defaultReferenceScenario();
  const ScenarioRun run = runScenario(s, {0, false, false});
  const Table t = snapshotTable(s, run, {0.0, 0.6, 5.0});
  EXPECT_EQ(t.columns, snapshotColumns());
  ASSERT_EQ(t.rows.size(), 6u);
  for (std::size_t r = 0; r < t.rows.size(); r += 3) {
    for (std::size_t i = 0; i + 1 < 3; ++i) {
      const auto& a = t.rows[r + i];
      const auto& b = t.rows[r + i + 1];
      EXPECT_NEAR(a[4], b[2], 1e-12);
      EXPECT_NEAR(a[5], b[3], 1e-12);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& a = t.rows[r + i];
      EXPECT_NEAR(std::hypot(a[4] - a[2], a[5] - a[3]), 0.25, 1e-12);
      EXPECT_EQ(a[1], static_cast<double>(i + 1));
    }
  }
  // At rest the straight chain spans [-0.375, 0.375].
  EXPECT_NEAR(t.rows[0][2], -0.375, 1e-12);
  EXPECT_NEAR(t.rows[2][4], 0.375, 1e-12);
}

TEST(MonteCarlo, SummaryUsesIndependentRuns) {
  const MonteCarloResult mc = runMonteCarlo(defaultReferenceScenario(), 4);
  ASSERT_EQ(mc.runs.size(), 4u);
  ASSERT_EQ(mc.nees.size(), 101u);
  for (int r = 0; r < 4; ++r) EXPECT_EQ(mc.runs[r].artifacts.seed, runSeed(42, r));
  double sum = 0.0;
  for (const auto& run : mc.runs) sum += run.filter.nees[50];
  EXPECT_NEAR(mc.nees[50].meanNees, sum / 4.0, 1e-12);
  EXPECT_THROW(runMonteCarlo(defaultReferenceScenario(), 0), std::invalid_argument);
}

TEST(ExternalForces, LinearDragOpposesVelocity) {
  Scenario s = defaultReferenceScenario();
  s.externalForces = {ExternalForceSpec::Kind::LinearDrag, 0.3};
  const ExternalForceField f = makeExternalForce(s.externalForces, s.chain);
  ChainState st = ChainState::atRest(3);
  st.cmDot = Eigen::Vector2d(1.0, -2.0);
  const ForcePair e = f(0.0, st);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(e.x[i], -0.3, 1e-12);
    EXPECT_NEAR(e.y[i], 0.6, 1e-12);
  }
  const ForcePair none = makeExternalForce({}, s.chain)(0.0, st);
  EXPECT_TRUE(none.x.isZero(0.0));
}

}  // namespace
}  // namespace salpchain
