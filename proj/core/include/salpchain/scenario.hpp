#pragma once

#include "salpchain/chain_dynamics.hpp"
#include "salpchain/consistency.hpp"
#include "salpchain/imu_model.hpp"
#include "salpchain/observability.hpp"
#include "salpchain/ukf.hpp"
#include "salpchain/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace salpchain {

/// Named external-force models. Linear drag, f = -c * (link CM velocity),
/// exists to exercise the net-force condition; the default is none.
struct ExternalForceSpec {
  enum class Kind { None, LinearDrag };
  Kind kind = Kind::None;
  double coefficient = 0.0;  // N s / m
};

ExternalForceField makeExternalForce(const ExternalForceSpec& spec, const ChainParams& params);

struct UncertaintyStd {
  double theta = 0.0;
  double thetaDot = 0.0;
  double mass = 0.0;
  double inertia = 0.0;
};

struct Scenario {
  ChainParams chain;
  ChainState initialState;
  std::vector<Waveform> thrust;  // one per link
  ExternalForceSpec externalForces;
  std::vector<Eigen::Vector2d> imuOffsets;  // truth model only; empty = CM mounts
  AccelModel accelModel = AccelModel::AppliedForce;  // truth model only

  double duration = 1.0;       // s
  double imuRate = 100.0;      // Hz
  double integratorDt = 1e-3;  // s

  ImuNoise imuNoise;
  UncertaintyStd initialStd;
  UncertaintyStd processStd;
  SigmaPointParams sigmaPoints;
  ParameterMode parameterMode = ParameterMode::Clamp;
  double conditionTolerance = 0.0;  // 0 selects 1e-9 * N

  std::uint64_t seed = 42;

  int linkCount() const { return chain.linkCount(); }
  /// floor(duration * imuRate) + 1 samples at k / imuRate.
  int sampleCount() const;
  int substepsPerSample() const;
  double conditionTol() const;
  ThrustProfile thrustProfile() const { return ThrustProfile(thrust); }
  std::vector<ImuMount> mounts() const;
  FilterConfig filterConfig() const;
  /// Throws std::invalid_argument whose message starts with the field path.
  void validate() const;
};

/// Three equal links, thruster angles (pi/4, 2pi/3, -pi/2), in-phase 1 N
/// square waves starting at 0.2 s (0.1 s on, 0.2 s off), 1 s at 100 Hz.
Scenario defaultReferenceScenario();

/// A column-named table of doubles; integers and flags are stored exactly.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

struct RunArtifacts {
  int links = 0;
  std::uint64_t seed = 0;
  Table truth;
  Table measurements;
  Table estimate;  // empty when the filter was not run
  Table observability;

  bool operator==(const RunArtifacts&) const = default;
};

struct ScenarioRun {
  RunArtifacts artifacts;
  std::vector<double> times;
  std::vector<ChainState> truth;
  std::vector<Eigen::VectorXd> thrust;  // held over (t_{k-1}, t_k]; entry 0 is the first interval's
  std::vector<ForcePair> external;
  std::vector<Eigen::VectorXd> measurements;
  std::vector<ObservabilitySample> observability;
  FilterTrace filter;  // empty when estimation is off
};

struct RunOptions {
  int runIndex = 0;
  bool estimate = true;
  bool keepObservabilityMatrices = false;
};

/// Per-run stream seed: master XOR run index.
std::uint64_t runSeed(std::uint64_t master, int runIndex);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truth simulation, IMU synthesis, optional UKF and observability monitoring.
/// Deterministic in (scenario, runIndex).
ScenarioRun runScenario(const Scenario& scenario, const RunOptions& options = {});

/// Truth samples only, on the measurement grid.
Trajectory simulateTruth(const Scenario& scenario, std::vector<Eigen::VectorXd>* thrustHeld = nullptr);

/// Observability report at each requested time (nearest grid sample).
std::vector<ObservabilitySample> observabilitySweep(const Scenario& scenario,
                                                    const std::vector<double>& times);

struct MonteCarloResult {
  std::vector<ScenarioRun> runs;
  std::vector<NeesSummaryRow> nees;
};

MonteCarloResult runMonteCarlo(const Scenario& scenario, int runs);

/// Link end points at the requested times for drawing chain snapshots.
Table snapshotTable(const Scenario& scenario, const ScenarioRun& run,
                    const std::vector<double>& times);

}  // namespace salpchain
