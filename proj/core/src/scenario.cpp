#include "salpchain/scenario.hpp"

#include "salpchain/artifacts_io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace salpchain {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw std::invalid_argument(field + ": " + message);
}

void requireNonNegative(double v, const std::string& field) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(field, "must be finite and nonnegative");
}

std::vector<double> row(std::initializer_list<double> head) { return {head}; }

void append(std::vector<double>& r, const Eigen::VectorXd& v) {
  r.insert(r.end(), v.data(), v.data() + v.size());
}

}  // namespace

ExternalForceField makeExternalForce(const ExternalForceSpec& spec, const ChainParams& params) {
  const int n = params.linkCount();
  if (spec.kind == ExternalForceSpec::Kind::None) return noExternalForce(n);
  const double c = spec.coefficient;
  const CouplingMatrices coupling = buildCoupling(params);
  return [params, coupling, c](double, const ChainState& s) {
    const LinkKinematics k = reconstructLinks(params, coupling, s);
    return ForcePair{-c * k.xDot, -c * k.yDot};
  };
}

int Scenario::sampleCount() const {
  return static_cast<int>(std::floor(duration * imuRate + 1e-9)) + 1;
}

int Scenario::substepsPerSample() const {
  return std::max(1, static_cast<int>(std::llround(1.0 / (imuRate * integratorDt))));
}

double Scenario::conditionTol() const {
  return conditionTolerance > 0.0 ? conditionTolerance : defaultConditionTolerance(linkCount());
}

std::vector<ImuMount> Scenario::mounts() const {
  std::vector<ImuMount> m = cmMounts(linkCount());
  for (std::size_t i = 0; i < imuOffsets.size() && i < m.size(); ++i) m[i].offset = imuOffsets[i];
  return m;
}

FilterConfig Scenario::filterConfig() const {
  FilterConfig c = makeFilterConfig(linkCount(), processStd.theta, processStd.thetaDot,
                                    processStd.mass, processStd.inertia, imuNoise.sigmaAcc,
                                    imuNoise.sigmaGyro, chain.masses, chain.inertias);
  c.sigma = sigmaPoints;
  c.dt = 1.0 / imuRate;
  c.parameterMode = parameterMode;
  return c;
}

void Scenario::validate() const {
  try {
    chain.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("chain.") + e.what());
  }
  const int n = linkCount();
  auto checkVec = [n](const Eigen::VectorXd& v, const std::string& field) {
    if (v.size() != n) {
      fail(field, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    if (!v.allFinite()) fail(field, "entries must be finite");
  };
  checkVec(initialState.theta, "initialState.theta");
  checkVec(initialState.thetaDot, "initialState.thetaDot");
  if (!initialState.cm.allFinite() || !initialState.cmDot.allFinite()) {
    fail("initialState.cm", "entries must be finite");
  }
  if (static_cast<int>(thrust.size()) != n) {
    fail("thrust.links", "expected " + std::to_string(n) + " waveforms, got " +
                             std::to_string(thrust.size()));
  }
  for (int i = 0; i < n; ++i) {
    try {
      thrust[static_cast<std::size_t>(i)].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("thrust.links[" + std::to_string(i) + "]." + e.what());
    }
  }
  if (!imuOffsets.empty() && static_cast<int>(imuOffsets.size()) != n) {
    fail("imu.offsets", "expected " + std::to_string(n) + " offsets");
  }
  for (const auto& o : imuOffsets) {
    if (!o.allFinite()) fail("imu.offsets", "entries must be finite");
  }
  if (externalForces.kind == ExternalForceSpec::Kind::LinearDrag) {
    requireNonNegative(externalForces.coefficient, "externalForces.coefficient");
  }
  if (!(duration > 0.0)) fail("sim.duration", "must be positive");
  if (!(imuRate > 0.0)) fail("sim.imuRate", "must be positive");
  if (!(integratorDt > 0.0)) fail("sim.integratorDt", "must be positive");
  const double period = 1.0 / imuRate;
  const double ratio = period / integratorDt;
  if (std::abs(ratio - std::round(ratio)) * integratorDt > 1e-12 || std::round(ratio) < 1.0) {
    fail("sim.integratorDt", "must divide the measurement period 1/imuRate");
  }
  requireNonNegative(imuNoise.sigmaAcc, "noise.imu.sigmaAcc");
  requireNonNegative(imuNoise.sigmaGyro, "noise.imu.sigmaGyro");
  const std::pair<const UncertaintyStd*, std::string> blocks[] = {
      {&initialStd, "noise.initialStd"}, {&processStd, "noise.process"}};
  for (const auto& [b, name] : blocks) {
    requireNonNegative(b->theta, name + ".theta");
    requireNonNegative(b->thetaDot, name + ".thetaDot");
    requireNonNegative(b->mass, name + ".mass");
    requireNonNegative(b->inertia, name + ".inertia");
  }
  if (!(sigmaPoints.alpha > 0.0)) fail("filter.alpha", "must be positive");
  if (!(4 * n + sigmaPoints.kappa > 0.0)) fail("filter.kappa", "4N + kappa must be positive");
  if (conditionTolerance < 0.0) fail("filter.conditionTolerance", "must be nonnegative");
}

Scenario defaultReferenceScenario() {
  constexpr double pi = std::numbers::pi;
  Scenario s;
  s.chain.halfLengths = Eigen::VectorXd::Constant(3, 0.125);
  s.chain.masses = Eigen::VectorXd::Constant(3, 0.5);
  s.chain.inertias = Eigen::VectorXd::Constant(3, 2.6e-3);
  s.chain.thrusterAngles = Eigen::Vector3d(pi / 4.0, 2.0 * pi / 3.0, -pi / 2.0);
  s.initialState = ChainState::atRest(3);
  s.thrust.assign(3, Waveform::squareWave(1.0, 0.2, 0.1, 0.2));
  s.imuNoise = {1.0e-2, 1.0e-3};
  s.initialStd = {0.1, 5.0e-3, 0.1, 1.0e-4};
  s.processStd = {5.0e-3, 1.0e-3, 1.0e-2, 7.0e-6};
  return s;
}

std::uint64_t runSeed(std::uint64_t master, int runIndex) {
  return master ^ static_cast<std::uint64_t>(runIndex);
}

Trajectory simulateTruth(const Scenario& scenario, std::vector<Eigen::VectorXd>* thrustHeld) {
  scenario.validate();
  const ChainParams& params = scenario.chain;
  const CouplingMatrices coupling = buildCoupling(params);
  const ExternalForceField external = makeExternalForce(scenario.externalForces, params);
  const ThrustProfile profile = scenario.thrustProfile();
  const int samples = scenario.sampleCount();
  const int substeps = scenario.substepsPerSample();
  const double period = 1.0 / scenario.imuRate;
  const double h = period / substeps;

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(samples));
  traj.states.reserve(static_cast<std::size_t>(samples));
  traj.times.push_back(0.0);
  traj.states.push_back(scenario.initialState);
  if (thrustHeld) {
    thrustHeld->clear();
    thrustHeld->push_back(profile.heldOver(0.0, period));
  }
  for (int k = 1; k < samples; ++k) {
    const double t0 = static_cast<double>(k - 1) / scenario.imuRate;
    ChainState s = traj.states.back();
    for (int q = 0; q < substeps; ++q) {
      const double t = t0 + q * h;
      s = rk4Step(params, coupling, s, profile.heldOver(t, t + h), external, t, h);
    }
    if (!s.flatten().allFinite()) {
      std::ostringstream os;
      os << "truth propagation produced a non-finite state at step " << k;
      throw IntegrationError(os.str(), static_cast<std::size_t>(k), k / scenario.imuRate);
    }
    traj.times.push_back(static_cast<double>(k) / scenario.imuRate);
    traj.states.push_back(std::move(s));
    if (thrustHeld) thrustHeld->push_back(profile.heldOver(t0, traj.times.back()));
  }
  return traj;
}

ScenarioRun runScenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const int n = scenario.linkCount();
  const ChainParams& params = scenario.chain;
  const CouplingMatrices coupling = buildCoupling(params);
  const ExternalForceField externalField = makeExternalForce(scenario.externalForces, params);
  const std::vector<ImuMount> mounts = scenario.mounts();

  ScenarioRun run;
  std::size_t step = 0;
  try {
    const Trajectory traj = simulateTruth(scenario, &run.thrust);
    run.times = traj.times;
    run.truth = traj.states;

    const std::uint64_t seed = runSeed(scenario.seed, options.runIndex);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> standard(0.0, 1.0);

    // Initial estimate ~ N(x0, P0), drawn before any measurement noise.
    AugmentedState truth0 = AugmentedState::from(params, scenario.initialState);
    Eigen::VectorXd p0(4 * n);
    p0 << Eigen::VectorXd::Constant(n, std::pow(scenario.initialStd.theta, 2)),
        Eigen::VectorXd::Constant(n, std::pow(scenario.initialStd.thetaDot, 2)),
        Eigen::VectorXd::Constant(n, std::pow(scenario.initialStd.mass, 2)),
        Eigen::VectorXd::Constant(n, std::pow(scenario.initialStd.inertia, 2));
    GaussianBelief initial;
    initial.mean = truth0.flatten();
    for (Eigen::Index i = 0; i < initial.mean.size(); ++i) {
      initial.mean[i] += std::sqrt(p0[i]) * standard(rng);
    }
    for (Eigen::Index i = 2 * n; i < 4 * n; ++i) {
      const double nominal = i < 3 * n ? params.masses[i - 2 * n] : params.inertias[i - 3 * n];
      initial.mean[i] = std::max(initial.mean[i], 1e-9 * nominal);
    }
    initial.covariance = p0.asDiagonal();

    const double tol = scenario.conditionTol();
    for (step = 0; step < run.times.size(); ++step) {
      const ChainState& s = run.truth[step];
      const double t = run.times[step];
      run.external.push_back(externalField(t, s));
      run.measurements.push_back(measureAll(params, coupling, s, run.thrust[step],
                                            run.external.back(), mounts, scenario.imuNoise, rng,
                                            scenario.accelModel));
      ObservabilitySample sample{t, run.thrust[step],
                                 checkObservability(params, s, run.thrust[step],
                                                    run.external.back(), tol)};
      if (!options.keepObservabilityMatrices) sample.report.matrix.resize(0, 0);
      run.observability.push_back(std::move(sample));
    }
    step = 0;

    if (options.estimate) {
      const UnscentedFilter filter(params, scenario.filterConfig());
      FilterInputs in;
      in.times = run.times;
      in.measurements = run.measurements;
      in.thrust = run.thrust;
      in.external = run.external;
      for (const ChainState& s : run.truth) in.truth.push_back(AugmentedState::from(params, s).flatten());
      run.filter = runFilter(filter, initial, in);
    }

    RunArtifacts& a = run.artifacts;
    a.links = n;
    a.seed = seed;
    a.truth.columns = truthColumns(n);
    a.measurements.columns = measurementColumns(n);
    a.observability.columns = observabilityColumns(n);
    for (std::size_t k = 0; k < run.times.size(); ++k) {
      const ChainState& s = run.truth[k];
      std::vector<double> r = row({run.times[k]});
      append(r, s.theta);
      append(r, s.thetaDot);
      append(r, s.cm);
      append(r, s.cmDot);
      append(r, run.thrust[k]);
      a.truth.rows.push_back(std::move(r));

      r = row({run.times[k]});
      append(r, run.measurements[k]);
      a.measurements.rows.push_back(std::move(r));

      const ObservabilityReport& rep = run.observability[k].report;
      r = row({run.times[k]});
      append(r, rep.cond1);
      append(r, rep.cond2);
      r.push_back(rep.rank);
      r.push_back(rep.observable ? 1.0 : 0.0);
      a.observability.rows.push_back(std::move(r));
    }
    if (options.estimate) {
      a.estimate.columns = estimateColumns(n);
      for (std::size_t k = 0; k < run.filter.times.size(); ++k) {
        std::vector<double> r = row({run.filter.times[k]});
        append(r, run.filter.beliefs[k].mean);
        append(r, run.filter.sigma3[k]);
        append(r, run.filter.errors[k]);
        r.push_back(run.filter.nees[k]);
        a.estimate.rows.push_back(std::move(r));
      }
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "run " << options.runIndex;
    if (step > 0) os << ", step " << step;
    os << ": " << e.what();
    throw ScenarioError(os.str());
  }
  return run;
}

std::vector<ObservabilitySample> observabilitySweep(const Scenario& scenario,
                                                    const std::vector<double>& times) {
  std::vector<Eigen::VectorXd> thrust;
  const Trajectory traj = simulateTruth(scenario, &thrust);
  const ExternalForceField external = makeExternalForce(scenario.externalForces, scenario.chain);
  std::vector<ObservabilitySample> out;
  for (double t : times) {
    if (t < -1e-12 || t > traj.times.back() + 1e-12) {
      std::ostringstream os;
      os << "observability time " << t << " s lies outside [0, " << traj.times.back() << "]";
      throw std::out_of_range(os.str());
    }
    const auto k = static_cast<std::size_t>(std::llround(t * scenario.imuRate));
    const ChainState& s = traj.states[k];
    out.push_back({traj.times[k], thrust[k],
                   checkObservability(scenario.chain, s, thrust[k], external(traj.times[k], s),
                                      scenario.conditionTol())});
  }
  return out;
}

MonteCarloResult runMonteCarlo(const Scenario& scenario, int runs) {
  if (runs < 1) throw std::invalid_argument("runs: must be at least 1");
  MonteCarloResult mc;
  mc.runs.reserve(static_cast<std::size_t>(runs));
  std::vector<std::vector<double>> nees;
  for (int r = 0; r < runs; ++r) {
    RunOptions opt;
    opt.runIndex = r;
    mc.runs.push_back(runScenario(scenario, opt));
    nees.push_back(mc.runs.back().filter.nees);
  }
  mc.nees = summarizeNees(nees, mc.runs.front().times, 4 * scenario.linkCount());
  return mc;
}

Table snapshotTable(const Scenario& scenario, const ScenarioRun& run,
                    const std::vector<double>& times) {
  const ChainParams& params = scenario.chain;
  const CouplingMatrices coupling = buildCoupling(params);
  Table t;
  t.columns = snapshotColumns();
  for (double time : times) {
    const auto k = static_cast<std::size_t>(std::llround(time * scenario.imuRate));
    if (k >= run.truth.size()) continue;
    const ChainState& s = run.truth[k];
    const LinkKinematics links = reconstructLinks(params, coupling, s);
    for (int i = 0; i < params.linkCount(); ++i) {
      const double dx = params.halfLengths[i] * std::cos(s.theta[i]);
      const double dy = params.halfLengths[i] * std::sin(s.theta[i]);
      t.rows.push_back({run.times[k], static_cast<double>(i + 1), links.x[i] - dx,
                        links.y[i] - dy, links.x[i] + dx, links.y[i] + dy});
    }
  }
  return t;
}

}  // namespace salpchain
