#include "salpchain/imu_model.hpp"

#include <stdexcept>
#include <string>

namespace salpchain {

namespace {

Eigen::Matrix2d rotation(double angle) {
  return Eigen::Rotation2Dd(angle).toRotationMatrix();
}

// `origin` holds the CM acceleration of every link.
ImuReading readingFromDerivative(const ChainState& state, const ForcePair& origin,
                                 double thetaDDot, const ImuMount& mount, AccelFrame frame) {
  const int i = mount.link;
  const double angle = state.theta[i];
  const double rate = state.thetaDot[i];
  ImuReading out;
  out.gyro = rate;
  out.accel = Eigen::Vector2d(origin.x[i], origin.y[i]);
  if (!mount.offset.isZero(0.0)) {
    const Eigen::Vector2d r = rotation(angle) * mount.offset;
    const Eigen::Vector2d perp(-r.y(), r.x());
    out.accel += -rate * rate * r + thetaDDot * perp;
  }
  if (frame == AccelFrame::Body) out.accel = rotation(angle).transpose() * out.accel;
  return out;
}

void checkMount(const ImuMount& mount, int links) {
  if (mount.link < 0 || mount.link >= links) {
    throw std::out_of_range("ImuMount: link index " + std::to_string(mount.link) +
                            " outside [0, " + std::to_string(links) + ")");
  }
  if (!mount.offset.allFinite()) throw std::invalid_argument("ImuMount: offset not finite");
}

ForcePair appliedAccelerations(const ChainParams& params, const ForcePair& f) {
  return {f.x.cwiseQuotient(params.masses), f.y.cwiseQuotient(params.masses)};
}

// Differentiates the reconstruction D x = -A L cos(theta), m^T x / mt = p_x
// (and the sine counterpart) twice.
ForcePair kinematicAccelerations(const ChainParams& params, const CouplingMatrices& coupling,
                                 const ChainState& state, const ForcePair& f,
                                 const Eigen::VectorXd& thetaDDot) {
  const int n = params.linkCount();
  const double mt = params.totalMass();
  const Eigen::VectorXd pdd(Eigen::Vector2d(f.x.sum(), f.y.sum()) / mt);
  if (n == 1) return {pdd.head(1), pdd.tail(1)};
  const Eigen::ArrayXd s = state.theta.array().sin();
  const Eigen::ArrayXd c = state.theta.array().cos();
  const Eigen::ArrayXd w2 = state.thetaDot.array().square();
  const Eigen::ArrayXd a = thetaDDot.array();
  const Eigen::ArrayXd l = params.halfLengths.array();
  Eigen::MatrixXd t(n, n);
  t << coupling.D, params.masses.transpose() / mt;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);
  Eigen::VectorXd rx(n), ry(n);
  rx << coupling.A * (l * (c * w2 + s * a)).matrix(), pdd[0];
  ry << coupling.A * (l * (s * w2 - c * a)).matrix(), pdd[1];
  return {lu.solve(rx), lu.solve(ry)};
}

Eigen::VectorXd stackReadings(const ChainParams& params, const CouplingMatrices& coupling,
                              const ChainState& state, const Eigen::VectorXd& thrust,
                              const ForcePair& external, const std::vector<ImuMount>& mounts,
                              AccelModel model) {
  const int n = params.linkCount();
  const int count = static_cast<int>(mounts.size());
  bool offsets = false;
  for (const auto& m : mounts) {
    checkMount(m, n);
    offsets = offsets || !m.offset.isZero(0.0);
  }
  const ForcePair f = netForces(params, state.theta, thrust, external);
  Eigen::VectorXd alpha;
  if (offsets || model == AccelModel::Kinematic) {
    alpha = angularAcceleration(params.halfLengths, params.inertias, coupling, state.theta,
                                state.thetaDot, f);
  }
  const ForcePair origin = model == AccelModel::Kinematic
                               ? kinematicAccelerations(params, coupling, state, f, alpha)
                               : appliedAccelerations(params, f);
  Eigen::VectorXd out(3 * count);
  for (int k = 0; k < count; ++k) {
    const ImuMount& m = mounts[static_cast<std::size_t>(k)];
    const double a = alpha.size() ? alpha[m.link] : 0.0;
    const ImuReading r = readingFromDerivative(state, origin, a, m, AccelFrame::Inertial);
    out[k] = r.accel.x();
    out[count + k] = r.accel.y();
    out[2 * count + k] = r.gyro;
  }
  return out;
}

}  // namespace

ForcePair linkAccelerations(const ChainParams& params, const CouplingMatrices& coupling,
                            const ChainState& state, const Eigen::VectorXd& thrust,
                            const ForcePair& external) {
  const ForcePair f = netForces(params, state.theta, thrust, external);
  const Eigen::VectorXd alpha = angularAcceleration(params.halfLengths, params.inertias,
                                                    coupling, state.theta, state.thetaDot, f);
  return kinematicAccelerations(params, coupling, state, f, alpha);
}

ImuReading imuTrue(const ChainParams& params, const CouplingMatrices& coupling,
                   const ChainState& state, const Eigen::VectorXd& thrust,
                   const ForcePair& external, const ImuMount& mount,
                   AccelFrame frame, AccelModel model) {
  checkMount(mount, params.linkCount());
  const Eigen::VectorXd z = stackReadings(params, coupling, state, thrust, external,
                                          std::vector<ImuMount>(1, mount), model);
  ImuReading out;
  out.accel << z[0], z[1];
  out.gyro = z[2];
  if (frame == AccelFrame::Body) {
    out.accel = Eigen::Rotation2Dd(state.theta[mount.link]).toRotationMatrix().transpose() *
                out.accel;
  }
  return out;
}

ImuReading imuNoisy(const ImuReading& reading, const ImuNoise& noise,
                    std::mt19937_64& rng) {
  if (noise.sigmaAcc < 0.0 || noise.sigmaGyro < 0.0) {
    throw std::invalid_argument("ImuNoise: standard deviations must be nonnegative");
  }
  std::normal_distribution<double> standard(0.0, 1.0);
  ImuReading out = reading;
  out.accel.x() += noise.sigmaAcc * standard(rng);
  out.accel.y() += noise.sigmaAcc * standard(rng);
  out.gyro += noise.sigmaGyro * standard(rng);
  return out;
}

Eigen::VectorXd measureAllTrue(const ChainParams& params,
                               const CouplingMatrices& coupling,
                               const ChainState& state,
                               const Eigen::VectorXd& thrust,
                               const ForcePair& external,
                               const std::vector<ImuMount>& mounts,
                               AccelModel model) {
  const int n = params.linkCount();
  if (static_cast<int>(mounts.size()) != n) {
    throw std::invalid_argument("measureAll: expected " + std::to_string(n) +
                                " IMU mounts, got " + std::to_string(mounts.size()));
  }
  return stackReadings(params, coupling, state, thrust, external, mounts, model);
}

Eigen::VectorXd measureAll(const ChainParams& params,
                           const CouplingMatrices& coupling,
                           const ChainState& state, const Eigen::VectorXd& thrust,
                           const ForcePair& external,
                           const std::vector<ImuMount>& mounts,
                           const ImuNoise& noise, std::mt19937_64& rng,
                           AccelModel model) {
  Eigen::VectorXd out = measureAllTrue(params, coupling, state, thrust, external, mounts, model);
  const int n = params.linkCount();
  for (int k = 0; k < n; ++k) {
    ImuReading r;
    r.accel = Eigen::Vector2d(out[k], out[n + k]);
    r.gyro = out[2 * n + k];
    r = imuNoisy(r, noise, rng);
    out[k] = r.accel.x();
    out[n + k] = r.accel.y();
    out[2 * n + k] = r.gyro;
  }
  return out;
}

Eigen::VectorXd cmImuMeasurement(const Eigen::VectorXd& thrusterAngles,
                                 const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& thetaDot,
                                 const Eigen::VectorXd& masses,
                                 const Eigen::VectorXd& thrust,
                                 const ForcePair& external) {
  const Eigen::Index n = theta.size();
  const Eigen::ArrayXd dir = (theta + thrusterAngles).array();
  Eigen::VectorXd out(3 * n);
  out.segment(0, n) = ((external.x.array() + dir.cos() * thrust.array()) / masses.array()).matrix();
  out.segment(n, n) = ((external.y.array() + dir.sin() * thrust.array()) / masses.array()).matrix();
  out.segment(2 * n, n) = thetaDot;
  return out;
}

std::vector<ImuMount> cmMounts(int links) {
  std::vector<ImuMount> mounts(static_cast<std::size_t>(links));
  for (int i = 0; i < links; ++i) mounts[static_cast<std::size_t>(i)].link = i;
  return mounts;
}

}  // namespace salpchain
