#pragma once

#include "salpchain/chain_dynamics.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace salpchain {

/// IMU rigidly attached to `link`, at `offset` from the link CM expressed in
/// the link frame.
struct ImuMount {
  int link = 0;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct ImuReading {
  Eigen::Vector2d accel = Eigen::Vector2d::Zero();
  double gyro = 0.0;
};

struct ImuNoise {
  double sigmaAcc = 0.0;
  double sigmaGyro = 0.0;
};

enum class AccelFrame { Inertial, Body };

/// Source of the mount-link CM acceleration. AppliedForce uses f_i / m_i with
/// f_i the thrust plus external force on the link, which is the measurement
/// model the estimator and the observability analysis are built on. Kinematic
/// uses the true link CM acceleration, which also carries the joint reaction
/// forces, so it agrees with differentiating the mount position.
enum class AccelModel { AppliedForce, Kinematic };

/// Noise-free reading. The mount offset is rotated into the inertial frame
/// before the rotating-frame terms are applied; theta-double-dot comes from
/// the dynamics at this instant.
ImuReading imuTrue(const ChainParams& params, const CouplingMatrices& coupling,
                   const ChainState& state, const Eigen::VectorXd& thrust,
                   const ForcePair& external, const ImuMount& mount,
                   AccelFrame frame = AccelFrame::Inertial,
                   AccelModel model = AccelModel::AppliedForce);

/// Inertial accelerations of every link CM (joint reactions included).
ForcePair linkAccelerations(const ChainParams& params, const CouplingMatrices& coupling,
                            const ChainState& state, const Eigen::VectorXd& thrust,
                            const ForcePair& external);

/// Adds independent zero-mean Gaussian noise to each of the three channels.
/// Always consumes exactly three standard-normal draws.
ImuReading imuNoisy(const ImuReading& reading, const ImuNoise& noise,
                    std::mt19937_64& rng);

/// One IMU per link, stacked as (all accel x, all accel y, all gyro).
Eigen::VectorXd measureAllTrue(const ChainParams& params,
                               const CouplingMatrices& coupling,
                               const ChainState& state,
                               const Eigen::VectorXd& thrust,
                               const ForcePair& external,
                               const std::vector<ImuMount>& mounts,
                               AccelModel model = AccelModel::AppliedForce);

Eigen::VectorXd measureAll(const ChainParams& params,
                           const CouplingMatrices& coupling,
                           const ChainState& state, const Eigen::VectorXd& thrust,
                           const ForcePair& external,
                           const std::vector<ImuMount>& mounts,
                           const ImuNoise& noise, std::mt19937_64& rng,
                           AccelModel model = AccelModel::AppliedForce);

/// CM-mounted IMUs on every link, computed from angles, rates and masses only.
/// This is the estimator's measurement model.
Eigen::VectorXd cmImuMeasurement(const Eigen::VectorXd& thrusterAngles,
                                 const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& thetaDot,
                                 const Eigen::VectorXd& masses,
                                 const Eigen::VectorXd& thrust,
                                 const ForcePair& external);

std::vector<ImuMount> cmMounts(int links);

}  // namespace salpchain
