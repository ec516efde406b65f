#pragma once

#include "salpchain/chain_dynamics.hpp"

#include <Eigen/Dense>

#include <vector>

namespace salpchain {

/// Estimation state (theta, thetaDot, masses, inertias), dimension 4N.
/// Masses and inertias are stored in kg and kg m^2.
struct AugmentedState {
  Eigen::VectorXd theta;
  Eigen::VectorXd thetaDot;
  Eigen::VectorXd masses;
  Eigen::VectorXd inertias;

  int linkCount() const { return static_cast<int>(theta.size()); }
  Eigen::VectorXd flatten() const;
  static AugmentedState unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat);
  static AugmentedState from(const ChainParams& params, const ChainState& state);
  void validate() const;
};

/// Numeric rank with threshold max(rows, cols) * eps * sigma_max.
struct NumericRank {
  int rank = 0;
  double tolerance = 0.0;
  Eigen::VectorXd singularValues;
};
NumericRank numericRank(const Eigen::MatrixXd& m);

struct ObservabilityReport {
  Eigen::MatrixXd matrix;  // (3N + N^2) x 4N, columns (theta, mbar, z, jbar)
  int rank = 0;
  double rankTolerance = 0.0;
  Eigen::VectorXd singularValues;

  double omega1Det = 0.0;
  double omega1DetViaSchur = 0.0;
  // Block-level structure: Omega_1 uses the same numeric rank convention as
  // the full matrix; a row of L F Mbar is zero when its largest entry falls
  // below blockTolerance times the largest entry.
  bool omega1FullRank = false;
  bool omega2HasZeroRow = true;
  bool blockFullRank = false;

  Eigen::VectorXd cond1;  // u_i sin(psi_i)
  Eigen::VectorXd cond2;  // u_i + cos(theta_i + psi_i) fx_i + sin(theta_i + psi_i) fy_i
  double conditionTolerance = 0.0;
  bool observable = false;  // both conditions hold on every link
};

/// Observability matrix assembled block by block in the transformed
/// coordinates (theta, mbar, z, jbar), where mbar = 1/m, jbar = 1/j and
/// z = M_theta^-1 diag(j) thetaDot. Blocks marked as conservatively zero are
/// left zero.
Eigen::MatrixXd buildObservabilityMatrix(const ChainParams& params,
                                         const AugmentedState& aug,
                                         const Eigen::VectorXd& thrust,
                                         const ForcePair& external);

/// Transformed coordinates x' = (theta, z, mbar, jbar) used by the matrix
/// above. Provided so the assembled blocks can be checked against numerical
/// derivatives of the underlying functions.
Eigen::VectorXd toTransformed(const ChainParams& params, const AugmentedState& aug);
AugmentedState fromTransformed(const ChainParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& xPrime);

/// CM-IMU measurement written in x': (Mbar fx; Mbar fy; Jbar M_theta z).
Eigen::VectorXd transformedMeasurement(const ChainParams& params,
                                       const Eigen::Ref<const Eigen::VectorXd>& xPrime,
                                       const Eigen::VectorXd& thrust,
                                       const ForcePair& external);

/// Control field of thruster `link` expressed in x'. Its z block is
/// M_theta^-1 L F Mbar e_link and every other block is zero.
Eigen::VectorXd transformedControlField(const ChainParams& params,
                                        const Eigen::Ref<const Eigen::VectorXd>& xPrime,
                                        int link);

struct Omega1Determinant {
  double direct = 0.0;
  double viaSchur = 0.0;
};

/// Determinant of the 2N x 2N force block, computed by LU and by the
/// commuting-block product formula.
Omega1Determinant omega1Determinant(const ChainParams& params,
                                    const AugmentedState& aug,
                                    const Eigen::VectorXd& thrust,
                                    const ForcePair& external);

/// F_ij = K_ij sin(theta_i - theta_j - psi_j), the reduced form of
/// S K Cbar - C K Sbar.
Eigen::MatrixXd fMatrix(const ChainParams& params, const CouplingMatrices& coupling,
                        const Eigen::VectorXd& theta);

struct ConditionValues {
  Eigen::VectorXd cond1;
  Eigen::VectorXd cond2;
};
ConditionValues thrusterConditions(const ChainParams& params,
                                   const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& thrust,
                                   const ForcePair& external);

/// Default tolerance for the thruster conditions: 1e-9 * N (force units).
double defaultConditionTolerance(int links);

ObservabilityReport checkObservability(const ChainParams& params,
                                       const AugmentedState& aug,
                                       const Eigen::VectorXd& thrust,
                                       const ForcePair& external, double tol,
                                       double blockTolerance = 1e-12);

inline ObservabilityReport checkObservability(const ChainParams& params,
                                              const ChainState& state,
                                              const Eigen::VectorXd& thrust,
                                              const ForcePair& external,
                                              double tol) {
  return checkObservability(params, AugmentedState::from(params, state), thrust,
                            external, tol);
}

struct ObservabilitySample {
  double time = 0.0;
  Eigen::VectorXd thrust;
  ObservabilityReport report;
};

/// Evaluates the observability report at each sample of a trajectory.
/// `thrustAt` gives the thrust active at the i-th sample.
std::vector<ObservabilitySample> evaluateAlongTrajectory(
    const ChainParams& params, const Trajectory& trajectory,
    const std::vector<Eigen::VectorXd>& thrustAt, const ExternalForceField& external,
    double tol);

}  // namespace salpchain
