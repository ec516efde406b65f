#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace salpchain {

/// Physical constants of an N-link planar chain. Link indices are 0-based.
struct ChainParams {
  Eigen::VectorXd halfLengths;     // l_i [m]
  Eigen::VectorXd masses;          // m_i [kg]
  Eigen::VectorXd inertias;        // j_i [kg m^2], about the link CM
  Eigen::VectorXd thrusterAngles;  // psi_i [rad], from link x-axis to thrust

  int linkCount() const { return static_cast<int>(masses.size()); }
  double totalMass() const { return masses.sum(); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Free-floating chain state. Angles accumulate continuously (never wrapped).
struct ChainState {
  Eigen::VectorXd theta;
  Eigen::Vector2d cm = Eigen::Vector2d::Zero();
  Eigen::VectorXd thetaDot;
  Eigen::Vector2d cmDot = Eigen::Vector2d::Zero();

  static ChainState atRest(int links);

  /// Flattened as (theta, p, thetaDot, pDot), length 2N + 4.
  Eigen::VectorXd flatten() const;
  static ChainState unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat);
  int linkCount() const { return static_cast<int>(theta.size()); }
};

/// Per-link inertial-frame forces.
struct ForcePair {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  static ForcePair zero(int links);
};

/// Caller-supplied external forces, evaluated at (time, state).
using ExternalForceField = std::function<ForcePair(double, const ChainState&)>;

/// Thrust magnitude per link as a function of time.
using ThrustSchedule = std::function<Eigen::VectorXd(double)>;

ExternalForceField noExternalForce(int links);

/// The theta-independent coupling matrices. They depend on the masses only,
/// so they are rebuilt whenever the masses change.
struct CouplingMatrices {
  Eigen::MatrixXd A;  // (N-1) x N, adjacent (1, 1)
  Eigen::MatrixXd D;  // (N-1) x N, adjacent (1, -1)
  Eigen::MatrixXd E;  // 2N x 2, summation
  Eigen::MatrixXd V;  // A^T (D Mbar D^T)^-1 A, symmetric
  Eigen::MatrixXd K;  // A^T (D Mbar D^T)^-1 D, rank N-1
  Eigen::VectorXd inverseMasses;
};

CouplingMatrices buildCoupling(const Eigen::VectorXd& masses);
inline CouplingMatrices buildCoupling(const ChainParams& params) {
  return buildCoupling(params.masses);
}

/// M_theta = J + L (S V S + C V C) L. Symmetric positive definite.
Eigen::MatrixXd massMatrix(const Eigen::VectorXd& halfLengths,
                           const Eigen::VectorXd& inertias,
                           const CouplingMatrices& coupling,
                           const Eigen::VectorXd& theta);
inline Eigen::MatrixXd massMatrix(const ChainParams& params,
                                  const CouplingMatrices& coupling,
                                  const Eigen::VectorXd& theta) {
  return massMatrix(params.halfLengths, params.inertias, coupling, theta);
}

/// W = L (S V C - C V S) L. Skew-symmetric.
Eigen::MatrixXd wMatrix(const Eigen::VectorXd& halfLengths,
                        const CouplingMatrices& coupling,
                        const Eigen::VectorXd& theta);
inline Eigen::MatrixXd wMatrix(const ChainParams& params,
                               const CouplingMatrices& coupling,
                               const Eigen::VectorXd& theta) {
  return wMatrix(params.halfLengths, coupling, theta);
}

/// External forces plus thrust along theta_i + psi_i.
ForcePair netForces(const ChainParams& params, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& thrust, const ForcePair& external);

/// Angular accelerations of the chain for given net forces. The mass and
/// inertia vectors are explicit so the estimator can evaluate the model at
/// candidate parameters; `coupling` must be built from `masses`.
Eigen::VectorXd angularAcceleration(const Eigen::VectorXd& halfLengths,
                                    const Eigen::VectorXd& inertias,
                                    const CouplingMatrices& coupling,
                                    const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& thetaDot,
                                    const ForcePair& forces);

/// Time derivative (thetaDot, pDot, thetaDDot, pDDot) of the flattened state.
Eigen::VectorXd dynamicsRhs(const ChainParams& params,
                            const CouplingMatrices& coupling,
                            const ChainState& state,
                            const Eigen::VectorXd& thrust,
                            const ForcePair& external);

Eigen::VectorXd dynamicsRhs(const ChainParams& params,
                            const CouplingMatrices& coupling,
                            const ChainState& state,
                            const Eigen::VectorXd& thrust,
                            const ExternalForceField& external, double time);

/// Control vector field of thruster `link` over the 4N augmented state
/// (theta, thetaDot, masses, inertias). Only the thetaDot block is nonzero.
Eigen::VectorXd controlField(const ChainParams& params,
                             const CouplingMatrices& coupling,
                             const Eigen::VectorXd& theta, int link);

struct LinkKinematics {
  Eigen::VectorXd x, y;
  Eigen::VectorXd xDot, yDot;
};

/// Link CM positions and velocities recovered from the chain CM and angles.
LinkKinematics reconstructLinks(const ChainParams& params,
                                const CouplingMatrices& coupling,
                                const ChainState& state);

struct Trajectory {
  std::vector<double> times;
  std::vector<ChainState> states;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step, double time)
      : std::runtime_error(what), step_(step), time_(time) {}
  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// One classical RK4 step with thrust held at its value at the step midpoint.
ChainState rk4Step(const ChainParams& params, const CouplingMatrices& coupling,
                   const ChainState& state, const Eigen::VectorXd& thrust,
                   const ExternalForceField& external, double time, double dt);

/// Fixed-step RK4 over [t0, t1]. The step count is round((t1 - t0) / dt) and
/// every step is stored. Thrust is sampled at each step midpoint and held.
Trajectory integrate(const ChainParams& params, const ChainState& initial,
                     const ThrustSchedule& thrust,
                     const ExternalForceField& external, double t0, double t1,
                     double dt);

}  // namespace salpchain
