#include "salpchain/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace salpchain {

Eigen::VectorXd AugmentedState::flatten() const {
  const Eigen::Index n = theta.size();
  Eigen::VectorXd out(4 * n);
  out << theta, thetaDot, masses, inertias;
  return out;
}

AugmentedState AugmentedState::unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() == 0 || flat.size() % 4 != 0) {
    throw std::invalid_argument("augmented state must have length 4N");
  }
  const Eigen::Index n = flat.size() / 4;
  return {flat.segment(0, n), flat.segment(n, n), flat.segment(2 * n, n),
          flat.segment(3 * n, n)};
}

AugmentedState AugmentedState::from(const ChainParams& params, const ChainState& state) {
  return {state.theta, state.thetaDot, params.masses, params.inertias};
}

void AugmentedState::validate() const {
  const Eigen::Index n = theta.size();
  if (n < 1 || thetaDot.size() != n || masses.size() != n || inertias.size() != n) {
    throw std::invalid_argument("AugmentedState: blocks must all have length N >= 1");
  }
  if ((masses.array() <= 0.0).any() || (inertias.array() <= 0.0).any()) {
    throw std::invalid_argument("AugmentedState: masses and inertias must be positive");
  }
}

NumericRank numericRank(const Eigen::MatrixXd& m) {
  NumericRank out;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  out.singularValues = svd.singularValues();
  const double smax = out.singularValues.size() ? out.singularValues[0] : 0.0;
  out.tolerance = static_cast<double>(std::max(m.rows(), m.cols())) *
                  std::numeric_limits<double>::epsilon() * smax;
  out.rank = static_cast<int>((out.singularValues.array() > out.tolerance).count());
  return out;
}

namespace {

ChainParams withParameters(const ChainParams& params, const AugmentedState& aug) {
  ChainParams p = params;
  p.masses = aug.masses;
  p.inertias = aug.inertias;
  return p;
}

/// L (S K Cbar - C K Sbar) Mbar, in matrix-product form.
Eigen::MatrixXd controlGainMatrix(const ChainParams& params,
                                  const CouplingMatrices& coupling,
                                  const Eigen::VectorXd& theta) {
  const Eigen::VectorXd dir = theta + params.thrusterAngles;
  const Eigen::VectorXd s = theta.array().sin();
  const Eigen::VectorXd c = theta.array().cos();
  const Eigen::VectorXd sbar = dir.array().sin();
  const Eigen::VectorXd cbar = dir.array().cos();
  const Eigen::MatrixXd f = s.asDiagonal() * coupling.K * cbar.asDiagonal() -
                            c.asDiagonal() * coupling.K * sbar.asDiagonal();
  return params.halfLengths.asDiagonal() * f * coupling.inverseMasses.asDiagonal();
}

Eigen::MatrixXd omega1Block(const ChainParams& params, const AugmentedState& aug,
                            const Eigen::VectorXd& thrust, const ForcePair& external) {
  const Eigen::Index n = aug.theta.size();
  const Eigen::ArrayXd dir = (aug.theta + params.thrusterAngles).array();
  const Eigen::ArrayXd sbar = dir.sin();
  const Eigen::ArrayXd cbar = dir.cos();
  const Eigen::ArrayXd mbar = aug.masses.array().inverse();
  const Eigen::ArrayXd u = thrust.array();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    omega(i, i) = -mbar[i] * sbar[i] * u[i];
    omega(i, n + i) = external.x[i] + cbar[i] * u[i];
    omega(n + i, i) = mbar[i] * cbar[i] * u[i];
    omega(n + i, n + i) = external.y[i] + sbar[i] * u[i];
  }
  return omega;
}

void checkInputs(const ChainParams& params, const AugmentedState& aug,
                 const Eigen::VectorXd& thrust, const ForcePair& external) {
  aug.validate();
  const Eigen::Index n = aug.theta.size();
  if (params.halfLengths.size() != n || params.thrusterAngles.size() != n ||
      thrust.size() != n || external.x.size() != n || external.y.size() != n) {
    throw std::invalid_argument("observability: inconsistent link counts");
  }
}

}  // namespace

Eigen::MatrixXd buildObservabilityMatrix(const ChainParams& params,
                                         const AugmentedState& aug,
                                         const Eigen::VectorXd& thrust,
                                         const ForcePair& external) {
  checkInputs(params, aug, thrust, external);
  const Eigen::Index n = aug.theta.size();
  const ChainParams p = withParameters(params, aug);
  const CouplingMatrices coupling = buildCoupling(p.masses);

  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(3 * n + n * n, 4 * n);
  o.topLeftCorner(2 * n, 2 * n) = omega1Block(params, aug, thrust, external);
  o.block(2 * n, 2 * n, n, n) =
      aug.inertias.cwiseInverse().asDiagonal() * massMatrix(p, coupling, aug.theta);

  const Eigen::MatrixXd gain = controlGainMatrix(p, coupling, aug.theta);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      o(3 * n + i * n + k, 3 * n + k) = gain(k, i);
    }
  }
  return o;
}

Eigen::VectorXd toTransformed(const ChainParams& params, const AugmentedState& aug) {
  const Eigen::Index n = aug.theta.size();
  const ChainParams p = withParameters(params, aug);
  const Eigen::MatrixXd m = massMatrix(p, buildCoupling(p.masses), aug.theta);
  Eigen::VectorXd x(4 * n);
  x << aug.theta, m.llt().solve(aug.inertias.cwiseProduct(aug.thetaDot)),
      aug.masses.cwiseInverse(), aug.inertias.cwiseInverse();
  return x;
}

AugmentedState fromTransformed(const ChainParams& params,
                               const Eigen::Ref<const Eigen::VectorXd>& xPrime) {
  const Eigen::Index n = xPrime.size() / 4;
  AugmentedState aug;
  aug.theta = xPrime.segment(0, n);
  aug.masses = xPrime.segment(2 * n, n).cwiseInverse();
  aug.inertias = xPrime.segment(3 * n, n).cwiseInverse();
  const ChainParams p = withParameters(params, aug);
  const Eigen::MatrixXd m = massMatrix(p, buildCoupling(p.masses), aug.theta);
  aug.thetaDot = aug.inertias.cwiseInverse().asDiagonal() * (m * xPrime.segment(n, n));
  return aug;
}

Eigen::VectorXd transformedMeasurement(const ChainParams& params,
                                       const Eigen::Ref<const Eigen::VectorXd>& xPrime,
                                       const Eigen::VectorXd& thrust,
                                       const ForcePair& external) {
  const Eigen::Index n = xPrime.size() / 4;
  const Eigen::VectorXd theta = xPrime.segment(0, n);
  const Eigen::VectorXd mbar = xPrime.segment(2 * n, n);
  const Eigen::VectorXd jbar = xPrime.segment(3 * n, n);
  ChainParams p = params;
  p.masses = mbar.cwiseInverse();
  p.inertias = jbar.cwiseInverse();
  const Eigen::MatrixXd m = massMatrix(p, buildCoupling(p.masses), theta);
  const Eigen::ArrayXd dir = (theta + params.thrusterAngles).array();
  Eigen::VectorXd h(3 * n);
  h.segment(0, n) = (mbar.array() * (external.x.array() + dir.cos() * thrust.array())).matrix();
  h.segment(n, n) = (mbar.array() * (external.y.array() + dir.sin() * thrust.array())).matrix();
  h.segment(2 * n, n) = jbar.asDiagonal() * (m * xPrime.segment(n, n));
  return h;
}

Eigen::VectorXd transformedControlField(const ChainParams& params,
                                        const Eigen::Ref<const Eigen::VectorXd>& xPrime,
                                        int link) {
  const Eigen::Index n = xPrime.size() / 4;
  ChainParams p = params;
  p.masses = xPrime.segment(2 * n, n).cwiseInverse();
  p.inertias = xPrime.segment(3 * n, n).cwiseInverse();
  const Eigen::VectorXd f = controlField(p, buildCoupling(p.masses), xPrime.segment(0, n), link);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * n);
  out.segment(n, n) = f.segment(n, n);
  return out;
}

Omega1Determinant omega1Determinant(const ChainParams& params,
                                    const AugmentedState& aug,
                                    const Eigen::VectorXd& thrust,
                                    const ForcePair& external) {
  checkInputs(params, aug, thrust, external);
  Omega1Determinant out;
  out.direct = omega1Block(params, aug, thrust, external).partialPivLu().determinant();
  const ConditionValues cond = thrusterConditions(params, aug.theta, thrust, external);
  double prod = 1.0;
  for (Eigen::Index i = 0; i < aug.theta.size(); ++i) {
    prod *= -1.0 / aug.masses[i];
    prod *= thrust[i] * cond.cond2[i];
  }
  out.viaSchur = prod;
  return out;
}

Eigen::MatrixXd fMatrix(const ChainParams& params, const CouplingMatrices& coupling,
                        const Eigen::VectorXd& theta) {
  const Eigen::Index n = theta.size();
  Eigen::MatrixXd f(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      f(i, j) = coupling.K(i, j) * std::sin((theta[i] - theta[j]) - params.thrusterAngles[j]);
    }
  }
  return f;
}

ConditionValues thrusterConditions(const ChainParams& params,
                                   const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& thrust,
                                   const ForcePair& external) {
  const Eigen::ArrayXd dir = (theta + params.thrusterAngles).array();
  ConditionValues out;
  out.cond1 = (thrust.array() * params.thrusterAngles.array().sin()).matrix();
  out.cond2 = (thrust.array() + dir.cos() * external.x.array() +
               dir.sin() * external.y.array())
                  .matrix();
  return out;
}

double defaultConditionTolerance(int links) { return 1e-9 * links; }

ObservabilityReport checkObservability(const ChainParams& params,
                                       const AugmentedState& aug,
                                       const Eigen::VectorXd& thrust,
                                       const ForcePair& external, double tol,
                                       double blockTolerance) {
  if (!(tol > 0.0)) throw std::invalid_argument("checkObservability: tol must be positive");
  ObservabilityReport r;
  r.matrix = buildObservabilityMatrix(params, aug, thrust, external);
  const NumericRank nr = numericRank(r.matrix);
  r.rank = nr.rank;
  r.rankTolerance = nr.tolerance;
  r.singularValues = nr.singularValues;

  const Omega1Determinant det = omega1Determinant(params, aug, thrust, external);
  r.omega1Det = det.direct;
  r.omega1DetViaSchur = det.viaSchur;

  const Eigen::Index n = aug.theta.size();
  const Eigen::MatrixXd omega1 = r.matrix.topLeftCorner(2 * n, 2 * n);
  r.omega1FullRank = numericRank(omega1).rank == 2 * n;

  const ChainParams p = withParameters(params, aug);
  const Eigen::MatrixXd gain = controlGainMatrix(p, buildCoupling(p.masses), aug.theta);
  const double gainScale = gain.cwiseAbs().maxCoeff();
  r.omega2HasZeroRow = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(gain.row(k).cwiseAbs().maxCoeff() > blockTolerance * gainScale)) {
      r.omega2HasZeroRow = true;
    }
  }
  r.blockFullRank = r.omega1FullRank && !r.omega2HasZeroRow;

  const ConditionValues cond = thrusterConditions(params, aug.theta, thrust, external);
  r.cond1 = cond.cond1;
  r.cond2 = cond.cond2;
  r.conditionTolerance = tol;
  r.observable = cond.cond1.cwiseAbs().minCoeff() > tol &&
                 cond.cond2.cwiseAbs().minCoeff() > tol;
  return r;
}

std::vector<ObservabilitySample> evaluateAlongTrajectory(
    const ChainParams& params, const Trajectory& trajectory,
    const std::vector<Eigen::VectorXd>& thrustAt, const ExternalForceField& external,
    double tol) {
  if (thrustAt.size() != trajectory.states.size()) {
    throw std::invalid_argument("evaluateAlongTrajectory: thrust/sample count mismatch");
  }
  std::vector<ObservabilitySample> out;
  out.reserve(trajectory.states.size());
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const ChainState& s = trajectory.states[k];
    const double t = trajectory.times[k];
    out.push_back({t, thrustAt[k],
                   checkObservability(params, s, thrustAt[k], external(t, s), tol)});
  }
  return out;
}

}  // namespace salpchain
