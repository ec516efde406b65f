#include "oracles.hpp"

#include <cmath>

namespace salpchain::testing {

ConstrainedAccelerations constrainedMultibody(const ChainParams& params, const ChainState& state,
                                              const Eigen::VectorXd& thrust,
                                              const ForcePair& external) {
  const int n = params.linkCount();
  const int dof = 3 * n;
  const int joints = n - 1;
  const Eigen::VectorXd& l = params.halfLengths;
  const Eigen::VectorXd& th = state.theta;
  const Eigen::VectorXd& w = state.thetaDot;

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dof + 2 * joints, dof + 2 * joints);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dof + 2 * joints);
  for (int i = 0; i < n; ++i) {
    kkt(3 * i, 3 * i) = params.masses[i];
    kkt(3 * i + 1, 3 * i + 1) = params.masses[i];
    kkt(3 * i + 2, 3 * i + 2) = params.inertias[i];
    const double dir = th[i] + params.thrusterAngles[i];
    rhs[3 * i] = external.x[i] + thrust[i] * std::cos(dir);
    rhs[3 * i + 1] = external.y[i] + thrust[i] * std::sin(dir);
  }
  // Joint i ties the +l end of link i to the -l end of link i+1:
  //   x_i + l_i cos th_i - x_{i+1} + l_{i+1} cos th_{i+1} = 0, same for y with sin.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * joints, dof);
  Eigen::VectorXd gammaRhs(2 * joints);
  for (int i = 0; i < joints; ++i) {
    const int a = 3 * i, b = 3 * (i + 1);
    g(2 * i, a) = 1.0;
    g(2 * i, b) = -1.0;
    g(2 * i, a + 2) = -l[i] * std::sin(th[i]);
    g(2 * i, b + 2) = -l[i + 1] * std::sin(th[i + 1]);
    g(2 * i + 1, a + 1) = 1.0;
    g(2 * i + 1, b + 1) = -1.0;
    g(2 * i + 1, a + 2) = l[i] * std::cos(th[i]);
    g(2 * i + 1, b + 2) = l[i + 1] * std::cos(th[i + 1]);
    // G qdd = -(dG/dt) qd
    gammaRhs[2 * i] = l[i] * std::cos(th[i]) * w[i] * w[i] +
                      l[i + 1] * std::cos(th[i + 1]) * w[i + 1] * w[i + 1];
    gammaRhs[2 * i + 1] = l[i] * std::sin(th[i]) * w[i] * w[i] +
                          l[i + 1] * std::sin(th[i + 1]) * w[i + 1] * w[i + 1];
  }
  kkt.block(0, dof, dof, 2 * joints) = g.transpose();
  kkt.block(dof, 0, 2 * joints, dof) = g;
  rhs.tail(2 * joints) = gammaRhs;

  const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  ConstrainedAccelerations out;
  out.linkXdd.resize(n);
  out.linkYdd.resize(n);
  out.thetaDd.resize(n);
  for (int i = 0; i < n; ++i) {
    out.linkXdd[i] = sol[3 * i];
    out.linkYdd[i] = sol[3 * i + 1];
    out.thetaDd[i] = sol[3 * i + 2];
  }
  out.jointForceX.resize(joints);
  out.jointForceY.resize(joints);
  for (int i = 0; i < joints; ++i) {
    out.jointForceX[i] = -sol[dof + 2 * i];
    out.jointForceY[i] = -sol[dof + 2 * i + 1];
  }
  return out;
}

WalkedLinks walkLinks(const ChainParams& params, const ChainState& state) {
  const int n = params.linkCount();
  const Eigen::VectorXd& l = params.halfLengths;
  WalkedLinks w;
  w.x = Eigen::VectorXd::Zero(n);
  w.y = Eigen::VectorXd::Zero(n);
  w.xDot = Eigen::VectorXd::Zero(n);
  w.yDot = Eigen::VectorXd::Zero(n);
  for (int i = 1; i < n; ++i) {
    const double c0 = std::cos(state.theta[i - 1]), s0 = std::sin(state.theta[i - 1]);
    const double c1 = std::cos(state.theta[i]), s1 = std::sin(state.theta[i]);
    w.x[i] = w.x[i - 1] + l[i - 1] * c0 + l[i] * c1;
    w.y[i] = w.y[i - 1] + l[i - 1] * s0 + l[i] * s1;
    w.xDot[i] = w.xDot[i - 1] - l[i - 1] * s0 * state.thetaDot[i - 1] - l[i] * s1 * state.thetaDot[i];
    w.yDot[i] = w.yDot[i - 1] + l[i - 1] * c0 * state.thetaDot[i - 1] + l[i] * c1 * state.thetaDot[i];
  }
  const double mt = params.masses.sum();
  const double sx = state.cm.x() - params.masses.dot(w.x) / mt;
  const double sy = state.cm.y() - params.masses.dot(w.y) / mt;
  const double vx = state.cmDot.x() - params.masses.dot(w.xDot) / mt;
  const double vy = state.cmDot.y() - params.masses.dot(w.yDot) / mt;
  w.x.array() += sx;
  w.y.array() += sy;
  w.xDot.array() += vx;
  w.yDot.array() += vy;
  return w;
}

Eigen::MatrixXd fMatrixProduct(const ChainParams& params, const Eigen::VectorXd& theta) {
  const int n = params.linkCount();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n - 1, n), d = Eigen::MatrixXd::Zero(n - 1, n);
  for (int i = 0; i + 1 < n; ++i) {
    a(i, i) = a(i, i + 1) = 1.0;
    d(i, i) = 1.0;
    d(i, i + 1) = -1.0;
  }
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  if (n > 1) {
    const Eigen::MatrixXd mbar = params.masses.cwiseInverse().asDiagonal();
    k = a.transpose() * (d * mbar * d.transpose()).inverse() * d;
  }
  const Eigen::VectorXd dir = theta + params.thrusterAngles;
  const Eigen::MatrixXd s = theta.array().sin().matrix().asDiagonal();
  const Eigen::MatrixXd c = theta.array().cos().matrix().asDiagonal();
  const Eigen::MatrixXd sb = dir.array().sin().matrix().asDiagonal();
  const Eigen::MatrixXd cb = dir.array().cos().matrix().asDiagonal();
  return s * k * cb - c * k * sb;
}

Eigen::Vector2d mountPosition(const ChainParams& params, const ChainState& state,
                              const ImuMount& mount) {
  const WalkedLinks w = walkLinks(params, state);
  const double th = state.theta[mount.link];
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(th).toRotationMatrix();
  return Eigen::Vector2d(w.x[mount.link], w.y[mount.link]) + rot * mount.offset;
}

Eigen::Vector2d centralDifferenceAccel(const ChainParams& params, const ChainState& state,
                                       const Eigen::VectorXd& thrust, const ForcePair& external,
                                       const ImuMount& mount, double h) {
  const CouplingMatrices coupling = buildCoupling(params);
  const ExternalForceField field = [&](double, const ChainState&) { return external; };
  constexpr int kSubsteps = 64;
  auto shoot = [&](double sign) {
    ChainState s = state;
    for (int i = 0; i < kSubsteps; ++i) {
      s = rk4Step(params, coupling, s, thrust, field, 0.0, sign * h / kSubsteps);
    }
    return mountPosition(params, s, mount);
  };
  return (shoot(1.0) - 2.0 * mountPosition(params, state, mount) + shoot(-1.0)) / (h * h);
}

}  // namespace salpchain::testing
