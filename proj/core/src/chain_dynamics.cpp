#include "salpchain/chain_dynamics.hpp"

#include <cmath>
#include <sstream>

namespace salpchain {

namespace {

void requireLength(const Eigen::VectorXd& v, int n, const char* field) {
  if (v.size() != n) {
    std::ostringstream os;
    os << field << ": expected " << n << " entries, got " << v.size();
    throw std::invalid_argument(os.str());
  }
}

void requirePositive(const Eigen::VectorXd& v, const char* field) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      std::ostringstream os;
      os << field << "[" << i << "]: must be finite and strictly positive (got "
         << v[i] << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

Eigen::MatrixXd thetaTerms(const Eigen::VectorXd& halfLengths,
                           const CouplingMatrices& coupling,
                           const Eigen::VectorXd& theta, bool symmetricPart) {
  const Eigen::ArrayXd s = theta.array().sin();
  const Eigen::ArrayXd c = theta.array().cos();
  const Eigen::MatrixXd& V = coupling.V;
  // Diagonal scalings written elementwise: (diag(a) V diag(b))_ij = a_i V_ij b_j.
  Eigen::MatrixXd out;
  if (symmetricPart) {
    out = (s.matrix() * s.matrix().transpose() + c.matrix() * c.matrix().transpose())
              .cwiseProduct(V);
  } else {
    out = (s.matrix() * c.matrix().transpose() - c.matrix() * s.matrix().transpose())
              .cwiseProduct(V);
  }
  return halfLengths.asDiagonal() * out * halfLengths.asDiagonal();
}

}  // namespace

void ChainParams::validate() const {
  const int n = linkCount();
  if (n < 1) throw std::invalid_argument("masses: chain needs at least one link");
  requireLength(halfLengths, n, "halfLengths");
  requireLength(inertias, n, "inertias");
  requireLength(thrusterAngles, n, "thrusterAngles");
  requirePositive(halfLengths, "halfLengths");
  requirePositive(masses, "masses");
  requirePositive(inertias, "inertias");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(thrusterAngles[i])) {
      std::ostringstream os;
      os << "thrusterAngles[" << i << "]: must be finite";
      throw std::invalid_argument(os.str());
    }
  }
}

ChainState ChainState::atRest(int links) {
  ChainState s;
  s.theta = Eigen::VectorXd::Zero(links);
  s.thetaDot = Eigen::VectorXd::Zero(links);
  return s;
}

Eigen::VectorXd ChainState::flatten() const {
  const Eigen::Index n = theta.size();
  Eigen::VectorXd out(2 * n + 4);
  out << theta, cm, thetaDot, cmDot;
  return out;
}

ChainState ChainState::unflatten(const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() < 6 || (flat.size() - 4) % 2 != 0) {
    throw std::invalid_argument("flattened chain state must have length 2N + 4");
  }
  const Eigen::Index n = (flat.size() - 4) / 2;
  ChainState s;
  s.theta = flat.segment(0, n);
  s.cm = flat.segment<2>(n);
  s.thetaDot = flat.segment(n + 2, n);
  s.cmDot = flat.segment<2>(2 * n + 2);
  return s;
}

ForcePair ForcePair::zero(int links) {
  return {Eigen::VectorXd::Zero(links), Eigen::VectorXd::Zero(links)};
}

ExternalForceField noExternalForce(int links) {
  return [links](double, const ChainState&) { return ForcePair::zero(links); };
}

CouplingMatrices buildCoupling(const Eigen::VectorXd& masses) {
  const Eigen::Index n = masses.size();
  if (n < 1) throw std::invalid_argument("buildCoupling: empty mass vector");
  CouplingMatrices c;
  c.inverseMasses = masses.cwiseInverse();
  c.A = Eigen::MatrixXd::Zero(n - 1, n);
  c.D = Eigen::MatrixXd::Zero(n - 1, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    c.A(k, k) = 1.0;
    c.A(k, k + 1) = 1.0;
    c.D(k, k) = 1.0;
    c.D(k, k + 1) = -1.0;
  }
  c.E = Eigen::MatrixXd::Zero(2 * n, 2);
  c.E.block(0, 0, n, 1).setOnes();
  c.E.block(n, 1, n, 1).setOnes();

  if (n == 1) {
    c.V = Eigen::MatrixXd::Zero(1, 1);
    c.K = Eigen::MatrixXd::Zero(1, 1);
    return c;
  }
  const Eigen::MatrixXd dmd = c.D * c.inverseMasses.asDiagonal() * c.D.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(dmd);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("buildCoupling: D Mbar D^T is not positive definite");
  }
  c.V = c.A.transpose() * llt.solve(c.A);
  c.V = 0.5 * (c.V + c.V.transpose());
  c.K = c.A.transpose() * llt.solve(c.D);
  return c;
}

Eigen::MatrixXd massMatrix(const Eigen::VectorXd& halfLengths,
                           const Eigen::VectorXd& inertias,
                           const CouplingMatrices& coupling,
                           const Eigen::VectorXd& theta) {
  Eigen::MatrixXd m = thetaTerms(halfLengths, coupling, theta, true);
  m.diagonal() += inertias;
  return m;
}

Eigen::MatrixXd wMatrix(const Eigen::VectorXd& halfLengths,
                        const CouplingMatrices& coupling,
                        const Eigen::VectorXd& theta) {
  return thetaTerms(halfLengths, coupling, theta, false);
}

ForcePair netForces(const ChainParams& params, const Eigen::VectorXd& theta,
                    const Eigen::VectorXd& thrust, const ForcePair& external) {
  const Eigen::ArrayXd dir = (theta + params.thrusterAngles).array();
  return {external.x + (dir.cos() * thrust.array()).matrix(),
          external.y + (dir.sin() * thrust.array()).matrix()};
}

Eigen::VectorXd angularAcceleration(const Eigen::VectorXd& halfLengths,
                                    const Eigen::VectorXd& inertias,
                                    const CouplingMatrices& coupling,
                                    const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& thetaDot,
                                    const ForcePair& forces) {
  const Eigen::MatrixXd mTheta = massMatrix(halfLengths, inertias, coupling, theta);
  const Eigen::MatrixXd w = wMatrix(halfLengths, coupling, theta);
  const Eigen::VectorXd kfx = coupling.K * coupling.inverseMasses.cwiseProduct(forces.x);
  const Eigen::VectorXd kfy = coupling.K * coupling.inverseMasses.cwiseProduct(forces.y);
  const Eigen::ArrayXd s = theta.array().sin();
  const Eigen::ArrayXd c = theta.array().cos();
  const Eigen::VectorXd rhs =
      -w * thetaDot.cwiseAbs2() +
      (halfLengths.array() * (s * kfx.array() - c * kfy.array())).matrix();
  const Eigen::LLT<Eigen::MatrixXd> llt(mTheta);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("angularAcceleration: M_theta is not positive definite");
  }
  return llt.solve(rhs);
}

Eigen::VectorXd dynamicsRhs(const ChainParams& params,
                            const CouplingMatrices& coupling,
                            const ChainState& state,
                            const Eigen::VectorXd& thrust,
                            const ForcePair& external) {
  const int n = params.linkCount();
  const ForcePair f = netForces(params, state.theta, thrust, external);
  Eigen::VectorXd out(2 * n + 4);
  out.segment(0, n) = state.thetaDot;
  out.segment<2>(n) = state.cmDot;
  out.segment(n + 2, n) = angularAcceleration(params.halfLengths, params.inertias,
                                              coupling, state.theta, state.thetaDot, f);
  const double mTotal = params.totalMass();
  out[2 * n + 2] = f.x.sum() / mTotal;
  out[2 * n + 3] = f.y.sum() / mTotal;
  return out;
}

Eigen::VectorXd dynamicsRhs(const ChainParams& params,
                            const CouplingMatrices& coupling,
                            const ChainState& state,
                            const Eigen::VectorXd& thrust,
                            const ExternalForceField& external, double time) {
  return dynamicsRhs(params, coupling, state, thrust, external(time, state));
}

Eigen::VectorXd controlField(const ChainParams& params,
                             const CouplingMatrices& coupling,
                             const Eigen::VectorXd& theta, int link) {
  const int n = params.linkCount();
  if (link < 0 || link >= n) {
    throw std::out_of_range("controlField: link index " + std::to_string(link) +
                            " outside [0, " + std::to_string(n) + ")");
  }
  const double dir = theta[link] + params.thrusterAngles[link];
  const double mbar = coupling.inverseMasses[link];
  // Column `link` of L (S K Cbar - C K Sbar) Mbar.
  const Eigen::VectorXd kcol = coupling.K.col(link);
  const Eigen::VectorXd column =
      (params.halfLengths.array() *
       (theta.array().sin() * kcol.array() * std::cos(dir) -
        theta.array().cos() * kcol.array() * std::sin(dir)) *
       mbar)
          .matrix();
  const Eigen::MatrixXd mTheta = massMatrix(params, coupling, theta);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * n);
  out.segment(n, n) = mTheta.llt().solve(column);
  return out;
}

LinkKinematics reconstructLinks(const ChainParams& params,
                                const CouplingMatrices& coupling,
                                const ChainState& state) {
  const int n = params.linkCount();
  Eigen::MatrixXd t(n, n);
  t.topRows(n - 1) = coupling.D;
  t.row(n - 1) = params.masses.transpose() / params.totalMass();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);

  const Eigen::ArrayXd s = state.theta.array().sin();
  const Eigen::ArrayXd c = state.theta.array().cos();
  const Eigen::ArrayXd l = params.halfLengths.array();
  const Eigen::ArrayXd w = state.thetaDot.array();

  auto solve = [&](const Eigen::VectorXd& joint, double cmValue) {
    Eigen::VectorXd rhs(n);
    rhs.head(n - 1) = coupling.A * joint;
    rhs[n - 1] = cmValue;
    return Eigen::VectorXd(lu.solve(rhs));
  };

  LinkKinematics k;
  k.x = solve(-(l * c).matrix(), state.cm.x());
  k.y = solve(-(l * s).matrix(), state.cm.y());
  k.xDot = solve((l * s * w).matrix(), state.cmDot.x());
  k.yDot = solve(-(l * c * w).matrix(), state.cmDot.y());
  return k;
}

ChainState rk4Step(const ChainParams& params, const CouplingMatrices& coupling,
                   const ChainState& state, const Eigen::VectorXd& thrust,
                   const ExternalForceField& external, double time, double dt) {
  auto f = [&](const Eigen::VectorXd& x, double t) {
    return dynamicsRhs(params, coupling, ChainState::unflatten(x), thrust, external, t);
  };
  const Eigen::VectorXd x = state.flatten();
  const Eigen::VectorXd k1 = f(x, time);
  const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1, time + 0.5 * dt);
  const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2, time + 0.5 * dt);
  const Eigen::VectorXd k4 = f(x + dt * k3, time + dt);
  return ChainState::unflatten(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Trajectory integrate(const ChainParams& params, const ChainState& initial,
                     const ThrustSchedule& thrust,
                     const ExternalForceField& external, double t0, double t1,
                     double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
  params.validate();
  const CouplingMatrices coupling = buildCoupling(params);

  const auto steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((t1 - t0) / dt)));
  const double h = (t1 - t0) / static_cast<double>(steps);

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(initial);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const ChainState next =
        rk4Step(params, coupling, traj.states.back(), thrust(t + 0.5 * h), external, t, h);
    if (!next.flatten().allFinite()) {
      std::ostringstream os;
      os << "integrate: non-finite state at step " << k + 1 << " (t = " << t + h << ")";
      throw IntegrationError(os.str(), k + 1, t + h);
    }
    traj.times.push_back(t0 + static_cast<double>(k + 1) * h);
    traj.states.push_back(next);
  }
  return traj;
}

}  // namespace salpchain
