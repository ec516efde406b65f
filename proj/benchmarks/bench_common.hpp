#pragma once

#include "salpchain/chain_dynamics.hpp"

#include <cmath>

namespace salpchain::bench {

// Uniform chain with thrusters alternating +-pi/3 and a gently bent shape.
inline ChainParams chain(int n) {
  ChainParams p;
  p.halfLengths = Eigen::VectorXd::Constant(n, 0.125);
  p.masses = Eigen::VectorXd::Constant(n, 0.5);
  p.inertias = Eigen::VectorXd::Constant(n, 2.6e-3);
  p.thrusterAngles.resize(n);
  for (int i = 0; i < n; ++i) p.thrusterAngles[i] = i % 2 ? -M_PI / 3 : M_PI / 3;
  return p;
}

inline ChainState bentState(int n) {
  ChainState s = ChainState::atRest(n);
  for (int i = 0; i < n; ++i) {
    s.theta[i] = 0.3 * std::sin(0.7 * i);
    s.thetaDot[i] = 0.2 * std::cos(0.5 * i);
  }
  return s;
}

}  // namespace salpchain::bench
