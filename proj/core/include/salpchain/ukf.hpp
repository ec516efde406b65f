#pragma once

#include "salpchain/chain_dynamics.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace salpchain {

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Scaled symmetric sigma-point set.
struct SigmaPointParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;
};

/// How mass and inertia stay positive. Clamp keeps the additive Gaussian
/// parameterization and clamps sigma points; Log runs the filter internally
/// on log-parameters.
enum class ParameterMode { Clamp, Log };

struct FilterConfig {
  Eigen::VectorXd processNoise;      // 4N variances, added once per predict
  Eigen::Vector3d imuNoiseVariance;  // (acc x, acc y, gyro) variance per IMU
  SigmaPointParams sigma;
  double dt = 0.01;
  ParameterMode parameterMode = ParameterMode::Clamp;
  // Scale for the positivity floor (1e-9 * nominal) and the log transform.
  Eigen::VectorXd nominalMasses;
  Eigen::VectorXd nominalInertias;

  void validate(int links) const;
};

/// Builds Q = blkdiag(s_theta^2 I, s_rate^2 I, s_m^2 I, s_j^2 I) and
/// R = diag(s_acc^2, s_acc^2, s_gyro^2).
FilterConfig makeFilterConfig(int links, double sigmaTheta, double sigmaThetaDot,
                              double sigmaMass, double sigmaInertia, double sigmaAcc,
                              double sigmaGyro, const Eigen::VectorXd& nominalMasses,
                              const Eigen::VectorXd& nominalInertias);

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UpdateDiagnostics {
  Eigen::VectorXd predictedMeasurement;
  Eigen::VectorXd innovation;
  Eigen::MatrixXd innovationCovariance;
  bool regularized = false;
};

struct SigmaWeights {
  Eigen::VectorXd mean;
  Eigen::VectorXd covariance;
  double lambda = 0.0;
};

SigmaWeights sigmaWeights(int dim, const SigmaPointParams& params);

/// Columns are the 2n + 1 sigma points of `belief`. Throws FilterError when
/// the covariance has no Cholesky factor even after adding 1e-12 I.
Eigen::MatrixXd sigmaPoints(const GaussianBelief& belief, const SigmaPointParams& params);

/// Weighted mean and covariance of transformed sigma points (columns).
GaussianBelief unscentedMoments(const Eigen::MatrixXd& points, const SigmaWeights& weights);

/// Additive-noise UKF over the augmented state (theta, thetaDot, m, j) with
/// CM-mounted IMUs on every link. Predict and update are pure: they return
/// a new belief and leave the filter untouched.
///
/// In ParameterMode::Log the beliefs passed to predict/update carry log m and
/// log j in the parameter blocks; toInternal/toPhysical convert.
class UnscentedFilter {
 public:
  /// Only halfLengths and thrusterAngles of `model` are used; masses and
  /// inertias come from the belief.
  UnscentedFilter(ChainParams model, FilterConfig config);

  GaussianBelief predict(const GaussianBelief& belief, const Eigen::VectorXd& thrust,
                         const ForcePair& external) const;

  GaussianBelief update(const GaussianBelief& belief, const Eigen::VectorXd& measurement,
                        const Eigen::VectorXd& thrust, const ForcePair& external,
                        UpdateDiagnostics* diagnostics = nullptr) const;

  /// One RK4 step of the augmented process model; parameters stay constant.
  Eigen::VectorXd propagate(const Eigen::VectorXd& physicalState,
                            const Eigen::VectorXd& thrust, const ForcePair& external) const;

  Eigen::VectorXd measure(const Eigen::VectorXd& physicalState,
                          const Eigen::VectorXd& thrust, const ForcePair& external) const;

  GaussianBelief toInternal(const GaussianBelief& physical) const;
  GaussianBelief toPhysical(const GaussianBelief& internal) const;

  const FilterConfig& config() const { return config_; }
  int linkCount() const { return links_; }

 private:
  Eigen::VectorXd internalToPhysical(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd guardedSigmaPoints(const GaussianBelief& belief) const;
  void enforcePositiveParameters(Eigen::VectorXd& x) const;

  ChainParams model_;
  FilterConfig config_;
  int links_;
  SigmaWeights weights_;
  Eigen::VectorXd processNoiseInternal_;
  Eigen::MatrixXd measurementNoise_;
};

struct FilterInputs {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> measurements;  // entry 0 is not used
  std::vector<Eigen::VectorXd> thrust;        // thrust held over (t_{k-1}, t_k]
  std::vector<ForcePair> external;            // at t_k; predict into k uses entry k-1
  std::vector<Eigen::VectorXd> truth;  // augmented truth, physical units
};

struct FilterTrace {
  std::vector<double> times;
  std::vector<GaussianBelief> beliefs;  // physical units
  std::vector<Eigen::VectorXd> errors;  // mean - truth
  std::vector<Eigen::VectorXd> sigma3;
  std::vector<double> nees;
  std::vector<Eigen::VectorXd> innovations;  // empty at k = 0
  std::vector<bool> regularized;
};

/// Runs predict + update for k = 1..K starting from `initial` (physical units).
FilterTrace runFilter(const UnscentedFilter& filter, const GaussianBelief& initial,
                      const FilterInputs& inputs);

}  // namespace salpchain
