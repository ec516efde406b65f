#include "salpchain/ukf.hpp"

#include "salpchain/consistency.hpp"
#include "salpchain/imu_model.hpp"

#include <cmath>
#include <sstream>

namespace salpchain {

namespace {

constexpr double kRegularization = 1e-12;
constexpr double kPositivityFloor = 1e-9;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void FilterConfig::validate(int links) const {
  const Eigen::Index n = links;
  if (processNoise.size() != 4 * n) {
    throw std::invalid_argument("FilterConfig: processNoise must have 4N entries");
  }
  if ((processNoise.array() < 0.0).any() || (imuNoiseVariance.array() < 0.0).any()) {
    throw std::invalid_argument("FilterConfig: variances must be nonnegative");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("FilterConfig: dt must be positive");
  if (nominalMasses.size() != n || nominalInertias.size() != n ||
      (nominalMasses.array() <= 0.0).any() || (nominalInertias.array() <= 0.0).any()) {
    throw std::invalid_argument("FilterConfig: nominal masses/inertias must be N positive values");
  }
  if (!(sigma.alpha > 0.0)) throw std::invalid_argument("FilterConfig: alpha must be positive");
  if (!(4 * n + sigma.kappa > 0.0)) {
    throw std::invalid_argument("FilterConfig: n + kappa must be positive");
  }
}

FilterConfig makeFilterConfig(int links, double sigmaTheta, double sigmaThetaDot,
                              double sigmaMass, double sigmaInertia, double sigmaAcc,
                              double sigmaGyro, const Eigen::VectorXd& nominalMasses,
                              const Eigen::VectorXd& nominalInertias) {
  FilterConfig c;
  c.processNoise.resize(4 * links);
  c.processNoise << Eigen::VectorXd::Constant(links, sigmaTheta * sigmaTheta),
      Eigen::VectorXd::Constant(links, sigmaThetaDot * sigmaThetaDot),
      Eigen::VectorXd::Constant(links, sigmaMass * sigmaMass),
      Eigen::VectorXd::Constant(links, sigmaInertia * sigmaInertia);
  c.imuNoiseVariance << sigmaAcc * sigmaAcc, sigmaAcc * sigmaAcc, sigmaGyro * sigmaGyro;
  c.nominalMasses = nominalMasses;
  c.nominalInertias = nominalInertias;
  return c;
}

SigmaWeights sigmaWeights(int dim, const SigmaPointParams& p) {
  const double n = dim;
  SigmaWeights w;
  w.lambda = p.alpha * p.alpha * (n + p.kappa) - n;
  const double base = 1.0 / (2.0 * (n + w.lambda));
  w.mean = Eigen::VectorXd::Constant(2 * dim + 1, base);
  w.covariance = w.mean;
  w.mean[0] = w.lambda / (n + w.lambda);
  w.covariance[0] = w.mean[0] + 1.0 - p.alpha * p.alpha + p.beta;
  return w;
}

Eigen::MatrixXd sigmaPoints(const GaussianBelief& belief, const SigmaPointParams& params) {
  const Eigen::Index n = belief.mean.size();
  const SigmaWeights w = sigmaWeights(static_cast<int>(n), params);
  const Eigen::MatrixXd scaled = (static_cast<double>(n) + w.lambda) * symmetrized(belief.covariance);
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    llt.compute(scaled + kRegularization * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) {
      throw FilterError("sigmaPoints: covariance square root failed after regularization");
    }
  }
  const Eigen::MatrixXd root = llt.matrixL();
  Eigen::MatrixXd pts(n, 2 * n + 1);
  pts.col(0) = belief.mean;
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.col(1 + i) = belief.mean + root.col(i);
    pts.col(1 + n + i) = belief.mean - root.col(i);
  }
  return pts;
}

GaussianBelief unscentedMoments(const Eigen::MatrixXd& points, const SigmaWeights& weights) {
  // The centre weight is large and negative for small alpha, so the mean is
  // accumulated as offsets from the centre point.
  const Eigen::VectorXd centre = points.col(0);
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(points.rows());
  for (Eigen::Index i = 1; i < points.cols(); ++i) {
    offset += weights.mean[i] * (points.col(i) - centre);
  }
  GaussianBelief out;
  out.mean = centre + offset;
  const Eigen::MatrixXd dev = points.colwise() - out.mean;
  out.covariance = symmetrized(dev * weights.covariance.asDiagonal() * dev.transpose());
  return out;
}

UnscentedFilter::UnscentedFilter(ChainParams model, FilterConfig config)
    : model_(std::move(model)), config_(std::move(config)), links_(0) {
  links_ = static_cast<int>(model_.halfLengths.size());
  if (links_ < 1 || model_.thrusterAngles.size() != links_) {
    throw std::invalid_argument("UnscentedFilter: model needs N half-lengths and thruster angles");
  }
  config_.validate(links_);
  weights_ = sigmaWeights(4 * links_, config_.sigma);

  processNoiseInternal_ = config_.processNoise;
  if (config_.parameterMode == ParameterMode::Log) {
    const Eigen::Index n = links_;
    processNoiseInternal_.segment(2 * n, n).array() /= config_.nominalMasses.array().square();
    processNoiseInternal_.segment(3 * n, n).array() /= config_.nominalInertias.array().square();
  }
  measurementNoise_ = Eigen::MatrixXd::Zero(3 * links_, 3 * links_);
  for (int i = 0; i < links_; ++i) {
    measurementNoise_(i, i) = config_.imuNoiseVariance[0];
    measurementNoise_(links_ + i, links_ + i) = config_.imuNoiseVariance[1];
    measurementNoise_(2 * links_ + i, 2 * links_ + i) = config_.imuNoiseVariance[2];
  }
}

Eigen::VectorXd UnscentedFilter::propagate(const Eigen::VectorXd& x, const Eigen::VectorXd& thrust,
                                           const ForcePair& external) const {
  const Eigen::Index n = links_;
  const Eigen::VectorXd masses = x.segment(2 * n, n);
  const Eigen::VectorXd inertias = x.segment(3 * n, n);
  const CouplingMatrices coupling = buildCoupling(masses);
  ChainParams p = model_;
  p.masses = masses;
  p.inertias = inertias;

  auto rhs = [&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd theta = y.head(n);
    const Eigen::VectorXd rate = y.tail(n);
    const ForcePair f = netForces(p, theta, thrust, external);
    Eigen::VectorXd d(2 * n);
    d << rate, angularAcceleration(p.halfLengths, inertias, coupling, theta, rate, f);
    return d;
  };
  const double h = config_.dt;
  const Eigen::VectorXd y = x.head(2 * n);
  const Eigen::VectorXd k1 = rhs(y);
  const Eigen::VectorXd k2 = rhs(y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = rhs(y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = rhs(y + h * k3);
  Eigen::VectorXd out = x;
  out.head(2 * n) = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return out;
}

Eigen::VectorXd UnscentedFilter::measure(const Eigen::VectorXd& x, const Eigen::VectorXd& thrust,
                                         const ForcePair& external) const {
  const Eigen::Index n = links_;
  return cmImuMeasurement(model_.thrusterAngles, x.segment(0, n), x.segment(n, n),
                          x.segment(2 * n, n), thrust, external);
}

Eigen::VectorXd UnscentedFilter::internalToPhysical(const Eigen::VectorXd& x) const {
  if (config_.parameterMode == ParameterMode::Clamp) return x;
  const Eigen::Index n = links_;
  Eigen::VectorXd out = x;
  out.segment(2 * n, 2 * n) = x.segment(2 * n, 2 * n).array().exp().matrix();
  return out;
}

void UnscentedFilter::enforcePositiveParameters(Eigen::VectorXd& x) const {
  if (config_.parameterMode == ParameterMode::Log) return;
  const Eigen::Index n = links_;
  for (Eigen::Index i = 0; i < n; ++i) {
    x[2 * n + i] = std::max(x[2 * n + i], kPositivityFloor * config_.nominalMasses[i]);
    x[3 * n + i] = std::max(x[3 * n + i], kPositivityFloor * config_.nominalInertias[i]);
  }
}

Eigen::MatrixXd UnscentedFilter::guardedSigmaPoints(const GaussianBelief& belief) const {
  Eigen::MatrixXd pts = sigmaPoints(belief, config_.sigma);
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    Eigen::VectorXd col = pts.col(c);
    enforcePositiveParameters(col);
    pts.col(c) = col;
  }
  return pts;
}

GaussianBelief UnscentedFilter::predict(const GaussianBelief& belief,
                                        const Eigen::VectorXd& thrust,
                                        const ForcePair& external) const {
  const Eigen::MatrixXd pts = guardedSigmaPoints(belief);
  Eigen::MatrixXd moved(pts.rows(), pts.cols());
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    Eigen::VectorXd next = propagate(internalToPhysical(pts.col(c)), thrust, external);
    if (config_.parameterMode == ParameterMode::Log) {
      next.tail(2 * links_) = pts.col(c).tail(2 * links_);
    }
    moved.col(c) = next;
  }
  GaussianBelief out = unscentedMoments(moved, weights_);
  out.covariance.diagonal() += processNoiseInternal_;
  out.covariance = symmetrized(out.covariance);
  return out;
}

GaussianBelief UnscentedFilter::update(const GaussianBelief& belief,
                                       const Eigen::VectorXd& measurement,
                                       const Eigen::VectorXd& thrust, const ForcePair& external,
                                       UpdateDiagnostics* diagnostics) const {
  const Eigen::Index m = 3 * links_;
  if (measurement.size() != m) {
    std::ostringstream os;
    os << "update: expected a " << m << "-dimensional measurement, got " << measurement.size();
    throw std::invalid_argument(os.str());
  }
  const Eigen::MatrixXd pts = guardedSigmaPoints(belief);
  Eigen::MatrixXd zs(m, pts.cols());
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    zs.col(c) = measure(internalToPhysical(pts.col(c)), thrust, external);
  }
  const GaussianBelief zPred = unscentedMoments(zs, weights_);
  Eigen::MatrixXd s = zPred.covariance + measurementNoise_;

  // Cross covariance about the prior mean, consistent with the moments above.
  const Eigen::MatrixXd dx = pts.colwise() - belief.mean;
  const Eigen::MatrixXd dz = zs.colwise() - zPred.mean;
  const Eigen::MatrixXd pxz = dx * weights_.covariance.asDiagonal() * dz.transpose();

  bool regularized = false;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    s += kRegularization * Eigen::MatrixXd::Identity(m, m);
    llt.compute(s);
    regularized = true;
    if (llt.info() != Eigen::Success) {
      throw FilterError("update: innovation covariance is not positive definite");
    }
  }
  const Eigen::MatrixXd gain = llt.solve(pxz.transpose()).transpose();
  const Eigen::VectorXd innovation = measurement - zPred.mean;

  GaussianBelief out;
  out.mean = belief.mean + gain * innovation;
  out.covariance = symmetrized(belief.covariance - gain * s * gain.transpose());
  enforcePositiveParameters(out.mean);

  if (diagnostics) {
    diagnostics->predictedMeasurement = zPred.mean;
    diagnostics->innovation = innovation;
    diagnostics->innovationCovariance = s;
    diagnostics->regularized = regularized;
  }
  return out;
}

GaussianBelief UnscentedFilter::toInternal(const GaussianBelief& physical) const {
  if (config_.parameterMode == ParameterMode::Clamp) return physical;
  const Eigen::Index n = links_;
  GaussianBelief out = physical;
  Eigen::VectorXd jac = Eigen::VectorXd::Ones(4 * n);
  for (Eigen::Index i = 2 * n; i < 4 * n; ++i) {
    if (!(physical.mean[i] > 0.0)) {
      throw std::invalid_argument("toInternal: log parameterization needs positive parameters");
    }
    out.mean[i] = std::log(physical.mean[i]);
    jac[i] = 1.0 / physical.mean[i];
  }
  out.covariance = jac.asDiagonal() * physical.covariance * jac.asDiagonal();
  return out;
}

GaussianBelief UnscentedFilter::toPhysical(const GaussianBelief& internal) const {
  if (config_.parameterMode == ParameterMode::Clamp) return internal;
  const Eigen::Index n = links_;
  GaussianBelief out = internal;
  out.mean = internalToPhysical(internal.mean);
  Eigen::VectorXd jac = Eigen::VectorXd::Ones(4 * n);
  jac.tail(2 * n) = out.mean.tail(2 * n);
  out.covariance = jac.asDiagonal() * internal.covariance * jac.asDiagonal();
  return out;
}

FilterTrace runFilter(const UnscentedFilter& filter, const GaussianBelief& initial,
                      const FilterInputs& in) {
  const std::size_t steps = in.times.size();
  if (steps == 0 || in.measurements.size() != steps || in.thrust.size() != steps ||
      in.external.size() != steps || in.truth.size() != steps) {
    throw std::invalid_argument("runFilter: input series must share the time grid");
  }
  const double dt = filter.config().dt;
  FilterTrace trace;
  auto record = [&](std::size_t k, const GaussianBelief& internal, Eigen::VectorXd innovation,
                    bool regularized) {
    GaussianBelief phys = filter.toPhysical(internal);
    const Eigen::VectorXd err = phys.mean - in.truth[k];
    trace.times.push_back(in.times[k]);
    trace.errors.push_back(err);
    trace.sigma3.push_back(3.0 * phys.covariance.diagonal().cwiseMax(0.0).cwiseSqrt());
    trace.nees.push_back(nees(err, phys.covariance));
    trace.innovations.push_back(std::move(innovation));
    trace.regularized.push_back(regularized);
    trace.beliefs.push_back(std::move(phys));
  };

  GaussianBelief belief = filter.toInternal(initial);
  record(0, belief, Eigen::VectorXd(), false);
  for (std::size_t k = 1; k < steps; ++k) {
    if (std::abs(in.times[k] - in.times[k - 1] - dt) > 1e-9) {
      std::ostringstream os;
      os << "runFilter: time step " << k << " differs from filter dt " << dt;
      throw std::invalid_argument(os.str());
    }
    try {
      belief = filter.predict(belief, in.thrust[k], in.external[k - 1]);
      UpdateDiagnostics diag;
      belief = filter.update(belief, in.measurements[k], in.thrust[k], in.external[k], &diag);
      record(k, belief, diag.innovation, diag.regularized);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "filter step " << k << " (t = " << in.times[k] << "): " << e.what();
      throw FilterError(os.str());
    }
  }
  return trace;
}

}  // namespace salpchain
