#pragma once

#include <Eigen/Dense>

#include <vector>

namespace salpchain {

/// e^T P^-1 e. Throws std::runtime_error if P is not positive definite.
double nees(const Eigen::VectorXd& error, const Eigen::MatrixXd& covariance);

struct ChiSquareBand {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v) const { return v >= lower && v <= upper; }
};

/// Two-sided interval holding `probability` of a chi-square(dof) variable.
ChiSquareBand chiSquareBand(double dof, double probability = 0.95);

/// Band for the average of `runs` independent chi-square(dof) draws.
ChiSquareBand averagedChiSquareBand(double dof, int runs, double probability = 0.95);

struct NeesSummaryRow {
  double time = 0.0;
  double meanNees = 0.0;
  double fractionInBand = 0.0;  // share of runs whose NEES is in the per-run band
  bool averageInBand = false;   // mean NEES inside the averaged band
};

/// `neesByRun[r][k]` is run r at time k. Every run must have the same length.
std::vector<NeesSummaryRow> summarizeNees(const std::vector<std::vector<double>>& neesByRun,
                                          const std::vector<double>& times, int dof,
                                          double probability = 0.95);

}  // namespace salpchain
