#include "salpchain/consistency.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <stdexcept>

namespace salpchain {

double nees(const Eigen::VectorXd& error, const Eigen::MatrixXd& covariance) {
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("nees: covariance is not positive definite");
  }
  return error.dot(llt.solve(error));
}

ChiSquareBand chiSquareBand(double dof, double probability) {
  const boost::math::chi_squared dist(dof);
  const double tail = 0.5 * (1.0 - probability);
  return {boost::math::quantile(dist, tail), boost::math::quantile(dist, 1.0 - tail)};
}

ChiSquareBand averagedChiSquareBand(double dof, int runs, double probability) {
  const ChiSquareBand total = chiSquareBand(dof * runs, probability);
  return {total.lower / runs, total.upper / runs};
}

std::vector<NeesSummaryRow> summarizeNees(const std::vector<std::vector<double>>& neesByRun,
                                          const std::vector<double>& times, int dof,
                                          double probability) {
  if (neesByRun.empty()) return {};
  const ChiSquareBand single = chiSquareBand(dof, probability);
  const int runs = static_cast<int>(neesByRun.size());
  const ChiSquareBand averaged = averagedChiSquareBand(dof, runs, probability);
  std::vector<NeesSummaryRow> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    double sum = 0.0;
    int inside = 0;
    for (const auto& run : neesByRun) {
      if (run.size() != times.size()) {
        throw std::invalid_argument("summarizeNees: run length does not match time grid");
      }
      sum += run[k];
      inside += single.contains(run[k]) ? 1 : 0;
    }
    NeesSummaryRow row;
    row.time = times[k];
    row.meanNees = sum / runs;
    row.fractionInBand = static_cast<double>(inside) / runs;
    row.averageInBand = averaged.contains(row.meanNees);
    out.push_back(row);
  }
  return out;
}

}  // namespace salpchain
