#pragma once

#include "salpchain/consistency.hpp"
#include "salpchain/scenario.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace salpchain {

// Column layouts. Link indices in column names are 1-based.
//   truth:         time, theta_i, theta_dot_i, p_x, p_y, p_dot_x, p_dot_y, thrust_i
//   measurements:  time, acc_x_i, acc_y_i, gyro_i
//   estimate:      time, est_{theta,theta_dot,mass,inertia}_i,
//                  sigma3_{...}_i, err_{...}_i, nees
//   observability: time, cond1_i, cond2_i, rank, observable
std::vector<std::string> truthColumns(int links);
std::vector<std::string> measurementColumns(int links);
std::vector<std::string> estimateColumns(int links);
std::vector<std::string> observabilityColumns(int links);
std::vector<std::string> snapshotColumns();
std::vector<std::string> neesSummaryColumns();

std::string csvHeader(const std::vector<std::string>& columns);

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Values are written with 17 significant digits.
std::string tableToCsv(const Table& table);
void writeTextFile(const std::filesystem::path& path, const std::string& text);
std::string readTextFile(const std::filesystem::path& path);

std::string artifactsToJson(const RunArtifacts& artifacts);
RunArtifacts artifactsFromJson(const std::string& text);

Table neesSummaryTable(const std::vector<NeesSummaryRow>& rows);

enum class OutputFormat { Csv, Json };

/// Writes truth.csv, measurements.csv, observability.csv and (when present)
/// estimate.csv, or run.json, into `directory`. Returns the files written.
std::vector<std::filesystem::path> emit(const RunArtifacts& artifacts, OutputFormat format,
                                        const std::filesystem::path& directory);

}  // namespace salpchain
