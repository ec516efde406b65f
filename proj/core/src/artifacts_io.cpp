#include "salpchain/artifacts_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace salpchain {

namespace {

std::vector<std::string> indexed(const std::string& stem, int links) {
  std::vector<std::string> out;
  for (int i = 1; i <= links; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

void extend(std::vector<std::string>& a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

const char* const kStateStems[] = {"theta", "theta_dot", "mass", "inertia"};

nlohmann::json tableToJson(const Table& t) {
  return {{"columns", t.columns}, {"rows", t.rows}};
}

Table tableFromJson(const nlohmann::json& j) {
  Table t;
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.rows = j.at("rows").get<std::vector<std::vector<double>>>();
  return t;
}

}  // namespace

std::vector<std::string> truthColumns(int links) {
  std::vector<std::string> c{"time"};
  extend(c, indexed("theta", links));
  extend(c, indexed("theta_dot", links));
  extend(c, {"p_x", "p_y", "p_dot_x", "p_dot_y"});
  extend(c, indexed("thrust", links));
  return c;
}

std::vector<std::string> measurementColumns(int links) {
  std::vector<std::string> c{"time"};
  extend(c, indexed("acc_x", links));
  extend(c, indexed("acc_y", links));
  extend(c, indexed("gyro", links));
  return c;
}

std::vector<std::string> estimateColumns(int links) {
  std::vector<std::string> c{"time"};
  for (const char* prefix : {"est_", "sigma3_", "err_"}) {
    for (const char* stem : kStateStems) extend(c, indexed(std::string(prefix) + stem, links));
  }
  c.push_back("nees");
  return c;
}

std::vector<std::string> observabilityColumns(int links) {
  std::vector<std::string> c{"time"};
  extend(c, indexed("cond1", links));
  extend(c, indexed("cond2", links));
  extend(c, {"rank", "observable"});
  return c;
}

std::vector<std::string> snapshotColumns() {
  return {"time", "link", "x_start", "y_start", "x_end", "y_end"};
}

std::vector<std::string> neesSummaryColumns() {
  return {"time", "mean_nees", "fraction_in_band", "mean_in_band"};
}

std::string csvHeader(const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  return out;
}

std::string tableToCsv(const Table& table) {
  std::string out = csvHeader(table.columns);
  out += '\n';
  char buf[32];
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", r[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path(), "cannot create directory: " + ec.message());
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << text;
  f.close();
  if (!f) throw IoError(path, "write failed");
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path, "cannot open for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string artifactsToJson(const RunArtifacts& a) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["links"] = a.links;
  j["seed"] = a.seed;
  j["tables"] = {{"truth", tableToJson(a.truth)},
                 {"measurements", tableToJson(a.measurements)},
                 {"estimate", tableToJson(a.estimate)},
                 {"observability", tableToJson(a.observability)}};
  return j.dump(1) + "\n";
}

RunArtifacts artifactsFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RunArtifacts a;
  a.links = j.at("links").get<int>();
  a.seed = j.at("seed").get<std::uint64_t>();
  const auto& t = j.at("tables");
  a.truth = tableFromJson(t.at("truth"));
  a.measurements = tableFromJson(t.at("measurements"));
  a.estimate = tableFromJson(t.at("estimate"));
  a.observability = tableFromJson(t.at("observability"));
  return a;
}

Table neesSummaryTable(const std::vector<NeesSummaryRow>& rows) {
  Table t;
  t.columns = neesSummaryColumns();
  for (const auto& r : rows) {
    t.rows.push_back({r.time, r.meanNees, r.fractionInBand, r.averageInBand ? 1.0 : 0.0});
  }
  return t;
}

std::vector<std::filesystem::path> emit(const RunArtifacts& artifacts, OutputFormat format,
                                        const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError(directory, "cannot create directory: " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const auto path = directory / name;
    writeTextFile(path, text);
    written.push_back(path);
  };
  if (format == OutputFormat::Json) {
    put("run.json", artifactsToJson(artifacts));
    return written;
  }
  put("truth.csv", tableToCsv(artifacts.truth));
  put("measurements.csv", tableToCsv(artifacts.measurements));
  if (!artifacts.estimate.columns.empty()) put("estimate.csv", tableToCsv(artifacts.estimate));
  put("observability.csv", tableToCsv(artifacts.observability));
  return written;
}

}  // namespace salpchain
