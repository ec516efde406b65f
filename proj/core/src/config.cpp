#include "salpchain/config.hpp"

#include "salpchain/artifacts_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <initializer_list>
#include <set>

namespace salpchain {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& message, int line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int lineOfByte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
}

// Thin wrapper over a JSON object that knows its dotted path.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  void allowOnly(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(child(k), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Section section(const char* key) const { return {j_.at(key), child(key)}; }

  double number(const char* key) const {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t unsignedInt(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(child(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  Eigen::VectorXd vector(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  Eigen::Vector2d pair(const char* key) const {
    const Eigen::VectorXd v = vector(key);
    if (v.size() != 2) throw ConfigError(child(key), "expected two numbers");
    return v;
  }

  const json& raw(const char* key) const { return at(key); }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& at(const char* key) const {
    if (!j_.contains(key)) throw ConfigError(child(key), "missing required key");
    return j_.at(key);
  }
  const json& j_;
  std::string path_;
};

Waveform parseWaveform(const Section& s) {
  s.allowOnly({"type", "amplitude", "startTime", "onDuration", "offDuration", "phaseOffset"});
  const std::string type = s.string("type");
  Waveform w;
  if (type == "constant") {
    w = Waveform::constant(s.number("amplitude", 1.0));
  } else if (type == "squareWave") {
    w = Waveform::squareWave(s.number("amplitude", 1.0), s.number("startTime", 0.2),
                             s.number("onDuration", 0.1), s.number("offDuration", 0.2),
                             s.number("phaseOffset", 0.0));
  } else {
    throw ConfigError(s.child("type"), "expected \"constant\" or \"squareWave\", got \"" + type + "\"");
  }
  return w;
}

json waveformToJson(const Waveform& w) {
  if (w.kind == Waveform::Kind::Constant) return {{"type", "constant"}, {"amplitude", w.amplitude}};
  return {{"type", "squareWave"},      {"amplitude", w.amplitude},
          {"startTime", w.startTime},  {"onDuration", w.onDuration},
          {"offDuration", w.offDuration}, {"phaseOffset", w.phaseOffset}};
}

UncertaintyStd parseStd(const Section& s, const UncertaintyStd& fallback) {
  s.allowOnly({"theta", "thetaDot", "mass", "inertia"});
  return {s.number("theta", fallback.theta), s.number("thetaDot", fallback.thetaDot),
          s.number("mass", fallback.mass), s.number("inertia", fallback.inertia)};
}

json stdToJson(const UncertaintyStd& u) {
  return {{"theta", u.theta}, {"thetaDot", u.thetaDot}, {"mass", u.mass}, {"inertia", u.inertia}};
}

std::vector<double> toStd(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Scenario scenarioFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what(), lineOfByte(text, e.byte));
  }
  const Section root(doc, "");
  root.allowOnly({"schemaVersion", "chain", "initialState", "thrust", "externalForces", "imu",
                  "noise", "filter", "sim"});
  const std::uint64_t version = root.unsignedInt("schemaVersion");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("schemaVersion", "unsupported version " + std::to_string(version));
  }

  Scenario s = defaultReferenceScenario();
  const Section chain = root.section("chain");
  chain.allowOnly({"halfLengths", "masses", "inertias", "thrusterAngles"});
  s.chain.halfLengths = chain.vector("halfLengths");
  s.chain.masses = chain.vector("masses");
  s.chain.inertias = chain.vector("inertias");
  s.chain.thrusterAngles = chain.vector("thrusterAngles");
  const int n = static_cast<int>(s.chain.masses.size());

  s.initialState = ChainState::atRest(n);
  if (root.has("initialState")) {
    const Section init = root.section("initialState");
    init.allowOnly({"theta", "thetaDot", "cm", "cmDot"});
    if (init.has("theta")) s.initialState.theta = init.vector("theta");
    if (init.has("thetaDot")) s.initialState.thetaDot = init.vector("thetaDot");
    if (init.has("cm")) s.initialState.cm = init.pair("cm");
    if (init.has("cmDot")) s.initialState.cmDot = init.pair("cmDot");
  }

  s.thrust.assign(static_cast<std::size_t>(std::max(n, 0)), Waveform::squareWave(1.0, 0.2, 0.1, 0.2));
  if (root.has("thrust")) {
    const Section thrust = root.section("thrust");
    thrust.allowOnly({"all", "links"});
    if (thrust.has("all") && thrust.has("links")) {
      throw ConfigError("thrust", "give either \"all\" or \"links\", not both");
    }
    if (thrust.has("all")) {
      s.thrust.assign(s.thrust.size(), parseWaveform(thrust.section("all")));
    } else if (thrust.has("links")) {
      const json& links = thrust.raw("links");
      if (!links.is_array()) throw ConfigError("thrust.links", "expected an array");
      s.thrust.clear();
      for (std::size_t i = 0; i < links.size(); ++i) {
        s.thrust.push_back(parseWaveform(Section(links[i], "thrust.links[" + std::to_string(i) + "]")));
      }
    }
  }

  if (root.has("externalForces")) {
    const Section ext = root.section("externalForces");
    ext.allowOnly({"type", "coefficient"});
    const std::string type = ext.string("type");
    if (type == "none") {
      s.externalForces = {};
    } else if (type == "linear-drag") {
      s.externalForces = {ExternalForceSpec::Kind::LinearDrag, ext.number("coefficient")};
    } else {
      throw ConfigError("externalForces.type", "expected \"none\" or \"linear-drag\", got \"" + type + "\"");
    }
  }

  if (root.has("imu")) {
    const Section imu = root.section("imu");
    imu.allowOnly({"offsets", "accelModel"});
    if (imu.has("accelModel")) {
      const std::string model = imu.string("accelModel");
      if (model == "applied-force") {
        s.accelModel = AccelModel::AppliedForce;
      } else if (model == "kinematic") {
        s.accelModel = AccelModel::Kinematic;
      } else {
        throw ConfigError("imu.accelModel",
                          "expected \"applied-force\" or \"kinematic\", got \"" + model + "\"");
      }
    }
    const json empty = json::array();
    const json& offs = imu.has("offsets") ? imu.raw("offsets") : empty;
    if (!offs.is_array()) throw ConfigError("imu.offsets", "expected an array of [x, y] pairs");
    for (std::size_t i = 0; i < offs.size(); ++i) {
      const std::string path = "imu.offsets[" + std::to_string(i) + "]";
      if (!offs[i].is_array() || offs[i].size() != 2 || !offs[i][0].is_number() ||
          !offs[i][1].is_number()) {
        throw ConfigError(path, "expected [x, y]");
      }
      s.imuOffsets.emplace_back(offs[i][0].get<double>(), offs[i][1].get<double>());
    }
  }

  if (root.has("noise")) {
    const Section noise = root.section("noise");
    noise.allowOnly({"imu", "initialStd", "process"});
    if (noise.has("imu")) {
      const Section imu = noise.section("imu");
      imu.allowOnly({"sigmaAcc", "sigmaGyro"});
      s.imuNoise = {imu.number("sigmaAcc", s.imuNoise.sigmaAcc),
                    imu.number("sigmaGyro", s.imuNoise.sigmaGyro)};
    }
    if (noise.has("initialStd")) s.initialStd = parseStd(noise.section("initialStd"), s.initialStd);
    if (noise.has("process")) s.processStd = parseStd(noise.section("process"), s.processStd);
  }

  if (root.has("filter")) {
    const Section filter = root.section("filter");
    filter.allowOnly({"alpha", "beta", "kappa", "parameterMode", "conditionTolerance"});
    s.sigmaPoints = {filter.number("alpha", s.sigmaPoints.alpha),
                     filter.number("beta", s.sigmaPoints.beta),
                     filter.number("kappa", s.sigmaPoints.kappa)};
    if (filter.has("parameterMode")) {
      const std::string mode = filter.string("parameterMode");
      if (mode == "clamp") {
        s.parameterMode = ParameterMode::Clamp;
      } else if (mode == "log") {
        s.parameterMode = ParameterMode::Log;
      } else {
        throw ConfigError("filter.parameterMode", "expected \"clamp\" or \"log\", got \"" + mode + "\"");
      }
    }
    s.conditionTolerance = filter.number("conditionTolerance", 0.0);
  }

  if (root.has("sim")) {
    const Section sim = root.section("sim");
    sim.allowOnly({"duration", "imuRate", "integratorDt", "seed"});
    s.duration = sim.number("duration", s.duration);
    s.imuRate = sim.number("imuRate", s.imuRate);
    s.integratorDt = sim.number("integratorDt", s.integratorDt);
    if (sim.has("seed")) s.seed = sim.unsignedInt("seed");
  }

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon == std::string::npos) throw ConfigError("", msg);
    throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
  }
  return s;
}

std::string scenarioToJson(const Scenario& s) {
  json j;
  j["schemaVersion"] = kConfigSchemaVersion;
  j["chain"] = {{"halfLengths", toStd(s.chain.halfLengths)},
                {"masses", toStd(s.chain.masses)},
                {"inertias", toStd(s.chain.inertias)},
                {"thrusterAngles", toStd(s.chain.thrusterAngles)}};
  j["initialState"] = {{"theta", toStd(s.initialState.theta)},
                       {"thetaDot", toStd(s.initialState.thetaDot)},
                       {"cm", {s.initialState.cm.x(), s.initialState.cm.y()}},
                       {"cmDot", {s.initialState.cmDot.x(), s.initialState.cmDot.y()}}};
  json links = json::array();
  for (const auto& w : s.thrust) links.push_back(waveformToJson(w));
  j["thrust"] = {{"links", links}};
  if (s.externalForces.kind == ExternalForceSpec::Kind::LinearDrag) {
    j["externalForces"] = {{"type", "linear-drag"}, {"coefficient", s.externalForces.coefficient}};
  } else {
    j["externalForces"] = {{"type", "none"}};
  }
  json offs = json::array();
  for (const auto& o : s.imuOffsets) offs.push_back({o.x(), o.y()});
  j["imu"] = {{"offsets", offs},
              {"accelModel", s.accelModel == AccelModel::Kinematic ? "kinematic" : "applied-force"}};
  j["noise"] = {{"imu", {{"sigmaAcc", s.imuNoise.sigmaAcc}, {"sigmaGyro", s.imuNoise.sigmaGyro}}},
                {"initialStd", stdToJson(s.initialStd)},
                {"process", stdToJson(s.processStd)}};
  j["filter"] = {{"alpha", s.sigmaPoints.alpha},
                 {"beta", s.sigmaPoints.beta},
                 {"kappa", s.sigmaPoints.kappa},
                 {"parameterMode", s.parameterMode == ParameterMode::Log ? "log" : "clamp"},
                 {"conditionTolerance", s.conditionTolerance}};
  j["sim"] = {{"duration", s.duration},
              {"imuRate", s.imuRate},
              {"integratorDt", s.integratorDt},
              {"seed", s.seed}};
  return j.dump(2) + "\n";
}

Scenario loadScenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = readTextFile(path);
  } catch (const IoError& e) {
    throw ConfigError("", e.what());
  }
  return scenarioFromJson(text);
}

}  // namespace salpchain
