#include "cam/cli/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cam::cli {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::kParse, what); }

const char* model_name(dyn::ModelKind k) {
  switch (k) {
    case dyn::ModelKind::kKepler: return "kepler";
    case dyn::ModelKind::kJ2: return "j2";
    case dyn::ModelKind::kCr3bp: return "cr3bp";
  }
  return "kepler";
}

dyn::ModelKind model_from_name(const std::string& s) {
  if (s == "kepler") return dyn::ModelKind::kKepler;
  if (s == "j2") return dyn::ModelKind::kJ2;
  if (s == "cr3bp") return dyn::ModelKind::kCr3bp;
  parse_error("unknown dynamics model '" + s + "'");
}

json vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json matrix(const conj::Matrix6d& m) {
  json rows = json::array();
  for (int i = 0; i < 6; ++i) {
    json row = json::array();
    for (int j = 0; j < 6; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

Eigen::Vector3d read_vec(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) parse_error(std::string(what) + " must be an array of 3 numbers");
  return {number(j[0], what), number(j[1], what), number(j[2], what)};
}

// 6x6, or 3x3 for a position-only covariance.
conj::Matrix6d read_cov(const json& j, const char* what) {
  if (!j.is_array() || (j.size() != 6 && j.size() != 3)) {
    parse_error(std::string(what) + " must be a 3x3 or 6x6 array");
  }
  const std::size_t n = j.size();
  conj::Matrix6d m = conj::Matrix6d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) parse_error(std::string(what) + " rows have the wrong length");
    for (std::size_t k = 0; k < n; ++k) m(static_cast<int>(i), static_cast<int>(k)) = number(j[i][k], what);
  }
  return m;
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field '") + key + "'");
  return *it;
}

json object_json(const dyn::SpacecraftState& s, const conj::Matrix6d& cov) {
  return {{"r_km", vec(s.r)}, {"v_km_s", vec(s.v)}, {"covariance_km2", matrix(cov)}};
}

void read_object(const json& j, dyn::SpacecraftState& s, conj::Matrix6d& cov, dyn::Frame frame) {
  if (!j.is_object()) parse_error("object entries must be JSON objects");
  s.r = read_vec(field(j, "r_km"), "r_km");
  s.v = read_vec(field(j, "v_km_s"), "v_km_s");
  s.epoch = 0.0;
  s.frame = frame;
  cov = read_cov(field(j, "covariance_km2"), "covariance_km2");
}

}  // namespace

std::string scenario_to_json(const ScenarioFile& sc) {
  const auto& e = sc.event;
  json dynamics = {{"model", model_name(e.dynamics.kind)}};
  if (e.dynamics.earth()) {
    dynamics["mu_km3_s2"] = e.dynamics.mu;
    dynamics["r_e_km"] = e.dynamics.r_e;
    dynamics["j2"] = e.dynamics.j2;
  } else {
    dynamics["mass_ratio"] = e.dynamics.mass_ratio;
    dynamics["char_length_km"] = e.dynamics.char_length;
    dynamics["char_time_s"] = e.dynamics.char_time;
  }
  json j = {{"schema_version", sc.schema_version},
            {"name", sc.name},
            {"dynamics", dynamics},
            {"frame", e.dynamics.earth() ? "ECI" : "SYNODIC"},
            {"hbr_km", e.hbr},
            {"primary", object_json(e.primary, e.cov_primary)},
            {"secondary", object_json(e.secondary, e.cov_secondary)}};
  json d = json::object();
  const auto& df = sc.defaults;
  if (df.order) d["order"] = *df.order;
  if (df.mode) d["mode"] = *df.mode;
  if (df.node_seconds) d["node_seconds"] = *df.node_seconds;
  if (df.node_orbits) d["node_orbits"] = *df.node_orbits;
  if (df.target_poc) d["target_poc"] = *df.target_poc;
  if (df.umax) d["umax"] = *df.umax;
  if (df.fixed_dir) d["fixed_dir"] = *df.fixed_dir;
  j["defaults"] = d;
  return j.dump(2) + "\n";
}

ScenarioFile scenario_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    parse_error(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) parse_error("scenario must be a JSON object");
  ScenarioFile sc;
  const json& version = field(j, "schema_version");
  if (!version.is_number_integer()) parse_error("schema_version must be an integer");
  sc.schema_version = version.get<int>();
  if (sc.schema_version != kSchemaVersion) {
    throw Error(ErrorKind::kValidation, "unsupported schema_version " + std::to_string(sc.schema_version));
  }
  if (auto it = j.find("name"); it != j.end() && it->is_string()) sc.name = it->get<std::string>();

  auto& e = sc.event;
  const json& dynj = field(j, "dynamics");
  if (!dynj.is_object()) parse_error("dynamics must be an object");
  const json& model = field(dynj, "model");
  if (!model.is_string()) parse_error("dynamics.model must be a string");
  e.dynamics.kind = model_from_name(model.get<std::string>());
  auto opt = [&](const char* key, double& out) {
    if (auto it = dynj.find(key); it != dynj.end()) out = number(*it, key);
  };
  opt("mu_km3_s2", e.dynamics.mu);
  opt("r_e_km", e.dynamics.r_e);
  opt("j2", e.dynamics.j2);
  opt("mass_ratio", e.dynamics.mass_ratio);
  opt("char_length_km", e.dynamics.char_length);
  opt("char_time_s", e.dynamics.char_time);

  dyn::Frame frame = e.dynamics.frame();
  if (auto it = j.find("frame"); it != j.end()) {
    if (!it->is_string()) parse_error("frame must be a string");
    const std::string f = it->get<std::string>();
    if (f == "ECI") {
      frame = dyn::Frame::kEci;
    } else if (f == "SYNODIC") {
      frame = dyn::Frame::kSynodic;
    } else {
      parse_error("unknown frame '" + f + "'");
    }
  }
  e.hbr = number(field(j, "hbr_km"), "hbr_km");
  read_object(field(j, "primary"), e.primary, e.cov_primary, frame);
  read_object(field(j, "secondary"), e.secondary, e.cov_secondary, frame);

  if (auto it = j.find("defaults"); it != j.end()) {
    const json& d = *it;
    if (!d.is_object()) parse_error("defaults must be an object");
    try {
      auto& df = sc.defaults;
      if (d.contains("order")) df.order = d.at("order").get<int>();
      if (d.contains("mode")) df.mode = d.at("mode").get<std::string>();
      if (d.contains("node_seconds")) df.node_seconds = d.at("node_seconds").get<std::vector<double>>();
      if (d.contains("node_orbits")) df.node_orbits = d.at("node_orbits").get<std::vector<double>>();
      if (d.contains("target_poc")) df.target_poc = d.at("target_poc").get<double>();
      if (d.contains("umax")) df.umax = d.at("umax").get<double>();
      if (d.contains("fixed_dir")) df.fixed_dir = d.at("fixed_dir").get<std::string>();
    } catch (const json::exception& ex) {
      parse_error(std::string("invalid defaults: ") + ex.what());
    }
  }
  return sc;
}

ScenarioFile read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void write_scenario(const std::string& path, const ScenarioFile& scenario) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kConfiguration, "cannot write '" + path + "'");
  out << scenario_to_json(scenario);
}

}  // namespace cam::cli
