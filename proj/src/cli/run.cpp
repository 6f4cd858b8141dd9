#include "cam/cli/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cam::cli {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfiguration, what); }

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::kParse, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

// Seconds per unit of bare lead time.
double lead_unit(const conj::ConjunctionEvent& e) {
  if (e.dynamics.earth()) return dyn::orbital_period(e.primary, e.dynamics.mu);
  return e.dynamics.char_time;
}

const char* mode_name(map::ControlMode m) { return m == map::ControlMode::kImpulsive ? "impulse" : "lowthrust"; }

const char* frame_name(map::ControlFrame f) {
  switch (f) {
    case map::ControlFrame::kRtn: return "RTN";
    case map::ControlFrame::kSynodic: return "SYNODIC";
    case map::ControlFrame::kInertial: return "INERTIAL";
  }
  return "RTN";
}

map::ControlMode mode_from_name(const std::string& s) {
  if (s == "impulse") return map::ControlMode::kImpulsive;
  if (s == "lowthrust") return map::ControlMode::kLowThrust;
  config_error("unknown mode '" + s + "' (impulse|lowthrust)");
}

map::ControlFrame frame_from_name(const std::string& s) {
  if (s == "RTN") return map::ControlFrame::kRtn;
  if (s == "SYNODIC") return map::ControlFrame::kSynodic;
  if (s == "INERTIAL") return map::ControlFrame::kInertial;
  throw Error(ErrorKind::kParse, "unknown control frame '" + s + "'");
}

void apply_dynamics_override(conj::ConjunctionEvent& e, const std::string& name) {
  if (name == "kepler" || name == "j2") {
    if (!e.dynamics.earth()) config_error("scenario is cislunar; --dyn " + name + " needs an Earth scenario");
    e.dynamics.kind = name == "kepler" ? dyn::ModelKind::kKepler : dyn::ModelKind::kJ2;
  } else if (name == "cr3bp") {
    if (e.dynamics.earth()) config_error("scenario is Earth-centred; --dyn cr3bp needs a synodic scenario");
  } else {
    config_error("unknown dynamics '" + name + "' (kepler|j2|cr3bp)");
  }
}

std::vector<std::string> default_nodes(const ScenarioFile& sc) {
  std::vector<std::string> out;
  const auto& d = sc.defaults;
  if (d.node_seconds) {
    for (double t : *d.node_seconds) {
      std::ostringstream s;
      s.precision(17);
      s << t << "s";
      out.push_back(s.str());
    }
  } else if (d.node_orbits) {
    if (!sc.event.dynamics.earth()) config_error("node_orbits applies to Earth scenarios only");
    for (double x : *d.node_orbits) {
      std::ostringstream s;
      s.precision(17);
      s << x;
      out.push_back(s.str());
    }
  } else {
    out.push_back(sc.event.dynamics.earth() ? "0.5" : "0.2");
  }
  return out;
}

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
json vec_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

json solution_json(const solve::ManeuverSolution& s) {
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back({{"time_s", n.time}, {"u", vec_json(n.u)}, {"saturated", n.saturated}});
  }
  json iters = json::array();
  for (std::size_t k = 0; k < s.per_order_iterations.size(); ++k) {
    iters.push_back({{"order", static_cast<int>(k) + 1}, {"iterations", s.per_order_iterations[k]}});
  }
  json vars = json::array();
  for (const auto& v : s.variables) vars.push_back({{"node", v.node}, {"component", v.component}});
  json j = {
      {"mode", mode_name(s.schedule.mode)},
      {"frame", frame_name(s.schedule.frame)},
      {"u_unit", s.schedule.mode == map::ControlMode::kImpulsive ? "m/s" : "m/s^2"},
      {"nodes", nodes},
      {"variables", vars},
      {"phi", s.phi},
      {"iterations", iters},
      {"rho", s.rho},
      {"ballistic_poc", s.ballistic_poc},
      {"predicted_poc", s.predicted_poc},
      {"residual", s.residual},
      {"constraint_residual", s.constraint_residual},
      {"gradient_norm", s.gradient_norm},
      {"dv_total_m_s", s.dv_total},
      {"wall_time_s", s.wall_time},
  };
  if (s.validated_poc) j["validated_poc"] = *s.validated_poc;
  return j;
}

json report_json(const check::ValidationReport& r) {
  json per_node = json::array();
  for (const auto& u : r.per_node_dv) per_node.push_back(vec_json(u));
  json j = {
      {"validated_poc", r.validated_poc},
      {"quadrature_poc", r.quadrature_poc},
      {"quadrature_agrees", r.quadrature_agrees},
      {"poc_log_error", r.poc_log_error},
      {"dv_total_m_s", r.dv_total},
      {"per_node_dv", per_node},
      {"bplane_before_km", vec_json(r.bplane_before)},
      {"bplane_after_km", vec_json(r.bplane_after)},
  };
  if (r.map_residual) j["map_residual"] = *r.map_residual;
  return j;
}

std::string number_text(double x) { return json(x).dump(); }

}  // namespace

std::vector<double> parse_node_times(const std::vector<std::string>& tokens, const conj::ConjunctionEvent& event) {
  std::vector<double> out;
  for (const std::string& raw : tokens) {
    for (const std::string& tok : split(raw, ',')) {
      if (tok.empty()) continue;
      if (tok.back() == 's') {
        out.push_back(parse_number(std::string_view(tok).substr(0, tok.size() - 1)));
        continue;
      }
      const auto parts = split(tok, ':');
      if (parts.size() == 1) {
        out.push_back(-parse_number(tok) * lead_unit(event));
      } else if (parts.size() == 3) {
        const double a = parse_number(parts[0]), b = parse_number(parts[1]), step = parse_number(parts[2]);
        if (!(step > 0.0)) config_error("range step must be positive in '" + tok + "'");
        const double n = std::floor((std::abs(b - a)) / step + 1e-9);
        if (n > 10000) config_error("range '" + tok + "' has too many points");
        const double dir = b >= a ? 1.0 : -1.0;
        for (int k = 0; k <= static_cast<int>(n); ++k) out.push_back(-(a + dir * k * step) * lead_unit(event));
      } else {
        throw Error(ErrorKind::kParse, "malformed node token '" + tok + "'");
      }
    }
  }
  return out;
}

Eigen::Vector3d parse_direction(const std::string& text, const dyn::DynamicsModel& model) {
  if (text == "R" || text == "T" || text == "N") {
    if (!model.earth()) config_error("R/T/N directions need an Earth model; give x,y,z");
    return text == "R" ? Eigen::Vector3d::UnitX() : text == "T" ? Eigen::Vector3d::UnitY() : Eigen::Vector3d::UnitZ();
  }
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw Error(ErrorKind::kParse, "direction must be R, T, N or x,y,z");
  const Eigen::Vector3d d(parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2]));
  if (!(d.norm() > 0.0)) config_error("direction must be nonzero");
  return d.normalized();
}

RunOutput run_scenario(const ScenarioFile& scenario, const RunConfig& config) {
  conj::ConjunctionEvent event = scenario.event;
  if (config.dynamics) apply_dynamics_override(event, *config.dynamics);
  conj::validate(event);

  const auto& d = scenario.defaults;
  solve::SolverConfig cfg;
  cfg.order = config.order.value_or(d.order.value_or(5));
  cfg.target_poc = config.target_poc.value_or(d.target_poc.value_or(1e-6));
  cfg.e_tol = config.e_tol;
  cfg.max_iterations = config.max_iterations;
  solve::validate(cfg);

  const map::ControlMode mode = mode_from_name(config.mode.value_or(d.mode.value_or("impulse")));
  const std::optional<double> umax = config.umax ? config.umax : d.umax;
  const std::optional<std::string> fixed = config.fixed_dir ? config.fixed_dir : d.fixed_dir;
  const std::vector<double> node_times =
      parse_node_times(config.nodes.empty() ? default_nodes(scenario) : config.nodes, event);
  const std::vector<double> grid = parse_node_times(config.filter_grid, event);

  map::ControlSchedule tmpl;
  tmpl.mode = mode;
  tmpl.frame = map::default_frame(event.dynamics);
  map::ControlNode proto;
  if (fixed) proto.fixed_direction = parse_direction(*fixed, event.dynamics);
  tmpl.nodes.push_back(proto);

  // Low-thrust ranking uses the grid spacing as the candidate arc.
  double arc = 0.0;
  if (mode == map::ControlMode::kLowThrust && !grid.empty()) {
    if (grid.size() < 2) config_error("low-thrust filtering needs at least two grid points");
    std::vector<double> g = grid;
    std::sort(g.begin(), g.end());
    arc = g[1] - g[0];
    if (!(arc > 0.0)) config_error("filter grid points must be distinct");
  }

  solve::ManeuverSolution sol;
  if (umax) {
    if (mode != map::ControlMode::kImpulsive) config_error("--umax sequencing supports impulse mode only");
    if (fixed) config_error("--umax cannot be combined with --fixed-dir");
    if (!(*umax > 0.0)) config_error("--umax must be positive");
    sol = solve::solve_thrust_limited(event, grid.empty() ? node_times : grid, *umax, cfg, tmpl);
  } else {
    std::vector<double> times = node_times;
    if (!grid.empty()) {
      const int keep = config.filter_keep.value_or(mode == map::ControlMode::kLowThrust ? 2 : 1);
      times.clear();
      for (const auto& n : solve::filter_nodes(event, grid, keep, tmpl, arc, cfg.propagation).nodes) {
        times.push_back(n.time);
      }
    } else if (config.filter_keep) {
      config_error("--filter-keep needs --filter-grid");
    }
    map::ControlSchedule s = tmpl;
    s.nodes.clear();
    for (double t : times) {
      map::ControlNode n = proto;
      n.time = t;
      s.nodes.push_back(n);
    }
    sol = fixed ? solve::solve_fixed_direction(event, s, cfg) : solve::solve_schedule(event, s, cfg);
  }

  RunOutput out;
  out.report = check::validate_solution(event, sol, cfg.target_poc, cfg.propagation);
  sol.validated_poc = out.report.validated_poc;
  out.solution = sol;

  json cfg_json = {
      {"order", cfg.order},
      {"mode", mode_name(mode)},
      {"target_poc", cfg.target_poc},
      {"e_tol", cfg.e_tol},
      {"max_iterations", cfg.max_iterations},
      {"dynamics", event.dynamics.kind == dyn::ModelKind::kKepler ? "kepler"
                   : event.dynamics.kind == dyn::ModelKind::kJ2   ? "j2"
                                                                   : "cr3bp"},
  };
  if (umax) cfg_json["umax"] = *umax;
  if (fixed) cfg_json["fixed_dir"] = *fixed;
  json result = {
      {"schema_version", kSchemaVersion},
      {"status", "ok"},
      {"scenario", scenario.name},
      {"config", cfg_json},
      {"solution", solution_json(sol)},
      {"validation", report_json(out.report)},
  };
  out.result_json = result.dump(2) + "\n";

  if (!config.csv_path.empty()) {
    out.csv = "xi_km,zeta_km,label\n";
    out.csv += number_text(out.report.bplane_before.x()) + "," + number_text(out.report.bplane_before.y()) +
               ",ballistic\n";
    out.csv += number_text(out.report.bplane_after.x()) + "," + number_text(out.report.bplane_after.y()) +
               ",maneuvered\n";
  }
  if (!config.out_path.empty()) write_file_atomic(config.out_path, out.result_json);
  if (!config.csv_path.empty()) write_file_atomic(config.csv_path, out.csv);
  return out;
}

check::ValidationReport revalidate_result(const ScenarioFile& scenario, const std::string& result_json) {
  json j;
  try {
    j = json::parse(result_json);
    const json& s = j.at("solution");
    map::ControlSchedule sched;
    sched.mode = mode_from_name(s.at("mode").get<std::string>());
    sched.frame = frame_from_name(s.at("frame").get<std::string>());
    std::vector<Eigen::Vector3d> u;
    for (const auto& n : s.at("nodes")) {
      map::ControlNode node;
      node.time = n.at("time_s").get<double>();
      sched.nodes.push_back(node);
      const auto v = n.at("u").get<std::vector<double>>();
      if (v.size() != 3) throw Error(ErrorKind::kParse, "node control must have 3 components");
      u.emplace_back(v[0], v[1], v[2]);
    }
    conj::ConjunctionEvent event = scenario.event;
    apply_dynamics_override(event, j.at("config").at("dynamics").get<std::string>());
    return check::validate_solution(event, sched, u, j.at("config").at("target_poc").get<double>());
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::kParse, std::string("malformed result: ") + ex.what());
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return 2;
    case ErrorKind::kNonConvergence:
    case ErrorKind::kDegenerateGradient:
    case ErrorKind::kNumeric: return 4;
    case ErrorKind::kInfeasible: return 5;
    default: return 3;
  }
}

std::string error_json(ErrorKind kind, const std::string& message, const std::string& scenario) {
  json j = {
      {"status", "error"},
      {"class", to_string(kind)},
      {"exit_code", exit_code(kind)},
      {"message", message},
  };
  if (!scenario.empty()) j["scenario"] = scenario;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) config_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) config_error("cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) config_error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

}  // namespace cam::cli
