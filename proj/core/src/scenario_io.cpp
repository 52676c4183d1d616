#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>

#include "epicascade/error.hpp"
#include "epicascade/scenario.hpp"

namespace epicascade {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw Error(errc::io_error, "failed writing '" + path.string() + "'");
}

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(errc::parse_error, origin + " line " + std::to_string(line_of_offset(text, e.byte)) +
                                       ": " + e.what());
  }
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw Error(errc::parse_error, section + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw Error(errc::parse_error, section + ": unknown field '" + item.key() + "'");
    }
  }
}

const json& member(const json& obj, const char* key, const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(errc::parse_error, section + ": missing field '" + key + "'");
  }
  return *it;
}

double as_number(const json& value, const std::string& where) {
  if (!value.is_number()) throw Error(errc::parse_error, where + " must be a number");
  return value.get<double>();
}

std::int64_t as_integer(const json& value, const std::string& where) {
  if (!value.is_number_integer()) throw Error(errc::parse_error, where + " must be an integer");
  return value.get<std::int64_t>();
}

bool as_bool(const json& value, const std::string& where) {
  if (!value.is_boolean()) throw Error(errc::parse_error, where + " must be a boolean");
  return value.get<bool>();
}

std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw Error(errc::parse_error, where + " must be a string");
  return value.get<std::string>();
}

json scenario_to_json(const Scenario& s) {
  json root;

  json agents = json::array();
  for (const Agent& a : s.agents) {
    json groups = json::array();
    for (const auto& g : a.groups) groups.push_back(g);
    agents.push_back({{"id", a.id},
                      {"groups", std::move(groups)},
                      {"reliability", a.reliability},
                      {"rho0", a.rho0},
                      {"responsiveness", a.responsiveness},
                      {"is_seed", a.is_seed}});
  }
  root["agents"] = std::move(agents);

  json graph;
  if (s.graph.edge_list) {
    json edges = json::array();
    for (const auto& [a, b] : *s.graph.edge_list) edges.push_back(json::array({a, b}));
    graph["edges"] = std::move(edges);
  }
  if (s.graph.generator) {
    const auto& gen = *s.graph.generator;
    graph["generator"] = {
        {"n", gen.n}, {"p", gen.p}, {"seed", gen.seed}, {"max_attempts", gen.max_attempts}};
  }
  root["graph"] = std::move(graph);

  json overrides = json::array();
  for (const auto& o : s.overrides) {
    overrides.push_back({{"speaker", o.speaker}, {"hearer", o.hearer}, {"value", o.value}});
  }
  root["credibility"] = {{"mode", s.credibility_mode == EtaMode::excess ? "excess" : "deficit"},
                         {"overrides", std::move(overrides)}};

  root["policy"] = {{"omega_rho_bar", s.policy.omega_rho_bar},
                    {"omega_u", s.policy.omega_u},
                    {"horizon", s.policy.horizon},
                    {"t_max", s.policy.t_max},
                    {"recompute_targets", s.policy.recompute_targets}};

  root["run"] = {{"mode", s.mode == RunMode::open_loop ? "open_loop" : "closed_loop"},
                 {"label", s.label},
                 {"rng_seed", s.rng_seed}};
  return root;
}

Scenario scenario_from_json(const json& root) {
  check_keys(root, "scenario", {"agents", "graph", "credibility", "policy", "run"});
  Scenario s;

  const json& agents = member(root, "agents", "scenario");
  if (!agents.is_array()) throw Error(errc::parse_error, "agents must be an array");
  AgentId index = 0;
  for (const json& entry : agents) {
    const std::string where = "agents[" + std::to_string(index) + "]";
    check_keys(entry, where, {"id", "groups", "reliability", "rho0", "responsiveness", "is_seed"});
    Agent a;
    a.id = static_cast<AgentId>(as_integer(member(entry, "id", where), where + ".id"));
    const json& groups = member(entry, "groups", where);
    if (!groups.is_array()) throw Error(errc::parse_error, where + ".groups must be an array");
    for (const json& g : groups) a.groups.insert(as_string(g, where + ".groups entry"));
    a.reliability = as_number(member(entry, "reliability", where), where + ".reliability");
    a.rho0 = as_number(member(entry, "rho0", where), where + ".rho0");
    a.responsiveness = as_number(member(entry, "responsiveness", where), where + ".responsiveness");
    a.is_seed = as_bool(member(entry, "is_seed", where), where + ".is_seed");
    s.agents.push_back(std::move(a));
    ++index;
  }

  const json& graph = member(root, "graph", "scenario");
  check_keys(graph, "graph", {"edges", "generator"});
  if (graph.contains("edges")) {
    const json& edges = graph["edges"];
    if (!edges.is_array()) throw Error(errc::parse_error, "graph.edges must be an array");
    std::vector<Edge> list;
    for (const json& e : edges) {
      if (!e.is_array() || e.size() != 2) {
        throw Error(errc::parse_error, "graph.edges entries must be [a, b] pairs");
      }
      list.emplace_back(static_cast<AgentId>(as_integer(e[0], "edge endpoint")),
                        static_cast<AgentId>(as_integer(e[1], "edge endpoint")));
    }
    s.graph.edge_list = std::move(list);
  }
  if (graph.contains("generator")) {
    const json& gen = graph["generator"];
    check_keys(gen, "graph.generator", {"n", "p", "seed", "max_attempts"});
    GraphSpec::Generator g;
    g.n = static_cast<AgentId>(as_integer(member(gen, "n", "graph.generator"), "generator.n"));
    g.p = as_number(member(gen, "p", "graph.generator"), "generator.p");
    g.seed = member(gen, "seed", "graph.generator").get<std::uint64_t>();
    if (gen.contains("max_attempts")) {
      g.max_attempts = static_cast<int>(as_integer(gen["max_attempts"], "generator.max_attempts"));
    }
    s.graph.generator = g;
  }

  if (root.contains("credibility")) {
    const json& cred = root["credibility"];
    check_keys(cred, "credibility", {"mode", "overrides"});
    if (cred.contains("mode")) {
      const std::string mode = as_string(cred["mode"], "credibility.mode");
      if (mode == "excess") {
        s.credibility_mode = EtaMode::excess;
      } else if (mode == "deficit") {
        s.credibility_mode = EtaMode::deficit;
      } else {
        throw Error(errc::parse_error, "credibility.mode must be 'excess' or 'deficit'");
      }
    }
    if (cred.contains("overrides")) {
      const json& overrides = cred["overrides"];
      if (!overrides.is_array()) {
        throw Error(errc::parse_error, "credibility.overrides must be an array");
      }
      for (const json& o : overrides) {
        check_keys(o, "credibility.overrides entry", {"speaker", "hearer", "value"});
        CredibilityOverride ov;
        ov.speaker = static_cast<AgentId>(as_integer(member(o, "speaker", "override"), "speaker"));
        ov.hearer = static_cast<AgentId>(as_integer(member(o, "hearer", "override"), "hearer"));
        ov.value = as_number(member(o, "value", "override"), "override.value");
        s.overrides.push_back(ov);
      }
    }
  }

  if (root.contains("policy")) {
    const json& policy = root["policy"];
    check_keys(policy, "policy",
               {"omega_rho_bar", "omega_u", "horizon", "t_max", "recompute_targets"});
    if (policy.contains("omega_rho_bar")) {
      s.policy.omega_rho_bar = as_number(policy["omega_rho_bar"], "policy.omega_rho_bar");
    }
    if (policy.contains("omega_u")) {
      s.policy.omega_u = as_number(policy["omega_u"], "policy.omega_u");
    }
    if (policy.contains("horizon")) {
      s.policy.horizon = static_cast<int>(as_integer(policy["horizon"], "policy.horizon"));
    }
    if (policy.contains("t_max")) {
      s.policy.t_max = static_cast<int>(as_integer(policy["t_max"], "policy.t_max"));
    }
    if (policy.contains("recompute_targets")) {
      s.policy.recompute_targets = as_bool(policy["recompute_targets"], "policy.recompute_targets");
    }
  }

  const json& run = member(root, "run", "scenario");
  check_keys(run, "run", {"mode", "label", "rng_seed"});
  const std::string mode = as_string(member(run, "mode", "run"), "run.mode");
  if (mode == "open_loop") {
    s.mode = RunMode::open_loop;
  } else if (mode == "closed_loop") {
    s.mode = RunMode::closed_loop;
  } else {
    throw Error(errc::parse_error, "run.mode must be 'open_loop' or 'closed_loop'");
  }
  if (run.contains("label")) s.label = as_string(run["label"], "run.label");
  if (run.contains("rng_seed")) s.rng_seed = run["rng_seed"].get<std::uint64_t>();

  return s;
}

/// 17 significant digits: enough for bit-exact double round trips.
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
}

json switching_sets_json(const std::vector<std::vector<AgentId>>& sets) {
  json out = json::array();
  for (const auto& set : sets) {
    json one = json::array();
    for (AgentId x : set) one.push_back(x);
    out.push_back(std::move(one));
  }
  return out;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(errc::parse_error, "scenario file '" + path.string() + "' does not exist");
  }
  const std::string text = read_file(path);
  Scenario s = scenario_from_json(parse_json(text, path.string()));
  validate_scenario(s);
  return s;
}

std::string scenario_to_string(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_file(path, scenario_to_string(scenario));
}

std::vector<AgentRecord> load_agent_records(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(errc::parse_error, "agent file '" + path.string() + "' does not exist");
  }
  const json root = parse_json(read_file(path), path.string());
  check_keys(root, "agent file", {"respondents"});
  const json& rows = member(root, "respondents", "agent file");
  if (!rows.is_array()) throw Error(errc::parse_error, "respondents must be an array");

  std::vector<AgentRecord> records;
  int row = 0;
  for (const json& entry : rows) {
    const std::string where = "respondents[" + std::to_string(row) + "]";
    try {
      check_keys(entry, where, {"education", "groups", "owns_ev", "resistivity"});
      AgentRecord rec;
      rec.education = as_string(member(entry, "education", where), where + ".education");
      if (rec.education != "low" && rec.education != "medium" && rec.education != "high") {
        throw Error(errc::bad_record, "education must be low, medium, or high");
      }
      const json& groups = member(entry, "groups", where);
      if (!groups.is_array()) throw Error(errc::parse_error, where + ".groups must be an array");
      for (const json& g : groups) rec.groups.insert(as_string(g, where + ".groups entry"));
      rec.owns_ev = as_bool(member(entry, "owns_ev", where), where + ".owns_ev");
      rec.resistivity = as_number(member(entry, "resistivity", where), where + ".resistivity");
      if (!(rec.resistivity >= 0.0 && rec.resistivity <= 1.0)) {
        throw Error(errc::bad_record, "resistivity outside [0, 1]");
      }
      records.push_back(std::move(rec));
    } catch (const Error& e) {
      throw Error(errc::bad_record, "row " + std::to_string(row) + ": " + e.what());
    }
    ++row;
  }
  return records;
}

void write_agent_records(const std::vector<AgentRecord>& records,
                         const std::filesystem::path& path) {
  json rows = json::array();
  for (const AgentRecord& rec : records) {
    json groups = json::array();
    for (const auto& g : rec.groups) groups.push_back(g);
    rows.push_back({{"education", rec.education},
                    {"groups", std::move(groups)},
                    {"owns_ev", rec.owns_ev},
                    {"resistivity", rec.resistivity}});
  }
  write_file(path, json{{"respondents", std::move(rows)}}.dump(2) + "\n");
}

std::vector<std::filesystem::path> export_results(const Trajectory& traj,
                                                  const std::filesystem::path& out_dir,
                                                  ExportFormats formats) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;

  if (formats.csv) {
    const auto path = out_dir / "trajectory.csv";
    std::string csv = "t,agent,adopted,ratio\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const CascadeState& state = traj.states[k];
      for (AgentId x = 0; x < state.agent_count(); ++x) {
        csv += std::to_string(state.t) + ',' + std::to_string(x) + ',' +
               (state.adopted[static_cast<std::size_t>(x)] ? '1' : '0') + ',' +
               fmt17(traj.ratios[k][static_cast<std::size_t>(x)]) + '\n';
      }
    }
    write_file(path, csv);
    written.push_back(path);
  }

  if (formats.json) {
    const auto path = out_dir / "summary.json";
    json summary;
    json adopters = json::array();
    for (AgentId x : traj.final_adopters) adopters.push_back(x);
    summary["s_star_star"] = std::move(adopters);
    summary["t_fixed"] = traj.t_fixed;
    summary["switching_sets"] = switching_sets_json(traj.switching_sets);
    write_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> export_results(const ControlledTrajectory& traj,
                                                  const Metrics& metrics,
                                                  const std::filesystem::path& out_dir,
                                                  ExportFormats formats) {
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> written;
  const AgentId n =
      traj.states.empty() ? 0 : static_cast<AgentId>(traj.states.front().adopted.size());

  if (formats.csv) {
    const auto path = out_dir / "trajectory.csv";
    std::string csv = "t,agent,adopted,rho_u,u,kappa,target\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const ControlledState& state = traj.states[k];
      const bool applied = k < traj.inputs.size();
      for (AgentId x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(x);
        csv += std::to_string(state.t) + ',' + std::to_string(x) + ',' +
               (state.adopted[i] ? '1' : '0') + ',' + fmt17(state.rho_u[i]) + ',' +
               fmt17(applied ? traj.inputs[k][i] : 0.0) + ',' +
               fmt17(applied ? traj.gains[k][i] : 0.0) + ',' + fmt17(traj.targets[i]) + '\n';
      }
    }
    write_file(path, csv);
    written.push_back(path);

    // Plot tables cover non-seeds only; seeds neither receive inputs nor
    // carry targets.
    const auto& seeded = traj.states.front().adopted;

    const auto inputs_path = out_dir / "fig_inputs_t0.csv";
    std::string inputs_csv = "agent,one_minus_target,u\n";
    if (!traj.inputs.empty()) {
      for (AgentId x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(x);
        if (seeded[i]) continue;
        inputs_csv += std::to_string(x) + ',' + fmt17(1.0 - traj.targets[i]) + ',' +
                      fmt17(traj.inputs.front()[i]) + '\n';
      }
    }
    write_file(inputs_path, inputs_csv);
    written.push_back(inputs_path);

    const auto thresholds_path = out_dir / "fig_thresholds_t1.csv";
    std::string thresholds_csv = "agent,target,rho_u\n";
    if (traj.states.size() > 1) {
      for (AgentId x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(x);
        if (seeded[i]) continue;
        thresholds_csv += std::to_string(x) + ',' + fmt17(traj.targets[i]) + ',' +
                          fmt17(traj.states[1].rho_u[i]) + '\n';
      }
    }
    write_file(thresholds_path, thresholds_csv);
    written.push_back(thresholds_path);

    const auto weight_path = out_dir / "fig_inputs_vs_weight.csv";
    std::string weight_csv = "agent,weight,u\n";
    if (!traj.inputs.empty()) {
      for (AgentId x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(x);
        if (seeded[i]) continue;
        const double weight = traj.states.front().rho_u[i] * (1.0 - traj.targets[i]);
        weight_csv +=
            std::to_string(x) + ',' + fmt17(weight) + ',' + fmt17(traj.inputs.front()[i]) + '\n';
      }
    }
    write_file(weight_path, weight_csv);
    written.push_back(weight_path);
  }

  if (formats.json) {
    const auto path = out_dir / "metrics.json";
    json doc;
    doc["C"] = metrics.total_cost;
    doc["C_bar"] = metrics.avg_cost;
    doc["t_star_star"] = metrics.t_full ? json(*metrics.t_full) : json(nullptr);
    doc["scenario_label"] = metrics.label;
    doc["rng_seed"] = metrics.rng_seed;
    write_file(path, doc.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace epicascade
