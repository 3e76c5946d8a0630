#include "remest/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace remest::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!keys.contains(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

double get_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

Rows get_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array of rows");
  Rows rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) throw ConfigError(where + ": each row must be a non-empty array");
    std::vector<double> vals;
    for (const auto& v : row) vals.push_back(get_real(v, where));
    if (!rows.empty() && vals.size() != rows.front().size()) throw ConfigError(where + ": ragged matrix");
    rows.push_back(std::move(vals));
  }
  return rows;
}

Mat to_mat(const Rows& rows, const char* name) {
  if (rows.empty() || rows.front().empty()) throw ConfigError(std::string("system.") + name + ": empty matrix");
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) throw ConfigError(std::string("system.") + name + ": ragged matrix");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  try {
    return Mat(rows.size(), rows.front().size(), std::move(flat));
  } catch (const Error& e) {
    throw ConfigError(std::string("system.") + name + ": " + e.what());
  }
}

}  // namespace

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(outputs.formats.begin(), outputs.formats.end(), format) != outputs.formats.end();
}

LtiSystem ExperimentConfig::build_system() const {
  try {
    return LtiSystem(to_mat(system.a, "A"), to_mat(system.c, "C"), to_mat(system.q, "Q"), to_mat(system.r, "R"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

HarqModel ExperimentConfig::build_channel() const {
  try {
    if (channel.g_table) return HarqModel::tabulated(*channel.g_table);
    return HarqModel::geometric(channel.lambda, channel.h, mdp.q_max);
  } catch (const Error& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
}

SimConfig ExperimentConfig::build_sim_config() const {
  SimConfig sc;
  sc.horizon = sim.K;
  sc.runs = sim.runs;
  sc.seed = sim.seed;
  sc.mode = sim.mode;
  return sc;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  reject_unknown(root, "config", {"system", "channel", "mdp", "sim", "outputs"});

  if (root.contains("system")) {
    const json& s = root["system"];
    reject_unknown(s, "system", {"A", "C", "Q", "R"});
    if (s.contains("A")) cfg.system.a = get_matrix(s["A"], "system.A");
    if (s.contains("C")) cfg.system.c = get_matrix(s["C"], "system.C");
    if (s.contains("Q")) cfg.system.q = get_matrix(s["Q"], "system.Q");
    if (s.contains("R")) cfg.system.r = get_matrix(s["R"], "system.R");
  }
  if (root.contains("channel")) {
    const json& c = root["channel"];
    reject_unknown(c, "channel", {"lambda", "h", "g_table"});
    if (c.contains("lambda")) cfg.channel.lambda = get_real(c["lambda"], "channel.lambda");
    if (c.contains("h")) cfg.channel.h = get_real(c["h"], "channel.h");
    if (c.contains("g_table") && !c["g_table"].is_null()) {
      if (!c["g_table"].is_array()) throw ConfigError("channel.g_table: expected an array");
      std::vector<double> g;
      for (const auto& v : c["g_table"]) g.push_back(get_real(v, "channel.g_table"));
      cfg.channel.g_table = std::move(g);
    }
  }
  if (root.contains("mdp")) {
    const json& m = root["mdp"];
    reject_unknown(m, "mdp", {"q_max", "tol", "max_iter"});
    if (m.contains("q_max")) cfg.mdp.q_max = get_unsigned(m["q_max"], "mdp.q_max");
    if (m.contains("tol")) cfg.mdp.tol = get_real(m["tol"], "mdp.tol");
    if (m.contains("max_iter")) cfg.mdp.max_iter = static_cast<long>(get_unsigned(m["max_iter"], "mdp.max_iter"));
  }
  if (root.contains("sim")) {
    const json& s = root["sim"];
    reject_unknown(s, "sim", {"K", "runs", "seed", "mode"});
    if (s.contains("K")) cfg.sim.K = get_unsigned(s["K"], "sim.K");
    if (s.contains("runs")) cfg.sim.runs = get_unsigned(s["runs"], "sim.runs");
    if (s.contains("seed")) cfg.sim.seed = get_unsigned(s["seed"], "sim.seed");
    if (s.contains("mode")) {
      if (!s["mode"].is_string()) throw ConfigError("sim.mode: expected a string");
      try {
        cfg.sim.mode = parse_sim_mode(s["mode"].get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(std::string("sim.mode: ") + e.what());
      }
    }
  }
  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    reject_unknown(o, "outputs", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) throw ConfigError("outputs.directory: expected a string");
      cfg.outputs.directory = o["directory"].get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) throw ConfigError("outputs.formats: expected an array");
      cfg.outputs.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json")) throw ConfigError("outputs.formats: entries must be csv or json");
        cfg.outputs.formats.push_back(f.get<std::string>());
      }
    }
  }

  if (cfg.mdp.q_max < 1) throw ConfigError("mdp.q_max must be at least 1");
  if (!(cfg.mdp.tol > 0.0)) throw ConfigError("mdp.tol must be positive");
  if (cfg.mdp.max_iter < 1) throw ConfigError("mdp.max_iter must be positive");
  if (cfg.sim.K < 1) throw ConfigError("sim.K must be at least 1");
  if (cfg.sim.runs < 1) throw ConfigError("sim.runs must be at least 1");
  // Re-validate the model invariants now so a bad file fails at load time.
  cfg.build_system();
  cfg.build_channel();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json root;
  root["system"] = {{"A", cfg.system.a}, {"C", cfg.system.c}, {"Q", cfg.system.q}, {"R", cfg.system.r}};
  root["channel"] = {{"lambda", cfg.channel.lambda}, {"h", cfg.channel.h}};
  if (cfg.channel.g_table) root["channel"]["g_table"] = *cfg.channel.g_table;
  root["mdp"] = {{"q_max", cfg.mdp.q_max}, {"tol", cfg.mdp.tol}, {"max_iter", cfg.mdp.max_iter}};
  root["sim"] = {{"K", cfg.sim.K}, {"runs", cfg.sim.runs}, {"seed", cfg.sim.seed},
                 {"mode", std::string(to_string(cfg.sim.mode))}};
  root["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", cfg.outputs.formats}};
  return root.dump(2);
}

}  // namespace remest::cli
