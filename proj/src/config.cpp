#include "srfb/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace srfb {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

void require_key(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " is missing required key '" + key + "'");
}

double number(const json& obj, const std::string& key, const std::string& where) {
  require_key(obj, key, where);
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
  return d;
}

double positive(const json& obj, const std::string& key, const std::string& where) {
  const double d = number(obj, key, where);
  if (!(d > 0.0)) throw ConfigError(where + "." + key + " must be positive");
  return d;
}

double nonnegative(const json& obj, const std::string& key, const std::string& where) {
  const double d = number(obj, key, where);
  if (!(d >= 0.0)) throw ConfigError(where + "." + key + " must be >= 0");
  return d;
}

long long integer(const json& obj, const std::string& key, const std::string& where) {
  require_key(obj, key, where);
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<long long>();
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  require_key(obj, key, where);
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> vector_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      throw ConfigError(where + " must contain finite numbers only");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

json matrix_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nonempty array of rows");
  std::size_t cols = 0;
  for (const auto& row : v) {
    const auto r = vector_of(row, where + " row");
    if (cols == 0) cols = r.size();
    if (r.size() != cols) throw ConfigError(where + " rows have different lengths");
  }
  return v;
}

// Replaces `<name>_csv` by the matrix it points to, stored under `<name>`.
void inline_matrix(json& obj, const std::string& name, const std::filesystem::path& base,
                   const std::string& where, bool as_vector) {
  const std::string csv_key = name + "_csv";
  const bool inline_form = obj.contains(name);
  const bool csv_form = obj.contains(csv_key);
  if (inline_form == csv_form) {
    throw ConfigError(where + " needs exactly one of '" + name + "' or '" + csv_key + "'");
  }
  if (csv_form) {
    std::filesystem::path file = text(obj, csv_key, where);
    if (file.is_relative()) file = base / file;
    json m = read_csv_matrix(file);
    obj.erase(csv_key);
    if (as_vector) {
      json flat = json::array();
      for (const auto& row : m) {
        for (const auto& e : row) flat.push_back(e);
      }
      if (m.size() > 1 && m.front().size() > 1) {
        throw ConfigError(where + "." + csv_key + " must hold a single row or column");
      }
      obj[name] = flat;
    } else {
      obj[name] = m;
    }
  }
  if (as_vector) {
    vector_of(obj.at(name), where + "." + name);
  } else {
    matrix_of(obj.at(name), where + "." + name);
  }
}

json normalize_resolvent(const json& node, long long dim) {
  const std::string where = "problem.resolvent";
  json r = node;
  const std::string kind = text(r, "kind", where);
  if (kind == "zero" || kind == "simplex") {
    check_keys(r, {"kind"}, where);
  } else if (kind == "scaled_identity") {
    check_keys(r, {"kind", "nu"}, where);
    nonnegative(r, "nu", where);
  } else if (kind == "l1" || kind == "squared_l2") {
    check_keys(r, {"kind", "weight"}, where);
    positive(r, "weight", where);
  } else if (kind == "box") {
    check_keys(r, {"kind", "lower", "upper"}, where);
    require_key(r, "lower", where);
    require_key(r, "upper", where);
    const auto lo = vector_of(r["lower"], where + ".lower");
    const auto hi = vector_of(r["upper"], where + ".upper");
    if (static_cast<long long>(lo.size()) != dim || static_cast<long long>(hi.size()) != dim) {
      throw ConfigError(where + " bounds must have length problem.dim");
    }
  } else if (kind == "ball") {
    check_keys(r, {"kind", "center", "radius"}, where);
    nonnegative(r, "radius", where);
    if (!r.contains("center")) r["center"] = std::vector<double>(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<long long>(vector_of(r["center"], where + ".center").size()) != dim) {
      throw ConfigError(where + ".center must have length problem.dim");
    }
  } else {
    throw ConfigError("unknown resolvent kind '" + kind + "'");
  }
  return r;
}

json normalize_map(const json& node, long long dim, const std::filesystem::path& base,
                   const std::string& where) {
  json m = node;
  const std::string kind = text(m, "kind", where);
  if (kind == "zero" || kind == "identity") {
    check_keys(m, {"kind"}, where);
  } else if (kind == "affine") {
    check_keys(m, {"kind", "skew", "skew_csv", "psd", "psd_csv", "shift"}, where);
    for (const char* part : {"skew", "psd"}) {
      if (m.contains(part) || m.contains(std::string(part) + "_csv")) {
        inline_matrix(m, part, base, where, false);
        if (static_cast<long long>(m[part].size()) != dim || static_cast<long long>(m[part][0].size()) != dim) {
          throw ConfigError(where + "." + part + " must be dim x dim");
        }
      }
    }
    if (m.contains("shift") &&
        static_cast<long long>(vector_of(m["shift"], where + ".shift").size()) != dim) {
      throw ConfigError(where + ".shift must have length problem.dim");
    }
  } else if (kind == "finite_sum") {
    check_keys(m, {"kind", "components"}, where);
    require_key(m, "components", where);
    if (!m["components"].is_array() || m["components"].empty()) {
      throw ConfigError(where + ".components must be a nonempty array");
    }
    json comps = json::array();
    for (const auto& c : m["components"]) {
      json n = normalize_map(c, dim, base, where + ".components[]");
      if (n.at("kind") == "finite_sum") throw ConfigError("finite_sum components cannot nest");
      comps.push_back(n);
    }
    m["components"] = comps;
  } else {
    throw ConfigError("unknown map kind '" + kind + "' in " + where);
  }
  return m;
}

json normalize_problem(const json& node, const std::filesystem::path& base) {
  const std::string where = "problem";
  json p = node;
  const std::string kind = text(p, "kind", where);
  if (kind == "affine") {
    if (p.contains("skew") || p.contains("skew_csv")) {
      check_keys(p, {"kind", "nu", "skew", "skew_csv", "shift"}, where);
      nonnegative(p, "nu", where);
      inline_matrix(p, "skew", base, where, false);
      require_key(p, "shift", where);
      const auto shift = vector_of(p["shift"], where + ".shift");
      if (p["skew"].size() != shift.size() || p["skew"][0].size() != shift.size()) {
        throw ConfigError("problem.skew must be square with the length of problem.shift");
      }
    } else {
      check_keys(p, {"kind", "dim", "nu", "skew_scale", "seed"}, where);
      if (integer(p, "dim", where) < 1) throw ConfigError("problem.dim must be >= 1");
      nonnegative(p, "nu", where);
      if (!p.contains("skew_scale")) p["skew_scale"] = 1.0;
      nonnegative(p, "skew_scale", where);
      if (!p.contains("seed")) p["seed"] = 0;
      if (integer(p, "seed", where) < 0) throw ConfigError("problem.seed must be >= 0");
    }
  } else if (kind == "inclusion") {
    check_keys(p, {"kind", "dim", "resolvent", "map", "known_zero"}, where);
    const long long dim = integer(p, "dim", where);
    if (dim < 1) throw ConfigError("problem.dim must be >= 1");
    require_key(p, "resolvent", where);
    require_key(p, "map", where);
    p["resolvent"] = normalize_resolvent(p["resolvent"], dim);
    p["map"] = normalize_map(p["map"], dim, base, "problem.map");
    if (p.contains("known_zero") &&
        static_cast<long long>(vector_of(p["known_zero"], "problem.known_zero").size()) != dim) {
      throw ConfigError("problem.known_zero must have length problem.dim");
    }
  } else if (kind == "lasso") {
    check_keys(p, {"kind", "design", "design_csv", "targets", "targets_csv", "lambda"}, where);
    inline_matrix(p, "design", base, where, false);
    inline_matrix(p, "targets", base, where, true);
    positive(p, "lambda", where);
    if (p["design"].size() != p["targets"].size()) {
      throw ConfigError("problem.targets must have one entry per design row");
    }
  } else if (kind == "matrix_game" || kind == "smoothed_saddle") {
    if (kind == "matrix_game") {
      check_keys(p, {"kind", "payoff", "payoff_csv"}, where);
    } else {
      check_keys(p, {"kind", "payoff", "payoff_csv", "beta"}, where);
      positive(p, "beta", where);
    }
    inline_matrix(p, "payoff", base, where, false);
  } else {
    throw ConfigError("unknown problem kind '" + kind +
                      "' (expected affine, inclusion, lasso, matrix_game or smoothed_saddle)");
  }
  return p;
}

json normalize_schedule(const json& node) {
  const std::string where = "schedule";
  json s = node;
  const std::string kind = text(s, "kind", where);
  if (kind == "constant") {
    check_keys(s, {"kind", "gamma", "fraction_of_bound"}, where);
    if (s.contains("gamma") == s.contains("fraction_of_bound")) {
      throw ConfigError("schedule kind constant needs exactly one of 'gamma' or 'fraction_of_bound'");
    }
    positive(s, s.contains("gamma") ? "gamma" : "fraction_of_bound", where);
  } else if (kind == "band") {
    check_keys(s, {"kind", "c", "gamma"}, where);
    const double c = positive(s, "c", where);
    if (c > 1.0) throw ConfigError("schedule.c must lie in (0, 1]");
    positive(s, "gamma", where);
  } else if (kind == "strongly_monotone") {
    check_keys(s, {"kind", "nu"}, where);
    positive(s, "nu", where);
  } else if (kind == "power") {
    check_keys(s, {"kind", "gamma0", "p"}, where);
    positive(s, "gamma0", where);
    nonnegative(s, "p", where);
  } else {
    throw ConfigError("unknown schedule kind '" + kind +
                      "' (expected constant, band, strongly_monotone or power)");
  }
  return s;
}

json normalize_oracle(const json& node) {
  const std::string where = "oracle";
  json o = node;
  const std::string kind = text(o, "kind", where);
  if (kind == "exact") {
    check_keys(o, {"kind"}, where);
  } else if (kind == "gaussian") {
    check_keys(o, {"kind", "variance"}, where);
    require_key(o, "variance", where);
    json& v = o["variance"];
    const std::string vk = text(v, "kind", "oracle.variance");
    if (vk == "zero") {
      check_keys(v, {"kind"}, "oracle.variance");
    } else if (vk == "constant") {
      check_keys(v, {"kind", "c"}, "oracle.variance");
      nonnegative(v, "c", "oracle.variance");
    } else if (vk == "power") {
      check_keys(v, {"kind", "c", "p"}, "oracle.variance");
      nonnegative(v, "c", "oracle.variance");
      nonnegative(v, "p", "oracle.variance");
    } else {
      throw ConfigError("unknown variance kind '" + vk + "' (expected zero, constant or power)");
    }
  } else if (kind == "minibatch") {
    check_keys(o, {"kind", "batch"}, where);
    if (!o.contains("batch")) o["batch"] = 1;
    if (integer(o, "batch", where) < 1) throw ConfigError("oracle.batch must be >= 1");
  } else {
    throw ConfigError("unknown oracle kind '" + kind + "' (expected exact, gaussian or minibatch)");
  }
  return o;
}

bool has_components(const json& problem) {
  const std::string kind = problem.at("kind");
  return kind == "lasso" || (kind == "inclusion" && problem.at("map").at("kind") == "finite_sum");
}

bool oracle_is_exact(const json& oracle) {
  const std::string kind = oracle.at("kind");
  if (kind == "exact") return true;
  if (kind == "gaussian") {
    const json& v = oracle.at("variance");
    return v.at("kind") == "zero" || v.value("c", 1.0) == 0.0;
  }
  return false;
}

std::optional<std::vector<double>> optional_vector(const json& doc, const std::string& key) {
  if (!doc.contains(key)) return std::nullopt;
  return vector_of(doc.at(key), key);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool ExperimentConfig::is_saddle() const {
  const std::string kind = problem.at("kind");
  return kind == "matrix_game" || kind == "smoothed_saddle";
}

std::vector<std::vector<double>> read_csv_matrix(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open CSV file " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string t = trim(cell);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != t.size() || !std::isfinite(v)) {
        throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": bad number '" + t + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(file.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("CSV file " + file.string() + " is empty");
  return rows;
}

ExperimentConfig parse_config(const std::string& text_in, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc,
             {"problem", "solver", "schedule", "oracle", "seeds", "budget", "record_every",
              "stop_tolerance", "output_dir", "x0", "x_prev", "v0", "v_prev", "fit_window",
              "record_wall_time"},
             "config");
  require_key(doc, "problem", "config");
  require_key(doc, "solver", "config");
  require_key(doc, "budget", "config");

  ExperimentConfig cfg;
  cfg.problem = normalize_problem(doc["problem"], base_dir);
  try {
    cfg.solver = solver_kind_from_string(text(doc, "solver", "config"));
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  cfg.schedule = normalize_schedule(
      doc.value("schedule", json{{"kind", "constant"}, {"fraction_of_bound", 0.9}}));
  cfg.oracle = normalize_oracle(doc.value("oracle", json{{"kind", "exact"}}));

  if (doc.contains("seeds")) {
    const json& s = doc["seeds"];
    if (!s.is_array() || s.empty()) throw ConfigError("config.seeds must be a nonempty array");
    cfg.seeds.clear();
    for (const auto& e : s) {
      if (!e.is_number_integer() || e.get<long long>() < 0) {
        throw ConfigError("config.seeds must contain nonnegative integers");
      }
      cfg.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  cfg.budget = integer(doc, "budget", "config");
  if (cfg.budget < 0) throw ConfigError("config.budget must be >= 0");
  if (doc.contains("record_every")) cfg.record_every = integer(doc, "record_every", "config");
  if (cfg.record_every < 1) throw ConfigError("config.record_every must be >= 1");
  if (doc.contains("stop_tolerance")) cfg.stop_tolerance = nonnegative(doc, "stop_tolerance", "config");
  if (doc.contains("output_dir")) cfg.output_dir = text(doc, "output_dir", "config");
  if (doc.contains("record_wall_time")) {
    if (!doc["record_wall_time"].is_boolean()) throw ConfigError("config.record_wall_time must be a boolean");
    cfg.record_wall_time = doc["record_wall_time"].get<bool>();
  }
  cfg.x0 = optional_vector(doc, "x0");
  cfg.x_prev = optional_vector(doc, "x_prev");
  cfg.v0 = optional_vector(doc, "v0");
  cfg.v_prev = optional_vector(doc, "v_prev");
  if (doc.contains("fit_window")) {
    const auto w = vector_of(doc["fit_window"], "config.fit_window");
    if (w.size() != 2 || !(w[0] > 0.0) || !(w[0] <= w[1])) {
      throw ConfigError("config.fit_window must be [lo, hi] with 0 < lo <= hi");
    }
    cfg.fit_window = std::make_pair(w[0], w[1]);
  }

  // compatibility rules
  const bool saddle = cfg.is_saddle();
  if (cfg.solver == SolverKind::spd && !saddle) {
    throw ConfigError("incompatible solver/problem: spd requires a saddle problem (matrix_game or smoothed_saddle)");
  }
  if (cfg.solver != SolverKind::spd && saddle) {
    throw ConfigError("incompatible solver/problem: " + to_string(cfg.solver) +
                      " requires an inclusion problem (affine, inclusion or lasso)");
  }
  if ((cfg.solver == SolverKind::rfb || cfg.solver == SolverKind::frb) && !oracle_is_exact(cfg.oracle)) {
    throw ConfigError("incompatible solver/oracle: " + to_string(cfg.solver) +
                      " is deterministic and requires oracle kind exact");
  }
  if (cfg.oracle.at("kind") == "minibatch" && (saddle || !has_components(cfg.problem))) {
    throw ConfigError("incompatible oracle/problem: minibatch needs a finite-sum problem (lasso or a finite_sum map)");
  }
  if (!saddle && (cfg.v0 || cfg.v_prev)) {
    throw ConfigError("v0 and v_prev apply only to saddle problems");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = cfg.problem;
  j["solver"] = to_string(cfg.solver);
  j["schedule"] = cfg.schedule;
  j["oracle"] = cfg.oracle;
  j["seeds"] = cfg.seeds;
  j["budget"] = cfg.budget;
  j["record_every"] = cfg.record_every;
  j["stop_tolerance"] = cfg.stop_tolerance;
  j["output_dir"] = cfg.output_dir;
  j["record_wall_time"] = cfg.record_wall_time;
  if (cfg.x0) j["x0"] = *cfg.x0;
  if (cfg.x_prev) j["x_prev"] = *cfg.x_prev;
  if (cfg.v0) j["v0"] = *cfg.v0;
  if (cfg.v_prev) j["v_prev"] = *cfg.v_prev;
  if (cfg.fit_window) j["fit_window"] = {cfg.fit_window->first, cfg.fit_window->second};
  return j;
}

std::string config_digest(const ExperimentConfig& cfg) {
  const std::string canonical = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void set_dotted(json& doc, const std::string& path, const json& value) {
  if (path.empty()) throw ConfigError("empty parameter path");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("malformed parameter path '" + path + "'");
    if (!node->is_object()) throw ConfigError("parameter path '" + path + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace srfb
