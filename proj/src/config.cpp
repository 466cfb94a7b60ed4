#include "polyreach/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace polyreach {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("$: not valid JSON");
  return j;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("$.") + key + ": missing required key");
  return *it;
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw SchemaError(std::string("$.") + key + ": expected a number");
  return v.get<double>();
}

Box parse_box(const json& v, const char* key) {
  if (!v.is_array()) throw SchemaError(std::string("$.") + key + ": expected an array of [lo,hi] pairs");
  Box b;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& d = v[i];
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      throw SchemaError(std::string("$.") + key + "[" + std::to_string(i) + "]: expected [lo, hi]");
    double lo = d[0].get<double>(), hi = d[1].get<double>();
    if (!(lo <= hi))
      throw SchemaError(std::string("$.") + key + "[" + std::to_string(i) + "]: lo > hi");
    b.dims.emplace_back(lo, hi);
  }
  return b;
}

}  // namespace

SystemSpec load_system(const std::string& json_text) {
  json j = parse_json(json_text);
  if (!j.is_object()) throw SchemaError("$: expected an object");

  SystemSpec sys;

  const json& sv = require(j, "state_vars");
  if (!sv.is_array() || sv.empty()) throw SchemaError("$.state_vars: expected a non-empty array");
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (!sv[i].is_string())
      throw SchemaError("$.state_vars[" + std::to_string(i) + "]: expected a string");
    sys.state_vars.push_back(sv[i].get<std::string>());
  }

  long control_dim = 1;
  if (auto it = j.find("control_dim"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long>() < 0)
      throw SchemaError("$.control_dim: expected a non-negative integer");
    control_dim = it->get<long>();
  }
  sys.control_dim = static_cast<std::size_t>(control_dim);

  std::vector<std::pair<std::string, int>> control_lookup;
  for (long i = 0; i < control_dim; ++i)
    control_lookup.emplace_back("u" + std::to_string(i + 1), static_cast<int>(i));
  if (control_dim == 1) control_lookup.emplace_back("u", 0);  // alias for u1

  const json& dyn = require(j, "dynamics");
  if (!dyn.is_array() || dyn.size() != sys.state_vars.size())
    throw SchemaError("$.dynamics: expected one expression string per state variable (" +
                      std::to_string(sys.state_vars.size()) + ")");
  for (std::size_t i = 0; i < dyn.size(); ++i) {
    if (!dyn[i].is_string())
      throw SchemaError("$.dynamics[" + std::to_string(i) + "]: expected a string");
    try {
      sys.rhs.push_back(
          parse_expr(dyn[i].get<std::string>(), sys.state_vars, control_lookup));
    } catch (const ExprParseError& e) {
      throw SchemaError("$.dynamics[" + std::to_string(i) + "]: " + e.what());
    }
  }

  sys.control_step = require_number(j, "control_step");
  if (!(sys.control_step > 0.0)) throw SchemaError("$.control_step: must be > 0");

  const json& st = require(j, "steps");
  if (!st.is_number_integer() || st.get<long>() < 1)
    throw SchemaError("$.steps: expected a positive integer");
  sys.steps = static_cast<int>(st.get<long>());

  sys.init = parse_box(require(j, "init"), "init");
  sys.goal = parse_box(require(j, "goal"), "goal");
  if (sys.init.size() != sys.state_vars.size())
    throw SchemaError("$.init: dimension " + std::to_string(sys.init.size()) +
                      " does not match state dimension " + std::to_string(sys.state_vars.size()));
  if (sys.goal.size() != sys.state_vars.size())
    throw SchemaError("$.goal: dimension " + std::to_string(sys.goal.size()) +
                      " does not match state dimension " + std::to_string(sys.state_vars.size()));
  return sys;
}

SystemSpec load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

void RunConfig::validate() const {
  if (delta_bar <= 0.0) throw std::invalid_argument("config: delta_bar must be > 0");
  if (tm_order < 1 || tm_order > 18) throw std::invalid_argument("config: tm_order must be in [1,18]");
  if (substeps < 1) throw std::invalid_argument("config: substeps must be >= 1");
  if (width_cap <= 0.0) throw std::invalid_argument("config: width_cap must be > 0");
  if (traj_count < 1) throw std::invalid_argument("config: trajectory count must be >= 1");
  for (int d : degree)
    if (d < 1) throw std::invalid_argument("config: degree entries must be >= 1");
}

void apply_system_defaults(RunConfig& cfg, const std::string& json_text) {
  json j = parse_json(json_text);
  if (!j.is_object()) return;
  if (auto it = j.find("degree"); it != j.end() && it->is_array()) {
    cfg.degree.clear();
    for (const auto& v : *it) cfg.degree.push_back(v.get<int>());
  }
  if (auto it = j.find("delta_bar"); it != j.end() && it->is_number())
    cfg.delta_bar = it->get<double>();
  if (auto it = j.find("tm_order"); it != j.end() && it->is_number_integer())
    cfg.tm_order = it->get<int>();
  if (auto it = j.find("substeps"); it != j.end() && it->is_number_integer())
    cfg.substeps = it->get<int>();
  if (auto it = j.find("mode"); it != j.end() && it->is_string()) cfg.mode = it->get<std::string>();
  if (auto it = j.find("width_cap"); it != j.end() && it->is_number())
    cfg.width_cap = it->get<double>();
}

std::string verdict_to_json(const Verdict& v) {
  json j;
  j["kind"] = v.kind == VerdictKind::yes ? "Yes" : "Unknown";
  j["step"] = v.step;
  json eps = json::array();
  for (const auto& step_eps : v.per_step_eps) {
    double m = 0.0;
    for (double e : step_eps) m = std::max(m, e);
    eps.push_back(m);
  }
  j["eps"] = eps;
  if (v.first_goal_step >= 0) j["first_goal_step"] = v.first_goal_step;
  if (!v.note.empty()) j["note"] = v.note;
  return j.dump();
}

std::string flowpipes_to_json(const std::vector<FlowpipeSegment>& fps) {
  json arr = json::array();
  for (const auto& fp : fps) {
    json e;
    e["t_lo"] = fp.t_lo;
    e["t_hi"] = fp.t_hi;
    json box = json::array();
    for (const auto& d : fp.box.dims) box.push_back(json::array({d.lo, d.hi}));
    e["box"] = box;
    arr.push_back(std::move(e));
  }
  return arr.dump();
}

std::string trajectories_to_csv(const std::vector<Trajectory>& trs,
                                const std::vector<std::string>& state_vars) {
  std::ostringstream os;
  os.precision(12);
  os << "t";
  for (const auto& v : state_vars) os << "," << v;
  os << "\n";
  for (std::size_t k = 0; k < trs.size(); ++k) {
    if (k) os << "\n";  // blank line separates trajectories
    const auto& tr = trs[k];
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      os << tr.times[i];
      for (double x : tr.states[i]) os << "," << x;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace polyreach
