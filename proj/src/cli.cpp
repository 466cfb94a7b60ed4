#include "polyreach/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "polyreach/config.hpp"
#include "polyreach/kernels.hpp"
#include "polyreach/lipschitz.hpp"
#include "polyreach/svg.hpp"

namespace polyreach {

namespace {

using nlohmann::json;

std::vector<int> parse_degree_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty degree list");
  return out;
}

Box parse_box_arg(const std::string& s) {
  Box b;
  std::stringstream ss(s);
  std::string dim;
  while (std::getline(ss, dim, ';')) {
    if (dim.empty()) continue;
    auto comma = dim.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("box dimension needs 'lo,hi': " + dim);
    double lo = std::stod(dim.substr(0, comma));
    double hi = std::stod(dim.substr(comma + 1));
    b.dims.emplace_back(lo, hi);
  }
  if (b.dims.empty()) throw std::invalid_argument("empty box");
  return b;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::vector<Trajectory> sample_trajectories(const SystemSpec& sys, const Network& net, int count,
                                            double dt, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<Trajectory> trs;
  trs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<double> x0(sys.state_vars.size());
    for (std::size_t j = 0; j < x0.size(); ++j) {
      std::uniform_real_distribution<double> dist(sys.init[j].lo, sys.init[j].hi);
      x0[j] = sys.init[j].is_point() ? sys.init[j].lo : dist(rng);
    }
    trs.push_back(simulate(sys, net, x0, dt));
  }
  return trs;
}

DegreeVector resolve_degree(const RunConfig& cfg, std::size_t dim) {
  std::vector<int> d = cfg.degree;
  if (d.empty()) d.assign(dim, 2);
  if (d.size() == 1 && dim > 1) d.assign(dim, d[0]);
  if (d.size() != dim)
    throw std::invalid_argument("degree has " + std::to_string(d.size()) +
                                " entries, state dimension is " + std::to_string(dim));
  return DegreeVector(d);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  std::ifstream sysin(cfg.system_path);
  if (!sysin) throw std::runtime_error("cannot open system file: " + cfg.system_path);
  std::stringstream ss;
  ss << sysin.rdbuf();
  SystemSpec sys = load_system(ss.str());
  Network net = load_network_file(cfg.model_path);

  VerifyParams params;
  params.degree = resolve_degree(cfg, sys.state_vars.size());
  params.delta_bar = cfg.delta_bar;
  params.tm_order = cfg.tm_order;
  params.substeps = cfg.substeps;
  params.width_cap = cfg.width_cap;
  params.goal_every_step = cfg.goal_every_step;
  if (cfg.mode == "interval")
    params.mode = AbstractionMode::interval;
  else if (cfg.mode == "bernstein")
    params.mode = AbstractionMode::bernstein;
  else
    throw std::invalid_argument("unknown mode: " + cfg.mode);

  Verdict v = verify(sys, net, params);
  out << verdict_to_json(v) << "\n";

  if (!cfg.out_flowpipes.empty()) write_file(cfg.out_flowpipes, flowpipes_to_json(v.flowpipes));
  if (!cfg.out_traj.empty() || !cfg.out_svg.empty()) {
    double dt = sys.control_step / 200.0;
    auto trs = sample_trajectories(sys, net, cfg.traj_count, dt, cfg.seed);
    if (!cfg.out_traj.empty()) write_file(cfg.out_traj, trajectories_to_csv(trs, sys.state_vars));
    if (!cfg.out_svg.empty()) {
      std::string xl = sys.state_vars.size() > 0 ? sys.state_vars[0] : "x1";
      std::string yl = sys.state_vars.size() > 1 ? sys.state_vars[1] : "x2";
      write_file(cfg.out_svg, emit_svg(v.flowpipes, trs, sys.goal, {0, 1}, xl, yl));
    }
  }
  return v.kind == VerdictKind::yes ? 0 : 1;
}

int cmd_approx(const RunConfig& cfg, const std::string& box_arg, std::ostream& out) {
  Network net = load_network_file(cfg.model_path);
  Box box = parse_box_arg(box_arg);
  if (box.size() != net.input_dim)
    throw std::invalid_argument("box dimension does not match network input dimension");
  DegreeVector d = resolve_degree(cfg, net.input_dim);

  ControllerApprox approx = approx_controller(net, box, d);
  ErrorReport rep = certify(net, approx, cfg.delta_bar);

  json j;
  json polys = json::array();
  for (const auto& o : approx.outputs) polys.push_back(poly_to_string(o.poly));
  j["polys"] = polys;
  j["eps"] = rep.eps_used;
  j["eps_t"] = rep.eps_t;
  j["eps_s"] = rep.eps_s;
  j["conversion_slack"] = rep.conv_slack;
  j["L"] = rep.L;
  j["p"] = rep.p;
  j["delta_p"] = rep.delta_p;
  j["samples"] = rep.samples;
  out << j.dump() << "\n";
  return 0;
}

int cmd_lipschitz(const RunConfig& cfg, const std::string& box_arg, std::ostream& out) {
  Network net = load_network_file(cfg.model_path);
  Box box = parse_box_arg(box_arg);
  if (box.size() != net.input_dim)
    throw std::invalid_argument("box dimension does not match network input dimension");
  LipschitzReport rep = network_lipschitz_report(net, box);
  json j;
  j["L"] = rep.L;
  j["per_layer"] = rep.per_layer;
  out << j.dump() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, double dt_arg, std::ostream& out) {
  std::ifstream sysin(cfg.system_path);
  if (!sysin) throw std::runtime_error("cannot open system file: " + cfg.system_path);
  std::stringstream ss;
  ss << sysin.rdbuf();
  SystemSpec sys = load_system(ss.str());
  Network net = load_network_file(cfg.model_path);

  double dt = dt_arg > 0.0 ? dt_arg : sys.control_step / 200.0;
  auto trs = sample_trajectories(sys, net, cfg.traj_count, dt, cfg.seed);
  if (!cfg.out_traj.empty()) write_file(cfg.out_traj, trajectories_to_csv(trs, sys.state_vars));

  json j;
  j["trajectories"] = trs.size();
  j["dt"] = dt;
  j["t_end"] = sys.control_step * sys.steps;
  int in_goal = 0;
  for (const auto& tr : trs)
    if (sys.goal.contains(tr.states.back())) ++in_goal;
  j["final_states_in_goal"] = in_goal;
  out << j.dump() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reachability verification of neural-network controlled systems"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string degree_arg, box_arg, mode_arg;
  double dt_arg = 0.0;

  auto add_common = [&](CLI::App* sub, bool needs_system) {
    sub->add_option("--model", cfg.model_path, "controller weight file")->required();
    if (needs_system)
      sub->add_option("--system", cfg.system_path, "system JSON file")->required();
    sub->add_option("--degree", degree_arg, "Bernstein degree per dimension, e.g. 3,3");
    sub->add_option("--delta", cfg.delta_bar, "sampling precision bound delta-bar");
    return sub;
  };

  CLI::App* verify_cmd = add_common(app.add_subcommand("verify", "run flowpipe verification"), true);
  verify_cmd->add_option("--order", cfg.tm_order, "Taylor model order");
  verify_cmd->add_option("--substeps", cfg.substeps, "integration sub-steps per control step");
  verify_cmd->add_option("--width-cap", cfg.width_cap, "blow-up width threshold");
  verify_cmd->add_option("--mode", mode_arg, "bernstein | interval");
  verify_cmd->add_option("--out-flowpipes", cfg.out_flowpipes, "write flowpipes JSON here");
  verify_cmd->add_option("--out-traj", cfg.out_traj, "write simulated trajectories CSV here");
  verify_cmd->add_option("--out-svg", cfg.out_svg, "write SVG plot here");
  verify_cmd->add_option("--trajectories", cfg.traj_count, "simulated trajectory count");
  verify_cmd->add_option("--seed", cfg.seed, "simulation seed");
  verify_cmd->add_flag("--check-goal-every-step", cfg.goal_every_step,
                       "also report the first step whose enclosure is inside the goal");

  CLI::App* approx_cmd = add_common(app.add_subcommand("approx", "print the polynomial abstraction"), false);
  approx_cmd->add_option("--box", box_arg, "input box, e.g. 0.8,0.9;0.5,0.6")->required();

  CLI::App* lip_cmd = app.add_subcommand("lipschitz", "print the certified Lipschitz constant");
  lip_cmd->add_option("--model", cfg.model_path, "controller weight file")->required();
  lip_cmd->add_option("--box", box_arg, "input box, e.g. 0.8,0.9;0.5,0.6")->required();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "RK4 closed-loop simulation");
  sim_cmd->add_option("--model", cfg.model_path, "controller weight file")->required();
  sim_cmd->add_option("--system", cfg.system_path, "system JSON file")->required();
  sim_cmd->add_option("--dt", dt_arg, "integration step");
  sim_cmd->add_option("--count", cfg.traj_count, "trajectory count");
  sim_cmd->add_option("--seed", cfg.seed, "sampling seed");
  sim_cmd->add_option("--out-csv", cfg.out_traj, "write trajectories CSV here");

  std::vector<const char*> argv;
  argv.push_back("polyreach");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    // Config precedence: defaults < system JSON < explicit flags.
    bool needs_system = verify_cmd->parsed() || sim_cmd->parsed();
    if (needs_system && !cfg.system_path.empty()) {
      std::ifstream in(cfg.system_path);
      if (in) {
        std::stringstream ss;
        ss << in.rdbuf();
        RunConfig json_cfg;
        apply_system_defaults(json_cfg, ss.str());
        CLI::App* active = verify_cmd->parsed() ? verify_cmd : sim_cmd;
        if (degree_arg.empty() && !json_cfg.degree.empty()) cfg.degree = json_cfg.degree;
        if (active->count("--delta") == 0) cfg.delta_bar = json_cfg.delta_bar;
        if (verify_cmd->parsed()) {
          if (verify_cmd->count("--order") == 0) cfg.tm_order = json_cfg.tm_order;
          if (verify_cmd->count("--substeps") == 0) cfg.substeps = json_cfg.substeps;
          if (verify_cmd->count("--width-cap") == 0) cfg.width_cap = json_cfg.width_cap;
          if (verify_cmd->count("--mode") == 0) mode_arg = json_cfg.mode;
        }
      }
    }
    if (!degree_arg.empty()) cfg.degree = parse_degree_list(degree_arg);
    if (!mode_arg.empty()) cfg.mode = mode_arg;
    cfg.validate();

    if (verify_cmd->parsed()) return cmd_verify(cfg, out);
    if (approx_cmd->parsed()) return cmd_approx(cfg, box_arg, out);
    if (lip_cmd->parsed()) return cmd_lipschitz(cfg, box_arg, out);
    if (sim_cmd->parsed()) return cmd_simulate(cfg, dt_arg, out);
    err << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace polyreach
