#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyreach/cli.hpp"
#include "polyreach/config.hpp"
#include "polyreach/svg.hpp"

using namespace polyreach;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("polyreach_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

const char* kDecaySystem = R"({
  "state_vars": ["x1"],
  "control_dim": 1,
  "dynamics": ["-x1 + 0*u"],
  "control_step": 0.5,
  "steps": 4,
  "init": [[1.0, 1.1]],
  "goal": [[0.0, 0.5]],
  "degree": [1],
  "delta_bar": 0.01,
  "tm_order": 5,
  "substeps": 5
})";

const char* kZeroNet = "1\n1\n0\nlinear\n0\n0\n";

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("load_system parses the benchmark-1 configuration") {
  SystemSpec sys = load_system(R"({
    "state_vars": ["x1", "x2"],
    "dynamics": ["x2", "u*x2^2 - x1"],
    "control_step": 0.2,
    "steps": 35,
    "init": [[0.8, 0.9], [0.5, 0.6]],
    "goal": [[0.0, 0.2], [0.05, 0.3]]
  })");
  CHECK(sys.state_vars.size() == 2);
  CHECK(sys.control_step == 0.2);
  CHECK(sys.steps == 35);
  CHECK(sys.init[0].lo == 0.8);
  CHECK(sys.goal[1].hi == 0.3);
  double v = expr_eval(sys.rhs[1], std::vector<double>{1.0, 2.0}, std::vector<double>{3.0});
  CHECK(v == 11.0);
}

TEST_CASE("load_system schema diagnostics") {
  try {
    load_system(R"({"state_vars":["x1"],"dynamics":["-x1"],"control_step":0.5,"steps":4,
                    "init":[[1.0,1.1]]})");
    FAIL("expected schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("$.goal") != std::string::npos);
  }

  try {
    load_system(R"({"state_vars":["x1","x2"],"dynamics":["x2","-x1"],"control_step":0.5,
                    "steps":4,"init":[[1.0,1.1]],"goal":[[0,1],[0,1]]})");
    FAIL("expected schema error");
  } catch (const SchemaError& e) {
    std::string msg = e.what();
    CHECK(msg.find("$.init") != std::string::npos);
    CHECK(msg.find("1") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }

  CHECK_THROWS_AS(load_system("not json"), SchemaError);
}

TEST_CASE("verify subcommand: exit codes and verdict JSON") {
  TempDir tmp;
  std::string sys = tmp.file("sys.json", kDecaySystem);
  std::string net = tmp.file("net.txt", kZeroNet);

  std::string out;
  int rc = run({"verify", "--model", net, "--system", sys}, &out);
  CHECK(rc == 0);
  CHECK(out.find("\"kind\":\"Yes\"") != std::string::npos);
  CHECK(out.find("\"step\":4") != std::string::npos);

  // unreachable goal: Unknown, exit 1
  std::string sys2 = tmp.file("sys2.json", std::string(kDecaySystem).replace(
                                               std::string(kDecaySystem).find("[[0.0, 0.5]]"),
                                               12, "[[9.0, 9.1]]"));
  rc = run({"verify", "--model", net, "--system", sys2}, &out);
  CHECK(rc == 1);
  CHECK(out.find("\"kind\":\"Unknown\"") != std::string::npos);

  // interval mode also runs
  rc = run({"verify", "--model", net, "--system", sys, "--mode", "interval"}, &out);
  CHECK(rc == 0);
}

TEST_CASE("usage errors exit with 2") {
  std::string err;
  CHECK(run({"verify", "--no-such-flag"}, nullptr, &err) == 2);
  CHECK(!err.empty());
  CHECK(run({"bogus-subcommand"}, nullptr, &err) == 2);
  CHECK(run({}, nullptr, &err) == 2);
  TempDir tmp;
  std::string net = tmp.file("net.txt", kZeroNet);
  CHECK(run({"verify", "--model", net, "--system", "/nonexistent/sys.json"}, nullptr, &err) == 2);
}

TEST_CASE("approx and lipschitz subcommands emit JSON") {
  TempDir tmp;
  std::string net = tmp.file("net.txt", "1\n1\n0\nlinear\n2.0\n1.0\n");

  std::string out;
  int rc = run({"approx", "--model", net, "--box", "0,4", "--degree", "1", "--delta", "0.01"}, &out);
  CHECK(rc == 0);
  CHECK(out.find("\"polys\"") != std::string::npos);
  CHECK(out.find("\"eps\"") != std::string::npos);

  rc = run({"lipschitz", "--model", net, "--box", "0,4"}, &out);
  CHECK(rc == 0);
  CHECK(out.find("\"L\":2.0") != std::string::npos);
  CHECK(out.find("\"per_layer\"") != std::string::npos);
}

TEST_CASE("simulate matches the exponential and self-converges at RK4 order") {
  TempDir tmp;
  std::string sys = tmp.file("sys.json", R"({
    "state_vars": ["x1"],
    "dynamics": ["-x1 + 0*u"],
    "control_step": 1.0,
    "steps": 1,
    "init": [[1.0, 1.0]],
    "goal": [[0.0, 1.0]]
  })");
  SystemSpec spec = load_system_file(sys);
  Network net = parse_network(kZeroNet);

  Trajectory tr = simulate(spec, net, std::vector<double>{1.0}, 1e-3);
  CHECK(std::fabs(tr.states.back()[0] - std::exp(-1.0)) <= 1e-6);

  // RK4 order probe: halving dt shrinks the endpoint error ~16x (2x slack)
  auto endpoint_err = [&](double dt) {
    Trajectory t = simulate(spec, net, std::vector<double>{1.0}, dt);
    return std::fabs(t.states.back()[0] - std::exp(-1.0));
  };
  double e1 = endpoint_err(0.05), e2 = endpoint_err(0.025);
  CHECK(e2 <= e1 / 16.0 * 2.0);
  CHECK(e2 >= e1 / 16.0 / 2.0 - 1e-18);

  std::string out;
  std::string csv = (tmp.path / "traj.csv").string();
  int rc = run({"simulate", "--model", tmp.file("net.txt", kZeroNet), "--system", sys, "--count",
                "3", "--dt", "0.001", "--out-csv", csv},
               &out);
  CHECK(rc == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1");
}

TEST_CASE("emit_svg determinism and geometry") {
  std::vector<FlowpipeSegment> empty;
  std::vector<Trajectory> no_traj;
  Box goal;
  std::string svg0 = emit_svg(empty, no_traj, goal, {0, 1});
  CHECK(svg0.find("<svg") != std::string::npos);
  CHECK(svg0.find("</svg>") != std::string::npos);

  FlowpipeSegment seg;
  seg.t_lo = 0.0;
  seg.t_hi = 0.1;
  seg.box = Box{Interval(0, 1), Interval(0, 1)};
  std::vector<FlowpipeSegment> one = {seg};
  Box goal2{Interval(0.2, 0.4), Interval(0.2, 0.4)};
  std::string a = emit_svg(one, no_traj, goal2, {0, 1});
  std::string b = emit_svg(one, no_traj, goal2, {0, 1});
  CHECK(a == b);  // byte-identical
  CHECK(a.find("stroke=\"green\"") != std::string::npos);
  CHECK(a.find("stroke=\"blue\"") != std::string::npos);
}

TEST_CASE("run config validation") {
  RunConfig cfg;
  cfg.delta_bar = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = RunConfig{};
  cfg.tm_order = 0;
  CHECK_THROWS(cfg.validate());
  cfg = RunConfig{};
  cfg.degree = {2, 0};
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("verdict and flowpipe JSON round-trip basics") {
  Verdict v;
  v.kind = VerdictKind::yes;
  v.step = 7;
  v.per_step_eps = {{0.001}, {0.002}};
  std::string j = verdict_to_json(v);
  CHECK(j.find("\"kind\":\"Yes\"") != std::string::npos);
  CHECK(j.find("\"step\":7") != std::string::npos);
  CHECK(j.find("0.002") != std::string::npos);

  FlowpipeSegment seg;
  seg.t_lo = 0.25;
  seg.t_hi = 0.5;
  seg.box = Box{Interval(-1, 2)};
  std::string f = flowpipes_to_json({seg});
  CHECK(f.find("\"t_lo\":0.25") != std::string::npos);
  CHECK(f.find("[-1.0,2.0]") != std::string::npos);
}
