#include "polyreach/sim.hpp"

#include <cmath>

namespace polyreach {

namespace {

void rhs_eval(const SystemSpec& sys, std::span<const double> x, std::span<const double> u,
              std::vector<double>& out) {
  for (std::size_t j = 0; j < sys.rhs.size(); ++j) out[j] = expr_eval(sys.rhs[j], x, u);
}

void rk4_step(const SystemSpec& sys, std::vector<double>& x, std::span<const double> u, double h) {
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs_eval(sys, x, u, k1);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
  rhs_eval(sys, tmp, u, k2);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
  rhs_eval(sys, tmp, u, k3);
  for (std::size_t j = 0; j < n; ++j) tmp[j] = x[j] + h * k3[j];
  rhs_eval(sys, tmp, u, k4);
  for (std::size_t j = 0; j < n; ++j)
    x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

bool finite_state(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

Trajectory simulate(const SystemSpec& sys, const Network& net, std::span<const double> x0,
                    double dt) {
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");
  if (x0.size() != sys.state_vars.size()) throw std::invalid_argument("simulate: bad x0 dimension");

  Trajectory tr;
  std::vector<double> x(x0.begin(), x0.end());
  const int per_interval = std::max(1, static_cast<int>(std::ceil(sys.control_step / dt)));
  const double h = sys.control_step / per_interval;

  tr.times.push_back(0.0);
  tr.states.push_back(x);

  double t = 0.0;
  for (int i = 0; i < sys.steps; ++i) {
    std::vector<double> u = nn_eval(net, x);
    for (int s = 0; s < per_interval; ++s) {
      rk4_step(sys, x, u, h);
      t = i * sys.control_step + (s + 1) * h;
      if (!finite_state(x)) throw SimDivergence(t);
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
  }
  return tr;
}

Trajectory simulate_const_u(const SystemSpec& sys, std::span<const double> u,
                            std::span<const double> x0, double dt, double t_end) {
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");
  Trajectory tr;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> uc(u.begin(), u.end());
  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
  const double h = t_end / steps;
  tr.times.push_back(0.0);
  tr.states.push_back(x);
  for (int s = 0; s < steps; ++s) {
    rk4_step(sys, x, uc, h);
    double t = (s + 1) * h;
    if (!finite_state(x)) throw SimDivergence(t);
    tr.times.push_back(t);
    tr.states.push_back(x);
  }
  return tr;
}

}  // namespace polyreach
