#pragma once

// RK4 simulation of the closed loop with zero-order-hold control: u is
// fixed at kappa(x(i*delta_c)) within each control interval.

#include <span>
#include <vector>

#include "polyreach/dynamics.hpp"
#include "polyreach/nn.hpp"

namespace polyreach {

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // one state vector per time
};

struct SimDivergence : std::runtime_error {
  double t;
  explicit SimDivergence(double t_)
      : std::runtime_error("simulation diverged (non-finite state) at t = " + std::to_string(t_)),
        t(t_) {}
};

// Integrates over [0, steps * control_step]; dt is reduced per control
// interval to an integer number of RK4 steps.
Trajectory simulate(const SystemSpec& sys, const Network& net, std::span<const double> x0,
                    double dt);

// Convenience: fixed control input over the whole run (no controller).
Trajectory simulate_const_u(const SystemSpec& sys, std::span<const double> u,
                            std::span<const double> x0, double dt, double t_end);

}  // namespace polyreach
