#pragma once

// Flowpipe construction for the closed loop: per control step, abstract the
// controller over the current reachable set, then integrate the plant ODE
// for one control period with validated Taylor-model steps. State sets are
// carried as Taylor models over the initial-state variables so dependencies
// survive across steps.

#include <optional>
#include <string>
#include <vector>

#include "polyreach/bernstein.hpp"
#include "polyreach/dynamics.hpp"
#include "polyreach/error_bounds.hpp"
#include "polyreach/interval.hpp"
#include "polyreach/nn.hpp"
#include "polyreach/taylor.hpp"

namespace polyreach {

struct FlowpipeSegment {
  double t_lo = 0.0, t_hi = 0.0;            // absolute time span
  std::vector<TaylorModel> tm;              // per state var, over (x0 vars, local t)
  Box box;                                  // cached interval enclosure
};

enum class AbstractionMode { bernstein, interval };

struct VerifyParams {
  DegreeVector degree;
  double delta_bar = 0.01;
  int tm_order = 6;
  int substeps = 10;
  double width_cap = 100.0;
  AbstractionMode mode = AbstractionMode::bernstein;
  bool goal_every_step = false;
  double extra_eps = 0.0;   // test hook: inflates every controller remainder
  int rebox_every = 0;      // re-box the carried TMs every R steps; 0 = never
};

enum class VerdictKind { yes, unknown };

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  int step = 0;
  std::vector<FlowpipeSegment> flowpipes;
  std::vector<std::vector<double>> per_step_eps;
  int first_goal_step = -1;  // only tracked with goal_every_step
  std::string note;
};

struct ControllerTmResult {
  std::vector<TaylorModel> u_tm;
  ErrorReport report;
};

// Bernstein abstraction of the controller over the enclosure of the carried
// state TMs, composed back onto them: U = P(x) + [-eps, eps]. Degenerate
// enclosure dimensions are thickened by 1e-9 before construction.
ControllerTmResult controller_tm(const Network& net, const std::vector<TaylorModel>& x_set,
                                 const DegreeVector& d, double delta_bar, int order);

struct AprioriResult {
  Box enclosure;
  double h = 0.0;
};

// Box B with X + [0,h] f(B, U) inside B (Picard operator); halves h on
// failure down to h_min.
std::optional<AprioriResult> apriori_enclosure(const SystemSpec& sys, const Box& X, const Box& U,
                                               double h, double h_min);

class TmIntegrator {
 public:
  TmIntegrator(const SystemSpec& sys, int order);

  // One validated step of size h from x0 (TMs over the initial-state vars);
  // apriori must satisfy the Picard condition for (x0 enclosure, u_box, h).
  std::vector<TaylorModel> step(const std::vector<TaylorModel>& x0,
                                const std::vector<TaylorModel>& u_tms, double h,
                                const Box& apriori, const Box& u_box) const;

  int order() const { return order_; }
  const std::vector<std::vector<Expr>>& lie() const { return lie_; }

 private:
  const SystemSpec& sys_;
  int order_;
  ExprInterner interner_;
  std::vector<std::vector<Expr>> lie_;  // lie_[i][j], i = 0..order+1
};

// Initial TMs over the initial box: identity per dimension (constants for
// point dimensions).
std::vector<TaylorModel> initial_tms(const SystemSpec& sys, int order);

Verdict verify(const SystemSpec& sys, const Network& net, const VerifyParams& params);
Verdict verify_interval_baseline(const SystemSpec& sys, const Network& net, VerifyParams params);

}  // namespace polyreach
