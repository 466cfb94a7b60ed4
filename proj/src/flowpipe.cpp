#include "polyreach/flowpipe.hpp"

#include <cmath>

#include "polyreach/lipschitz.hpp"

namespace polyreach {

namespace {

Box enclosure_box(const std::vector<TaylorModel>& tms) {
  Box b;
  b.dims.reserve(tms.size());
  for (const auto& tm : tms) b.dims.push_back(tm_enclosure(tm));
  return b;
}

Box thicken_degenerate(Box b, double eps = 1e-9) {
  for (auto& d : b.dims) {
    if (d.width() < eps) {
      double m = d.mid();
      d.lo = m - 0.5 * eps;
      d.hi = m + 0.5 * eps;
    }
  }
  return b;
}

bool box_finite(const Box& b) {
  for (const auto& d : b.dims)
    if (!std::isfinite(d.lo) || !std::isfinite(d.hi)) return false;
  return true;
}

}  // namespace

ControllerTmResult controller_tm(const Network& net, const std::vector<TaylorModel>& x_set,
                                 const DegreeVector& d, double delta_bar, int order) {
  Box enc = thicken_degenerate(enclosure_box(x_set));
  ControllerApprox approx = approx_controller(net, enc, d);
  ErrorReport report = certify(net, approx, delta_bar);

  ControllerTmResult res;
  res.report = report;
  res.u_tm.reserve(approx.outputs.size());
  for (std::size_t o = 0; o < approx.outputs.size(); ++o) {
    TaylorModel u = tm_compose_poly(approx.outputs[o].poly, x_set, order);
    double eps = report.eps_used[o];
    u.rem += Interval(-eps, eps);
    res.u_tm.push_back(std::move(u));
  }
  return res;
}

std::optional<AprioriResult> apriori_enclosure(const SystemSpec& sys, const Box& X, const Box& U,
                                               double h, double h_min) {
  auto inflate = [](const Box& b) {
    Box r = b;
    for (auto& d : r.dims) {
      double pad = 0.1 * d.width() + 1e-4;
      d.lo -= pad;
      d.hi += pad;
    }
    return r;
  };

  while (h >= h_min) {
    Box B = inflate(X);
    bool found = false;
    for (int iter = 0; iter < 50 && !found; ++iter) {
      Box Bnext;
      Bnext.dims.resize(X.size());
      bool ok = true;
      for (std::size_t j = 0; j < X.size(); ++j) {
        Interval fj = expr_interval_eval(sys.rhs[j], B, U);
        Bnext[j] = X[j] + Interval(0.0, h) * fj;
        if (!std::isfinite(Bnext[j].lo) || !std::isfinite(Bnext[j].hi)) ok = false;
      }
      if (!ok) break;
      if (B.contains(Bnext)) {
        // Refine a few rounds; each Picard image still encloses the flow.
        for (int r = 0; r < 3; ++r) {
          Box Bref;
          Bref.dims.resize(X.size());
          for (std::size_t j = 0; j < X.size(); ++j)
            Bref[j] = X[j] + Interval(0.0, h) * expr_interval_eval(sys.rhs[j], Bnext, U);
          Bnext = Bref;
        }
        return AprioriResult{Bnext, h};
      }
      B = inflate(hull(B, Bnext));
    }
    h *= 0.5;
  }
  return std::nullopt;
}

TmIntegrator::TmIntegrator(const SystemSpec& sys, int order) : sys_(sys), order_(order) {
  const std::size_t n = sys.state_vars.size();
  lie_.resize(static_cast<std::size_t>(order) + 2);
  lie_[0].reserve(n);
  for (std::size_t j = 0; j < n; ++j) lie_[0].push_back(e_state(static_cast<int>(j)));
  for (int i = 1; i <= order + 1; ++i) {
    lie_[static_cast<std::size_t>(i)].reserve(n);
    for (std::size_t j = 0; j < n; ++j)
      lie_[static_cast<std::size_t>(i)].push_back(
          lie_derivative(lie_[static_cast<std::size_t>(i) - 1][j], sys.rhs, &interner_));
  }
}

std::vector<TaylorModel> TmIntegrator::step(const std::vector<TaylorModel>& x0,
                                            const std::vector<TaylorModel>& u_tms, double h,
                                            const Box& apriori, const Box& u_box) const {
  const std::size_t n = x0.size();
  const int k = order_;

  // Taylor coefficients lie^i(x0,u)/i! as TMs over the initial-state vars.
  TmEvalCache cache;
  std::vector<std::vector<TaylorModel>> coeff(static_cast<std::size_t>(k) + 1);
  coeff[0] = x0;
  for (int i = 1; i <= k; ++i) {
    coeff[static_cast<std::size_t>(i)].reserve(n);
    for (std::size_t j = 0; j < n; ++j)
      coeff[static_cast<std::size_t>(i)].push_back(
          expr_tm_eval(lie_[static_cast<std::size_t>(i)][j], x0, u_tms, k, &cache));
  }

  const Interval t_range(0.0, h);
  std::vector<std::string> lifted_vars = x0.front().poly.vars;
  lifted_vars.push_back("t");
  Box lifted_domain = x0.front().domain;
  lifted_domain.dims.push_back(t_range);

  // t^i as an exact TM in the lifted space.
  auto t_power = [&](unsigned i) {
    TaylorModel t = tm_const(1.0, lifted_vars, lifted_domain, k);
    if (i > 0) {
      ExpVec e(lifted_vars.size(), 0);
      e.back() = i;
      t.poly.terms.clear();
      t.poly.terms[e] = 1.0;
    }
    return t;
  };

  std::vector<TaylorModel> flow;
  flow.reserve(n);
  Interval fact(1.0);
  std::vector<Interval> inv_fact(static_cast<std::size_t>(k) + 1, Interval(1.0));
  for (int i = 1; i <= k; ++i) {
    fact = fact * Interval(static_cast<double>(i));
    inv_fact[static_cast<std::size_t>(i)] = Interval(1.0) / fact;
  }
  Interval fact_k1 = fact * Interval(static_cast<double>(k + 1));

  for (std::size_t j = 0; j < n; ++j) {
    TaylorModel acc = tm_append_var(coeff[0][j], "t", t_range);
    for (int i = 1; i <= k; ++i) {
      TaylorModel ci = tm_append_var(coeff[static_cast<std::size_t>(i)][j], "t", t_range);
      ci = tm_scale_iv(ci, inv_fact[static_cast<std::size_t>(i)]);
      acc = tm_add(acc, tm_mul(ci, t_power(static_cast<unsigned>(i)), k));
    }
    // Lagrange term: lie^(k+1) over the a priori enclosure, times
    // tau^(k+1)/(k+1)! with tau in [0,h].
    Interval lag = expr_interval_eval(lie_[static_cast<std::size_t>(k) + 1][j], apriori, u_box);
    Interval tau_pow = ipow(Interval(0.0, h), static_cast<unsigned>(k) + 1);
    acc.rem += lag * tau_pow / fact_k1;
    flow.push_back(std::move(acc));
  }
  return flow;
}

std::vector<TaylorModel> initial_tms(const SystemSpec& sys, int order) {
  // States are affine images of normalized variables z in [-1,1]^n; interval
  // bounding of high-degree polynomials behaves far better on the normalized
  // domain than on the raw initial box.
  const std::size_t n = sys.state_vars.size();
  std::vector<std::string> vars;
  Box domain;
  for (std::size_t j = 0; j < n; ++j) {
    vars.push_back("z" + std::to_string(j + 1));
    domain.dims.emplace_back(-1.0, 1.0);
  }
  std::vector<TaylorModel> tms;
  tms.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (sys.init[j].is_point()) {
      tms.push_back(tm_const(sys.init[j].lo, vars, domain, order));
    } else {
      double mid = sys.init[j].mid();
      double rad = 0.5 * (sys.init[j].hi - sys.init[j].lo);
      TaylorModel t = tm_scale(tm_identity(j, vars, domain, order), rad);
      tms.push_back(tm_add_const(t, Interval(mid)));
      // cover outward-rounding of mid/rad so the affine image contains the box
      Interval img = tm_enclosure(tms.back());
      if (!img.contains(sys.init[j])) {
        double pad = std::max(sys.init[j].hi - img.hi, img.lo - sys.init[j].lo);
        pad = std::max(pad, 0.0);
        tms.back().rem += Interval(-pad, pad);
      }
    }
  }
  return tms;
}

namespace {

Verdict run_verify(const SystemSpec& sys, const Network& net, const VerifyParams& params) {
  if (net.input_dim != sys.state_vars.size())
    throw std::invalid_argument("verify: controller input dimension != state dimension");
  if (net.output_dim() != sys.control_dim)
    throw std::invalid_argument("verify: controller output dimension != control dimension");

  const int k = params.tm_order;
  const double dc = sys.control_step;
  const double h_default = dc / params.substeps;
  const double h_min = dc / 1000.0;

  TmIntegrator integrator(sys, k);
  std::vector<TaylorModel> x_tms = initial_tms(sys, k);

  Verdict verdict;
  double t_abs = 0.0;

  for (int step = 0; step < sys.steps; ++step) {
    // Controller abstraction over the current set.
    std::vector<TaylorModel> u_tms;
    std::vector<double> eps_step;
    if (params.mode == AbstractionMode::bernstein) {
      ControllerTmResult ctrl = controller_tm(net, x_tms, params.degree, params.delta_bar, k);
      u_tms = std::move(ctrl.u_tm);
      eps_step = ctrl.report.eps_used;
    } else {
      Box enc = enclosure_box(x_tms);
      Box out = propagate_intervals(net, enc).back().post_activation;
      for (std::size_t o = 0; o < out.size(); ++o) {
        u_tms.push_back(tm_const_iv(out[o], x_tms.front().poly.vars, x_tms.front().domain, k));
        eps_step.push_back(out[o].rad());
      }
    }
    if (params.extra_eps > 0.0)
      for (auto& u : u_tms) u.rem += Interval(-params.extra_eps, params.extra_eps);
    verdict.per_step_eps.push_back(std::move(eps_step));

    Box u_box = enclosure_box(u_tms);

    double t_local = 0.0;
    double h_cur = h_default;
    while (t_local < dc - 1e-12 * dc) {
      double h_try = std::min(h_cur, dc - t_local);
      Box X = enclosure_box(x_tms);
      if (!box_finite(X) || X.max_width() > params.width_cap) {
        verdict.kind = VerdictKind::unknown;
        verdict.step = step;
        verdict.note = "state enclosure exceeded width cap";
        return verdict;
      }
      auto ap = apriori_enclosure(sys, X, u_box, h_try, std::min(h_min, h_try));
      if (!ap) {
        verdict.kind = VerdictKind::unknown;
        verdict.step = step;
        verdict.note = "a priori enclosure failed (possible blow-up)";
        return verdict;
      }
      std::vector<TaylorModel> flow = integrator.step(x_tms, u_tms, ap->h, ap->enclosure, u_box);

      FlowpipeSegment seg;
      seg.t_lo = t_abs;
      seg.t_hi = t_abs + ap->h;
      seg.box = enclosure_box(flow);
      seg.tm = flow;
      if (!box_finite(seg.box) || seg.box.max_width() > params.width_cap) {
        verdict.kind = VerdictKind::unknown;
        verdict.step = step;
        verdict.note = "flowpipe exceeded width cap";
        return verdict;
      }
      verdict.flowpipes.push_back(std::move(seg));

      std::vector<TaylorModel> next;
      next.reserve(flow.size());
      for (const auto& tm : flow) next.push_back(tm_subst_last(tm, ap->h));
      x_tms = std::move(next);

      t_abs += ap->h;
      t_local += ap->h;
      h_cur = ap->h;
    }

    if (params.goal_every_step && verdict.first_goal_step < 0) {
      if (sys.goal.contains(enclosure_box(x_tms))) verdict.first_goal_step = step + 1;
    }
    if (params.rebox_every > 0 && (step + 1) % params.rebox_every == 0 && step + 1 < sys.steps) {
      Box b = enclosure_box(x_tms);
      SystemSpec tmp = sys;
      tmp.init = b;
      x_tms = initial_tms(tmp, k);
    }
  }

  Box final_box = enclosure_box(x_tms);
  if (sys.goal.contains(final_box)) {
    verdict.kind = VerdictKind::yes;
    verdict.step = sys.steps;
  } else {
    verdict.kind = VerdictKind::unknown;
    verdict.step = sys.steps;
    verdict.note = "horizon completed without goal containment";
  }
  return verdict;
}

}  // namespace

Verdict verify(const SystemSpec& sys, const Network& net, const VerifyParams& params) {
  return run_verify(sys, net, params);
}

Verdict verify_interval_baseline(const SystemSpec& sys, const Network& net, VerifyParams params) {
  params.mode = AbstractionMode::interval;
  return run_verify(sys, net, params);
}

}  // namespace polyreach
