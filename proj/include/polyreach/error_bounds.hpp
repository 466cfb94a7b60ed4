#pragma once

// Certified approximation error bounds for Bernstein abstractions: the
// Lipschitz/degree T-error, the adaptive grid-sampling S-error, and the
// combined certificate that completes the output over-approximation
// contract kappa(x) in P(x) + [-eps, eps].

#include <cstddef>
#include <functional>
#include <vector>

#include "polyreach/bernstein.hpp"
#include "polyreach/interval.hpp"
#include "polyreach/nn.hpp"
#include "polyreach/poly.hpp"

namespace polyreach {

// eps_t = (L/2) * sqrt(sum 1/d_j) * max_j (u_j - l_j).
double t_error(double L, const DegreeVector& d, const Box& x);

// p_j = ceil(L (u_j - l_j) sqrt(m) / delta_bar), floored at 1; guarantees
// delta(p) <= delta_bar.
std::vector<int> adaptive_partition(const Box& x, double L, double delta_bar);

// delta(p) = L sqrt(sum ((u_j - l_j)/p_j)^2).
double sampling_precision(const Box& x, double L, const std::vector<int>& p);

struct SErrorResult {
  double eps_s = 0.0;
  std::vector<int> p;
  double delta_p = 0.0;
  std::size_t samples = 0;
  double conv_slack = 0.0;  // max |power-basis - de Casteljau| over the grid
};

// Evaluates |poly(c_k) - f(c_k)| at every cell center of the adaptive
// partition; eps_s = delta(p) + max deviation. When a Bernstein tensor is
// supplied, centers are evaluated with de Casteljau and the power-basis
// discrepancy is recorded as conv_slack.
SErrorResult s_error(const VectorFn& f, std::size_t output_index, const MultiPoly& poly,
                     const BernsteinTensor* tensor, const Box& x, double L, double delta_bar);

struct ErrorReport {
  std::vector<double> eps_t;
  std::vector<double> eps_s;
  std::vector<double> eps_used;  // min(eps_t, eps_s) + conversion slack, per output
  std::vector<double> conv_slack;
  std::vector<int> p;
  double delta_p = 0.0;
  std::size_t samples = 0;
  double L = 0.0;
};

// Certify an abstraction built by approx_controller over the same box and
// degree. L is computed from the network over the domain.
ErrorReport certify(const Network& net, const ControllerApprox& approx, double delta_bar);

// Function-level variant with a caller-supplied Lipschitz constant.
ErrorReport certify_fn(const VectorFn& f, const ControllerApprox& approx, double L,
                       double delta_bar);

}  // namespace polyreach
