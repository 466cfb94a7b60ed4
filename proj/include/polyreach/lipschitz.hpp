#pragma once

// Certified Lipschitz constant of a network over an input box: layer-wise
// interval propagation plus refined per-layer activation-slope bounds.
// All norms are induced 2-norms; every bound is an over-approximation.

#include <vector>

#include "polyreach/interval.hpp"
#include "polyreach/nn.hpp"

namespace polyreach {

struct LayerIntervals {
  Box pre_activation;   // W * prev + b
  Box post_activation;  // activation image
};

std::vector<LayerIntervals> propagate_intervals(const Network& net, const Box& x);

// Certified upper bound on the induced 2-norm: min of sqrt(|W|_1 * |W|_inf),
// the Frobenius norm, and a Collatz-Wielandt bound on |W|^T|W| along a
// power-iterated direction, all rounded upward.
double matrix_opnorm_ub(const Matrix& W);

// Refined per-layer Lipschitz factor given the pre-activation box.
double layer_lipschitz(Activation act, const Matrix& W, const Box& pre);

struct LipschitzReport {
  double L = 0.0;
  std::vector<double> per_layer;
};

LipschitzReport network_lipschitz_report(const Network& net, const Box& x);
double network_lipschitz(const Network& net, const Box& x);

// Activation image of an interval, outward-rounded (activations are
// monotone non-decreasing, so endpoints suffice).
Interval activation_image(Activation act, const Interval& y);

}  // namespace polyreach
