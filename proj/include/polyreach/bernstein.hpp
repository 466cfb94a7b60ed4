#pragma once

// Bernstein polynomial abstraction of a controller over a box: sample the
// rescaled function on the uniform grid k/d of the unit box, assemble the
// tensor-product Bernstein polynomial, and substitute the box coordinates
// back in to get a power-basis polynomial over the original domain.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polyreach/interval.hpp"
#include "polyreach/nn.hpp"
#include "polyreach/poly.hpp"

namespace polyreach {

struct DegreeVector {
  std::vector<int> d;

  DegreeVector() = default;
  explicit DegreeVector(std::vector<int> deg);  // throws unless all d_j >= 1
  std::size_t size() const { return d.size(); }
  int operator[](std::size_t j) const { return d[j]; }
};

// Batched vector-valued function R^m -> R^q. in/out are SoA with stride n,
// matching the kernels layout.
struct VectorFn {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::function<void(const double* in, std::size_t n, double* out)> eval;
};

VectorFn vector_fn(const Network& net);
VectorFn vector_fn(std::size_t in_dim,
                   std::function<double(std::span<const double>)> scalar);

// Bernstein coefficient tensor over the unit box, lexicographic index order
// (last dimension fastest).
struct BernsteinTensor {
  std::vector<int> d;
  std::vector<double> coeff;  // size prod(d_j + 1)

  std::size_t grid_size() const;
};

// Numerically stable evaluation on the unit box.
double de_casteljau(const BernsteinTensor& t, std::span<const double> x_unit);

// B_{f,d} on the unit box, expanded to the power basis. Exactly
// prod(d_j + 1) evaluations of f.
MultiPoly bernstein_unit(const std::function<double(std::span<const double>)>& f,
                         const DegreeVector& d, std::vector<std::string> vars);

struct ControllerApprox {
  Box domain;
  DegreeVector degree;
  std::vector<std::string> vars;
  struct Output {
    MultiPoly poly;            // power basis, over the original box
    BernsteinTensor tensor;    // unit-box Bernstein coefficients
  };
  std::vector<Output> outputs;
};

// P_{kappa,d} per output: rescale f to the unit box, build the Bernstein
// polynomial, substitute back. Box must be non-degenerate in every
// dimension.
ControllerApprox approx_controller(const VectorFn& f, const Box& x, const DegreeVector& d,
                                   std::vector<std::string> vars);
ControllerApprox approx_controller(const Network& net, const Box& x, const DegreeVector& d);

// Full abstraction per the output over-approximation contract: polynomials
// plus certified per-output error radii.
struct BernsteinAbstraction {
  std::vector<MultiPoly> polys;
  std::vector<double> eps;
  Box domain;
  DegreeVector degree;
};

}  // namespace polyreach
