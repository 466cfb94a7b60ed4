#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyreach/bernstein.hpp"

using namespace polyreach;

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kXY = {"x1", "x2"};

double coeff_of(const MultiPoly& p, const ExpVec& e) {
  auto it = p.terms.find(e);
  return it == p.terms.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("bernstein_unit reproduces constants, lines, and the x^2 example") {
  auto c = bernstein_unit([](std::span<const double>) { return 4.5; }, DegreeVector({3, 2}), kXY);
  CHECK(coeff_of(c, {0, 0}) == doctest::Approx(4.5).epsilon(1e-12));
  for (const auto& [e, v] : c.terms)
    if (e != ExpVec{0, 0}) CHECK(std::fabs(v) <= 1e-12);

  auto line = bernstein_unit([](std::span<const double> x) { return x[0]; }, DegreeVector({1}), kX);
  CHECK(coeff_of(line, {1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(coeff_of(line, {0})) <= 1e-12);

  auto sq = bernstein_unit([](std::span<const double> x) { return x[0] * x[0]; },
                           DegreeVector({2}), kX);
  // samples f(0)=0, f(1/2)=1/4, f(1)=1 give B = 0.5 x + 0.5 x^2
  CHECK(coeff_of(sq, {1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coeff_of(sq, {2}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::fabs(coeff_of(sq, {0})) <= 1e-12);
}

TEST_CASE("de Casteljau evaluation") {
  BernsteinTensor constant{{2}, {3.25, 3.25, 3.25}};
  CHECK(de_casteljau(constant, std::vector<double>{0.37}) == doctest::Approx(3.25).epsilon(1e-15));

  BernsteinTensor lin{{1}, {2.0, 5.0}};
  CHECK(de_casteljau(lin, std::vector<double>{0.25}) == doctest::Approx(2.75).epsilon(1e-15));

  BernsteinTensor sq{{2}, {0.0, 0.25, 1.0}};
  CHECK(de_casteljau(sq, std::vector<double>{0.5}) == doctest::Approx(0.375).epsilon(1e-15));

  CHECK_THROWS(de_casteljau(sq, std::vector<double>{1.5}));
}

TEST_CASE("approx_controller reproduces affine networks exactly") {
  // kappa(x) = 2x + 1 on [0,4], d = 1
  Network net;
  net.input_dim = 1;
  Matrix W(1, 1);
  W(0, 0) = 2.0;
  net.layers.push_back({W, {1.0}, Activation::linear});
  net.validate();

  auto approx = approx_controller(net, Box{Interval(0, 4)}, DegreeVector({1}));
  REQUIRE(approx.outputs.size() == 1);
  const MultiPoly& p = approx.outputs[0].poly;
  CHECK(coeff_of(p, {1}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(coeff_of(p, {0}) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS(approx_controller(net, Box{Interval(2, 2)}, DegreeVector({1})));
}

TEST_CASE("approx_controller on a constant function") {
  VectorFn f = vector_fn(2, [](std::span<const double>) { return -0.75; });
  auto approx = approx_controller(f, Box{Interval(-1, 3), Interval(0, 2)}, DegreeVector({2, 2}), kXY);
  const MultiPoly& p = approx.outputs[0].poly;
  CHECK(coeff_of(p, {0, 0}) == doctest::Approx(-0.75).epsilon(1e-12));
  for (const auto& [e, v] : p.terms)
    if (e != ExpVec{0, 0}) CHECK(std::fabs(v) <= 1e-10);
}

TEST_CASE("x^2 on [0,2] with d=2 composes back to x + x^2/2") {
  VectorFn f = vector_fn(1, [](std::span<const double> x) { return x[0] * x[0]; });
  auto approx = approx_controller(f, Box{Interval(0, 2)}, DegreeVector({2}), kX);
  const MultiPoly& p = approx.outputs[0].poly;
  CHECK(coeff_of(p, {1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(coeff_of(p, {2}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::fabs(coeff_of(p, {0})) <= 1e-12);
}

TEST_CASE("vertex interpolation on the unit box") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int rep = 0; rep < 10; ++rep) {
    double a = w(rng), b = w(rng), c = w(rng), d = w(rng);
    auto f = [&](std::span<const double> x) {
      return a + b * std::sin(3 * x[0]) + c * x[1] * x[1] + d * x[0] * x[1];
    };
    MultiPoly p = bernstein_unit(f, DegreeVector({3, 2}), kXY);
    for (double x0 : {0.0, 1.0})
      for (double x1 : {0.0, 1.0}) {
        std::vector<double> v = {x0, x1};
        CHECK(poly_eval(p, v) == doctest::Approx(f(v)).epsilon(1e-9));
      }
  }
}

TEST_CASE("affine reproduction for random affine functions and degrees") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    double a = w(rng), b = w(rng), c = w(rng);
    DegreeVector d({1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5)});
    MultiPoly p = bernstein_unit(
        [&](std::span<const double> x) { return a + b * x[0] + c * x[1]; }, d, kXY);
    CHECK(coeff_of(p, {0, 0}) == doctest::Approx(a).epsilon(1e-9));
    CHECK(coeff_of(p, {1, 0}) == doctest::Approx(b).epsilon(1e-9));
    CHECK(coeff_of(p, {0, 1}) == doctest::Approx(c).epsilon(1e-9));
    for (const auto& [e, v] : p.terms) {
      unsigned deg = 0;
      for (auto q : e) deg += q;
      if (deg > 1) CHECK(std::fabs(v) <= 1e-9);
    }
  }
}

TEST_CASE("coefficient tensor bounds the polynomial range on the unit box") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> xu(0.0, 1.0);
  VectorFn f = vector_fn(2, [](std::span<const double> x) {
    return std::sin(2.0 * x[0]) * (1.0 + 0.5 * x[1]);
  });
  auto approx = approx_controller(f, Box{Interval(0, 1), Interval(0, 1)}, DegreeVector({4, 3}), kXY);
  const auto& tensor = approx.outputs[0].tensor;
  double cmin = tensor.coeff[0], cmax = tensor.coeff[0];
  for (double c : tensor.coeff) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  for (int s = 0; s < 1000; ++s) {
    std::vector<double> x = {xu(rng), xu(rng)};
    double v = poly_eval(approx.outputs[0].poly, x);
    CHECK(v >= cmin - 1e-9);
    CHECK(v <= cmax + 1e-9);
  }
}

TEST_CASE("power basis and de Casteljau agree within conversion slack") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> xu(0.0, 1.0);
  std::uniform_real_distribution<double> w(-1.5, 1.5);
  for (int rep = 0; rep < 5; ++rep) {
    double a = w(rng), b = w(rng);
    VectorFn f = vector_fn(2, [a, b](std::span<const double> x) {
      return std::tanh(a * x[0] + b * x[1]) + 0.3 * x[0] * x[1];
    });
    Box box{Interval(-0.5, 1.5), Interval(0.0, 0.7)};
    auto approx = approx_controller(f, box, DegreeVector({4, 4}), kXY);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> u = {xu(rng), xu(rng)};
      std::vector<double> x = {box[0].lo + box[0].width() * u[0],
                               box[1].lo + box[1].width() * u[1]};
      double pb = poly_eval(approx.outputs[0].poly, x);
      double dc = de_casteljau(approx.outputs[0].tensor, u);
      worst = std::max(worst, std::fabs(pb - dc));
    }
    CHECK(worst <= 1e-7);
  }
}
