#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyreach/error_bounds.hpp"
#include "polyreach/lipschitz.hpp"

using namespace polyreach;

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kXY = {"x1", "x2"};

// the worked running example: kappa(x) = x^2 on [0,1], d = 2, exact
// Bernstein polynomial 0.5 x + 0.5 x^2
struct SquareCase {
  VectorFn f;
  ControllerApprox approx;
  SquareCase() {
    f = vector_fn(1, [](std::span<const double> x) { return x[0] * x[0]; });
    approx = approx_controller(f, Box{Interval(0, 1)}, DegreeVector({2}), kX);
  }
};

}  // namespace

TEST_CASE("t_error hand evaluations") {
  CHECK(t_error(0.0, DegreeVector({3, 3}), Box{Interval(0, 1), Interval(0, 1)}) == 0.0);

  double e1 = t_error(1.0, DegreeVector({3, 3}), Box{Interval(0, 1), Interval(0, 1)});
  CHECK(std::fabs(e1 - 0.5 * std::sqrt(2.0 / 3.0)) <= 1e-9);
  CHECK(e1 == doctest::Approx(0.408248290463863).epsilon(1e-9));

  double e2 = t_error(2.0, DegreeVector({4, 4}), Box{Interval(0, 2), Interval(0, 1)});
  CHECK(std::fabs(e2 - std::sqrt(0.5) * 2.0) <= 1e-9);
  CHECK(e2 == doctest::Approx(1.414213562373095).epsilon(1e-9));
}

TEST_CASE("adaptive_partition meets the requested precision") {
  auto p0 = adaptive_partition(Box{Interval(0, 1), Interval(0, 1)}, 0.0, 0.5);
  CHECK(p0 == std::vector<int>{1, 1});
  CHECK(sampling_precision(Box{Interval(0, 1), Interval(0, 1)}, 0.0, p0) == 0.0);

  auto p1 = adaptive_partition(Box{Interval(0, 1), Interval(0, 1)}, 1.0, 0.5);
  CHECK(p1 == std::vector<int>{3, 3});
  double d1 = sampling_precision(Box{Interval(0, 1), Interval(0, 1)}, 1.0, p1);
  CHECK(d1 == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-12));
  CHECK(d1 <= 0.5);

  auto p2 = adaptive_partition(Box{Interval(0, 1)}, 10.0, 0.1);
  CHECK(p2 == std::vector<int>{100});
  CHECK(sampling_precision(Box{Interval(0, 1)}, 10.0, p2) <= 0.1 + 1e-15);

  CHECK_THROWS(adaptive_partition(Box{Interval(0, 1)}, 1.0, 0.0));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> L(0.0, 20.0), w(0.1, 3.0), db(0.001, 0.5);
  for (int rep = 0; rep < 200; ++rep) {
    Box b{Interval(0, w(rng)), Interval(0, w(rng))};
    double lip = L(rng), bar = db(rng);
    auto p = adaptive_partition(b, lip, bar);
    CHECK(sampling_precision(b, lip, p) <= bar * (1.0 + 1e-12));
  }
}

TEST_CASE("s_error on exactly reproduced functions") {
  // affine function, exact Bernstein reproduction: deviations vanish
  VectorFn aff = vector_fn(1, [](std::span<const double> x) { return 3.0 * x[0] - 1.0; });
  auto approx = approx_controller(aff, Box{Interval(0, 1)}, DegreeVector({1}), kX);
  auto se = s_error(aff, 0, approx.outputs[0].poly, &approx.outputs[0].tensor,
                    Box{Interval(0, 1)}, 3.0, 0.05);
  CHECK(se.eps_s == doctest::Approx(se.delta_p).epsilon(1e-9));
  CHECK(se.delta_p <= 0.05);

  // constant function with L = 0: zero error outright
  VectorFn cst = vector_fn(1, [](std::span<const double>) { return 2.5; });
  auto capprox = approx_controller(cst, Box{Interval(0, 1)}, DegreeVector({2}), kX);
  auto cse = s_error(cst, 0, capprox.outputs[0].poly, &capprox.outputs[0].tensor,
                     Box{Interval(0, 1)}, 0.0, 0.05);
  CHECK(cse.eps_s <= 1e-12);
}

TEST_CASE("s_error on the x^2 example approaches the exact error") {
  SquareCase sc;
  auto se = s_error(sc.f, 0, sc.approx.outputs[0].poly, &sc.approx.outputs[0].tensor,
                    Box{Interval(0, 1)}, 2.0, 0.05);
  // max |0.5x - 0.5x^2| = 1/8 at x = 1/2
  CHECK(se.eps_s >= 0.125);
  CHECK(se.eps_s <= 0.125 + se.delta_p + 1e-9);
  CHECK(se.delta_p <= 0.05);
}

TEST_CASE("s_error equals the max of per-cell bounds") {
  SquareCase sc;
  const Box domain{Interval(0, 1)};
  const double L = 2.0, delta_bar = 0.07;
  auto se = s_error(sc.f, 0, sc.approx.outputs[0].poly, &sc.approx.outputs[0].tensor, domain, L,
                    delta_bar);
  auto cells = box_partition(domain, se.p);
  REQUIRE(cells.size() == se.samples);
  double worst = 0.0;
  for (const auto& cell : cells) {
    auto c = box_center(cell);
    double dev = std::fabs(poly_eval(sc.approx.outputs[0].poly, c) - c[0] * c[0]);
    worst = std::max(worst, se.delta_p + dev);
  }
  CHECK(se.eps_s == doctest::Approx(worst).epsilon(1e-9));
}

TEST_CASE("convergence envelope against a brute-forced exact error") {
  SquareCase sc;
  // dense scan oracle for the exact error
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    double x = i / 100000.0;
    best = std::max(best, std::fabs((0.5 * x + 0.5 * x * x) - x * x));
  }
  CHECK(best == doctest::Approx(0.125).epsilon(1e-6));
  for (double db : {0.1, 0.01, 0.001}) {
    auto se = s_error(sc.f, 0, sc.approx.outputs[0].poly, &sc.approx.outputs[0].tensor,
                      Box{Interval(0, 1)}, 2.0, db);
    CHECK(se.delta_p <= db * (1.0 + 1e-12));
    CHECK(se.eps_s >= best - 1e-9);
    CHECK(se.eps_s <= best + 2.0 * se.delta_p + 1e-9);
  }
}

TEST_CASE("certify on a constant controller gives zero error") {
  Network net;
  net.input_dim = 2;
  net.layers.push_back({Matrix(1, 2), {0.75}, Activation::linear});
  net.validate();
  auto approx = approx_controller(net, Box{Interval(0, 1), Interval(0, 1)}, DegreeVector({2, 2}));
  auto rep = certify(net, approx, 0.01);
  REQUIRE(rep.eps_used.size() == 1);
  CHECK(rep.eps_used[0] <= 1e-12);
  CHECK(rep.L == 0.0);
}

TEST_CASE("certify takes the better of the two bounds") {
  SquareCase sc;
  auto rep = certify_fn(sc.f, sc.approx, 2.0, 0.01);
  REQUIRE(rep.eps_used.size() == 1);
  // T-error: (2/2) * sqrt(1/2)^... for d=(2), m=1: 1 * sqrt(1/2) * 1
  CHECK(rep.eps_t[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(rep.eps_s[0] <= 0.14);
  CHECK(rep.eps_used[0] <= rep.eps_t[0] + rep.conv_slack[0]);
  // S-error wins by ~7x: around 0.125 + delta(p), far below the T-error of ~0.707
  CHECK(rep.eps_used[0] >= 0.125);
  CHECK(rep.eps_used[0] <= 0.125 + rep.delta_p + 1e-9);
  CHECK(rep.eps_used[0] < 0.15);
}

TEST_CASE("certified bound is sound on random small networks") {
  std::mt19937_64 rng(616);
  std::uniform_real_distribution<double> w(-0.8, 0.8), xs(0.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    Network net;
    net.input_dim = 2;
    std::size_t prev = 2;
    for (int s = 0; s < 2; ++s) {
      std::size_t rows = s == 1 ? 1 : 6;
      Layer l;
      l.W = Matrix(rows, prev);
      for (auto& v : l.W.a) v = w(rng);
      l.b.resize(rows);
      for (auto& v : l.b) v = w(rng);
      l.act = s == 1 ? Activation::linear : (rep % 2 ? Activation::tanh : Activation::sigmoid);
      net.layers.push_back(std::move(l));
      prev = rows;
    }
    net.validate();
    Box box{Interval(-0.5, 0.5), Interval(0.0, 0.8)};
    auto approx = approx_controller(net, box, DegreeVector({3, 3}));
    auto report = certify(net, approx, 0.02);
    double eps = report.eps_used[0];
    for (int s = 0; s < 20000; ++s) {
      std::vector<double> x = {box[0].lo + box[0].width() * xs(rng),
                               box[1].lo + box[1].width() * xs(rng)};
      double kv = nn_eval(net, x)[0];
      double pv = poly_eval(approx.outputs[0].poly, x);
      CHECK(std::fabs(kv - pv) <= eps);
    }
  }
}
