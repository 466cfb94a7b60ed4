#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "polyreach/lipschitz.hpp"

using namespace polyreach;

namespace {

Network one_layer(Matrix W, std::vector<double> b, Activation act) {
  Network net;
  net.input_dim = W.cols;
  net.layers.push_back({std::move(W), std::move(b), act});
  net.validate();
  return net;
}

Network random_net(std::mt19937_64& rng, std::size_t input_dim, double weight_scale) {
  std::uniform_real_distribution<double> w(-weight_scale, weight_scale);
  Network net;
  net.input_dim = input_dim;
  std::size_t prev = input_dim;
  std::size_t nlayers = 1 + rng() % 3;
  for (std::size_t s = 0; s < nlayers; ++s) {
    std::size_t rows = (s + 1 == nlayers) ? 1 : 2 + rng() % 8;
    Layer l;
    l.W = Matrix(rows, prev);
    for (auto& v : l.W.a) v = w(rng);
    l.b.resize(rows);
    for (auto& v : l.b) v = w(rng);
    l.act = (s + 1 == nlayers) ? Activation::linear : static_cast<Activation>(rng() % 3 + 1);
    if (s == 0 && rng() % 2) l.act = Activation::relu;
    net.layers.push_back(std::move(l));
    prev = rows;
  }
  net.validate();
  return net;
}

}  // namespace

TEST_CASE("propagate_intervals basics") {
  Matrix W(1, 1);
  W(0, 0) = 1.0;
  Network id = one_layer(W, {0.0}, Activation::linear);
  auto layers = propagate_intervals(id, Box{Interval(0, 1)});
  REQUIRE(layers.size() == 1);
  CHECK(layers[0].pre_activation[0].lo == 0.0);
  CHECK(layers[0].pre_activation[0].hi == 1.0);
  CHECK(layers[0].post_activation[0].lo == 0.0);
  CHECK(layers[0].post_activation[0].hi == 1.0);

  Network relu = one_layer(W, {0.0}, Activation::relu);
  auto rl = propagate_intervals(relu, Box{Interval(-2, -1)});
  CHECK(rl[0].post_activation[0].lo == 0.0);
  CHECK(rl[0].post_activation[0].hi == 0.0);

  Network sig = one_layer(W, {0.0}, Activation::sigmoid);
  auto sl = propagate_intervals(sig, Box{Interval(0, 0)});
  CHECK(sl[0].post_activation[0].contains(0.5));
  CHECK(sl[0].post_activation[0].width() <= 1e-14);
}

TEST_CASE("propagate_intervals soundness on random networks") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> xs(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Network net = random_net(rng, 2, 1.0);
    Box box{Interval(-0.5, 0.75), Interval(0.1, 0.9)};
    auto layers = propagate_intervals(net, box);
    for (int s = 0; s < 50; ++s) {
      std::vector<double> x = {box[0].lo + (box[0].width()) * (xs(rng) * 0.5 + 0.5),
                               box[1].lo + (box[1].width()) * (xs(rng) * 0.5 + 0.5)};
      std::vector<double> cur = x;
      for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& l = net.layers[li];
        std::vector<double> pre(l.W.rows);
        for (std::size_t i = 0; i < l.W.rows; ++i) {
          double acc = l.b[i];
          for (std::size_t j = 0; j < l.W.cols; ++j) acc += l.W(i, j) * cur[j];
          pre[i] = acc;
          CHECK(layers[li].pre_activation[i].contains(acc));
        }
        cur.resize(l.W.rows);
        for (std::size_t i = 0; i < l.W.rows; ++i) {
          cur[i] = activation_apply(l.act, pre[i]);
          CHECK(layers[li].post_activation[i].contains(cur[i]));
        }
      }
    }
  }
}

TEST_CASE("matrix_opnorm_ub reference values") {
  Matrix I(3, 3);
  for (int i = 0; i < 3; ++i) I(i, i) = 1.0;
  double ni = matrix_opnorm_ub(I);
  CHECK(ni >= 1.0);
  CHECK(ni <= 1.0 + 1e-9);

  Matrix D(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 2.0;
  double nd = matrix_opnorm_ub(D);
  CHECK(nd >= 3.0);
  CHECK(nd <= 3.0 + 1e-9);

  Matrix O(2, 2);
  O(0, 0) = O(0, 1) = O(1, 0) = O(1, 1) = 1.0;
  // brute-force oracle: largest singular value of [[1,1],[1,1]] via the
  // closed-form eigenvalues of W^T W = [[2,2],[2,2]] -> {0, 4}
  double oracle = std::sqrt(4.0);
  double no = matrix_opnorm_ub(O);
  CHECK(no >= oracle);
  CHECK(no <= oracle + 1e-9);
}

TEST_CASE("opnorm upper-bounds sampled operator ratios") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    Matrix W(r, c);
    for (auto& v : W.a) v = w(rng);
    double ub = matrix_opnorm_ub(W);
    for (int s = 0; s < 200; ++s) {
      std::vector<double> x(c);
      double nx = 0.0;
      for (auto& v : x) {
        v = w(rng);
        nx += v * v;
      }
      nx = std::sqrt(nx);
      if (nx == 0.0) continue;
      double ny = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += W(i, j) * x[j];
        ny += acc * acc;
      }
      ny = std::sqrt(ny);
      CHECK(ny <= ub * nx * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("layer_lipschitz per-activation formulas") {
  Matrix W(1, 1);
  W(0, 0) = 2.0;

  // sigmoid with 0 inside the pre-activation box: 1/4 ||W||
  double ls = layer_lipschitz(Activation::sigmoid, W, Box{Interval(-1, 1)});
  CHECK(ls == doctest::Approx(0.25 * 2.0).epsilon(1e-12));

  // relu with all pre-activation upper bounds <= 0: dead layer
  CHECK(layer_lipschitz(Activation::relu, W, Box{Interval(-3, 0)}) == 0.0);

  // tanh on [1,2] with W = [[1]]: 1 - tanh(1)^2
  Matrix W1(1, 1);
  W1(0, 0) = 1.0;
  double lt = layer_lipschitz(Activation::tanh, W1, Box{Interval(1, 2)});
  double expect = 1.0 - std::tanh(1.0) * std::tanh(1.0);
  CHECK(lt == doctest::Approx(expect).epsilon(1e-9));
  CHECK(lt >= expect);
}

TEST_CASE("network_lipschitz basics") {
  Matrix W(1, 1);
  W(0, 0) = 1.0;
  Network id = one_layer(W, {0.0}, Activation::linear);
  double L = network_lipschitz(id, Box{Interval(-1, 1)});
  CHECK(L >= 1.0);
  CHECK(L <= 1.0 + 1e-9);

  // two stacked linear layers: product of the norms
  Network two;
  two.input_dim = 1;
  Matrix W1(1, 1), W2(1, 1);
  W1(0, 0) = 3.0;
  W2(0, 0) = -0.5;
  two.layers.push_back({W1, {0.0}, Activation::linear});
  two.layers.push_back({W2, {0.0}, Activation::linear});
  two.validate();
  double L2 = network_lipschitz(two, Box{Interval(0, 1)});
  CHECK(L2 >= 1.5);
  CHECK(L2 <= 1.5 + 1e-9);

  // dead relu layer kills the whole product
  Network dead;
  dead.input_dim = 1;
  dead.layers.push_back({W1, {-10.0}, Activation::relu});  // pre = [-10,-7] < 0
  dead.layers.push_back({W2, {0.0}, Activation::linear});
  dead.validate();
  CHECK(network_lipschitz(dead, Box{Interval(0, 1)}) == 0.0);
}

TEST_CASE("empirical Lipschitz soundness") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> xs(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Network net = random_net(rng, 2, 1.2);
    Box box{Interval(-0.4, 0.6), Interval(0.2, 1.1)};
    double L = network_lipschitz(net, box);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> x = {box[0].lo + box[0].width() * xs(rng),
                               box[1].lo + box[1].width() * xs(rng)};
      std::vector<double> y = {box[0].lo + box[0].width() * xs(rng),
                               box[1].lo + box[1].width() * xs(rng)};
      auto fx = nn_eval(net, x), fy = nn_eval(net, y);
      double dx = std::hypot(x[0] - y[0], x[1] - y[1]);
      double df = 0.0;
      for (std::size_t o = 0; o < fx.size(); ++o) df += (fx[o] - fy[o]) * (fx[o] - fy[o]);
      df = std::sqrt(df);
      CHECK(df <= L * dx * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("refined bounds never exceed the global per-layer bounds") {
  std::mt19937_64 rng(909);
  for (int rep = 0; rep < 20; ++rep) {
    Network net = random_net(rng, 2, 1.5);
    Box box{Interval(-0.3, 0.4), Interval(-0.2, 0.5)};
    auto layers = propagate_intervals(net, box);
    for (std::size_t s = 0; s < net.layers.size(); ++s) {
      const Layer& l = net.layers[s];
      double refined = layer_lipschitz(l.act, l.W, layers[s].pre_activation);
      double norm = matrix_opnorm_ub(l.W);
      double global = l.act == Activation::sigmoid ? 0.25 * norm : norm;
      CHECK(refined <= global * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("shrinking the box never increases the constant") {
  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> xs(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Network net = random_net(rng, 2, 1.5);
    Box big{Interval(-0.5, 0.7), Interval(-0.6, 0.8)};
    double a0 = big[0].lo + big[0].width() * 0.25 * xs(rng);
    double b0 = big[0].hi - big[0].width() * 0.25 * xs(rng);
    double a1 = big[1].lo + big[1].width() * 0.25 * xs(rng);
    double b1 = big[1].hi - big[1].width() * 0.25 * xs(rng);
    Box small{Interval(a0, b0), Interval(a1, b1)};
    double Lbig = network_lipschitz(net, big);
    double Lsmall = network_lipschitz(net, small);
    CHECK(Lsmall <= Lbig + 1e-12);
  }
}
