#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "polyreach/kernels.hpp"
#include "polyreach/nn.hpp"

using namespace polyreach;
namespace k = polyreach::kernels;

namespace {

Network random_net(std::mt19937_64& rng, std::size_t input_dim, bool include_edge_weights) {
  std::uniform_real_distribution<double> w(-1.5, 1.5);
  Network net;
  net.input_dim = input_dim;
  std::size_t prev = input_dim;
  std::size_t nlayers = 1 + rng() % 3;
  for (std::size_t s = 0; s < nlayers; ++s) {
    std::size_t rows = 1 + rng() % 7;
    Layer l;
    l.W = Matrix(rows, prev);
    for (auto& v : l.W.a) v = w(rng);
    l.b.resize(rows);
    for (auto& v : l.b) v = w(rng);
    if (include_edge_weights && rows > 1) {
      l.W(0, 0) = 0.0;  // exercise exact-zero handling
      l.b[0] = 0.0;
    }
    l.act = static_cast<Activation>(rng() % 4);
    net.layers.push_back(std::move(l));
    prev = rows;
  }
  net.validate();
  return net;
}

}  // namespace

TEST_CASE("active backend is supported") {
  CHECK(k::backend_supported(k::Backend::scalar));
  CHECK(k::backend_supported(k::active_backend()));
}

TEST_CASE("batched evaluation equals nn_eval point by point") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xs(-3.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    Network net = random_net(rng, 2, false);
    const std::size_t n = 1 + rng() % 50;
    std::vector<double> in(2 * n), out(net.output_dim() * n);
    for (auto& v : in) v = xs(rng);
    k::batch_forward(net, in.data(), n, out.data());
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<double> x = {in[p], in[n + p]};
      auto ref = nn_eval(net, x);
      for (std::size_t o = 0; o < ref.size(); ++o) CHECK(out[o * n + p] == ref[o]);
    }
  }
}

#if defined(POLYREACH_HAVE_AVX2)
TEST_CASE("scalar and avx2 backends are value-equivalent") {
  if (!k::backend_supported(k::Backend::avx2)) return;
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> xs(-4.0, 4.0);
  std::size_t mismatches = 0, total = 0;
  for (int rep = 0; rep < 60; ++rep) {
    std::size_t input_dim = 1 + rng() % 4;
    Network net = random_net(rng, input_dim, rep % 3 == 0);
    // odd batch sizes exercise the vector tail
    const std::size_t n = 1 + rng() % 103;
    std::vector<double> in(input_dim * n);
    for (auto& v : in) v = xs(rng);
    std::vector<double> a(net.output_dim() * n), b(net.output_dim() * n);
    k::batch_forward(net, in.data(), n, a.data(), k::Backend::scalar);
    k::batch_forward(net, in.data(), n, b.data(), k::Backend::avx2);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++total;
      if (!(a[i] == b[i])) ++mismatches;  // == treats -0 and +0 as equal
    }
  }
  CHECK(total > 0);
  CHECK(mismatches == 0);
}
#endif

TEST_CASE("empty batch is a no-op") {
  std::mt19937_64 rng(1);
  Network net = random_net(rng, 2, false);
  k::batch_forward(net, nullptr, 0, nullptr);
}
