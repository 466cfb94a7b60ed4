#include "polyreach/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyreach/nn.hpp"

namespace polyreach {
namespace kernels {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(POLYREACH_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend resolve_backend() {
  if (const char* env = std::getenv("POLYREACH_KERNEL")) {
    std::string s(env);
    if (s == "scalar") return Backend::scalar;
    if (s == "avx2") {
      if (backend_supported(Backend::avx2)) return Backend::avx2;
      return Backend::scalar;
    }
  }
  return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = resolve_backend();
  return b;
}

namespace detail {

void forward_scalar(const Network& net, const double* in, std::size_t n, double* out) {
  const std::size_t w = net.max_width();
  std::vector<double> cur(w * n), nxt(w * n);
  std::memcpy(cur.data(), in, net.input_dim * n * sizeof(double));

  for (std::size_t s = 0; s < net.layers.size(); ++s) {
    const Layer& l = net.layers[s];
    double* dst = (s + 1 == net.layers.size()) ? out : nxt.data();
    for (std::size_t i = 0; i < l.W.rows; ++i) {
      const double* wrow = l.W.row(i);
      const double bi = l.b[i];
      double* drow = dst + i * n;
      const std::size_t cols = l.W.cols;
      for (std::size_t p = 0; p < n; ++p) {
        double acc = bi;
        for (std::size_t j = 0; j < cols; ++j) acc = std::fma(wrow[j], cur[j * n + p], acc);
        drow[p] = acc;
      }
      switch (l.act) {
        case Activation::relu:
          for (std::size_t p = 0; p < n; ++p) drow[p] = drow[p] > 0.0 ? drow[p] : 0.0;
          break;
        case Activation::sigmoid:
          for (std::size_t p = 0; p < n; ++p) drow[p] = 1.0 / (1.0 + std::exp(-drow[p]));
          break;
        case Activation::tanh:
          for (std::size_t p = 0; p < n; ++p) drow[p] = std::tanh(drow[p]);
          break;
        case Activation::linear:
          break;
      }
    }
    if (s + 1 != net.layers.size()) cur.swap(nxt);
  }
}

}  // namespace detail

void batch_forward(const Network& net, const double* in, std::size_t n, double* out,
                   Backend backend) {
  if (n == 0) return;
  switch (backend) {
    case Backend::scalar:
      detail::forward_scalar(net, in, n, out);
      return;
    case Backend::avx2:
#if defined(POLYREACH_HAVE_AVX2)
      if (backend_supported(Backend::avx2)) {
        detail::forward_avx2(net, in, n, out);
        return;
      }
#endif
      detail::forward_scalar(net, in, n, out);
      return;
  }
  throw std::logic_error("batch_forward: unknown backend");
}

void batch_forward(const Network& net, const double* in, std::size_t n, double* out) {
  batch_forward(net, in, n, out, active_backend());
}

}  // namespace kernels
}  // namespace polyreach
