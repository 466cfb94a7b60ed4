// AVX2/FMA variant of the batched forward kernel. Compiled with
// -mavx2 -mfma for this translation unit only; callers gate on cpuid.
//
// Per point the accumulation order matches forward_scalar exactly (bias
// seed, then FMA over j ascending), and both FMA forms round once, so the
// two backends produce equal values.

#include "polyreach/kernels.hpp"

#if defined(POLYREACH_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "polyreach/nn.hpp"

namespace polyreach {
namespace kernels {
namespace detail {

namespace {

inline void apply_activation(Activation act, double* row, std::size_t n) {
  std::size_t p = 0;
  switch (act) {
    case Activation::relu: {
      const __m256d zero = _mm256_setzero_pd();
      for (; p + 4 <= n; p += 4) {
        __m256d v = _mm256_loadu_pd(row + p);
        _mm256_storeu_pd(row + p, _mm256_max_pd(zero, v));
      }
      for (; p < n; ++p) row[p] = row[p] > 0.0 ? row[p] : 0.0;
      break;
    }
    case Activation::sigmoid:
      for (; p < n; ++p) row[p] = 1.0 / (1.0 + std::exp(-row[p]));
      break;
    case Activation::tanh:
      for (; p < n; ++p) row[p] = std::tanh(row[p]);
      break;
    case Activation::linear:
      break;
  }
}

}  // namespace

void forward_avx2(const Network& net, const double* in, std::size_t n, double* out) {
  const std::size_t w = net.max_width();
  std::vector<double> cur(w * n), nxt(w * n);
  std::memcpy(cur.data(), in, net.input_dim * n * sizeof(double));

  for (std::size_t s = 0; s < net.layers.size(); ++s) {
    const Layer& l = net.layers[s];
    double* dst = (s + 1 == net.layers.size()) ? out : nxt.data();
    const std::size_t cols = l.W.cols;
    for (std::size_t i = 0; i < l.W.rows; ++i) {
      const double* wrow = l.W.row(i);
      double* drow = dst + i * n;
      std::size_t p = 0;
      const __m256d biasv = _mm256_set1_pd(l.b[i]);
      for (; p + 4 <= n; p += 4) {
        __m256d acc = biasv;
        for (std::size_t j = 0; j < cols; ++j) {
          __m256d xv = _mm256_loadu_pd(cur.data() + j * n + p);
          acc = _mm256_fmadd_pd(_mm256_set1_pd(wrow[j]), xv, acc);
        }
        _mm256_storeu_pd(drow + p, acc);
      }
      for (; p < n; ++p) {
        double acc = l.b[i];
        for (std::size_t j = 0; j < cols; ++j) acc = std::fma(wrow[j], cur[j * n + p], acc);
        drow[p] = acc;
      }
      apply_activation(l.act, drow, n);
    }
    if (s + 1 != net.layers.size()) cur.swap(nxt);
  }
}

}  // namespace detail
}  // namespace kernels
}  // namespace polyreach

#endif  // POLYREACH_HAVE_AVX2
