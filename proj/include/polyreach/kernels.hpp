#pragma once

// Batched feed-forward kernels: evaluate a network at many points at once.
// These back the sampling-heavy paths (Bernstein grid construction, error
// center sweeps, soundness fuzzing).
//
// Layout is structure-of-arrays: in[j*n + p] holds coordinate j of point p,
// out[o*n + p] output o of point p.
//
// Backends must be value-equivalent: the AVX2 variant performs the exact
// per-point operation sequence of the scalar reference (single-rounding FMA
// accumulation in the same index order), so results compare equal with ==.
// Selection happens once at runtime from cpuid; POLYREACH_KERNEL=scalar|avx2
// overrides.

#include <cstddef>

namespace polyreach {

struct Network;

namespace kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();

void batch_forward(const Network& net, const double* in, std::size_t n, double* out);
void batch_forward(const Network& net, const double* in, std::size_t n, double* out,
                   Backend backend);

namespace detail {
void forward_scalar(const Network& net, const double* in, std::size_t n, double* out);
#if defined(POLYREACH_HAVE_AVX2)
void forward_avx2(const Network& net, const double* in, std::size_t n, double* out);
#endif
}  // namespace detail

}  // namespace kernels
}  // namespace polyreach
