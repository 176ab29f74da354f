#pragma once

#include <cstddef>
#include <string>

#include "ptroute/sigmoid.hpp"

namespace ptroute::kernels {

enum class Backend { scalar, avx2 };

/// Backend picked at startup: AVX2 when the CPU supports it, overridable via
/// PTROUTE_KERNEL=scalar|avx2.
Backend active_backend();
void set_backend(Backend b);
bool avx2_supported();
std::string backend_name(Backend b);

/// out[i] = sigma(f[i]) for the active backend. Matches the scalar
/// reference bit-for-bit in the saturated regime and to ~1 ulp elsewhere.
void sigmoid_eval(const SigmoidParams& p, const double* f, double* out, std::size_t n);

/// Mean of (sigma(f[i]) - target[i])^2 — the discretized Phi objective.
double sigmoid_mse(const SigmoidParams& p, const double* f, const double* target, std::size_t n);

// Reference implementations, kept callable for equivalence tests.
void sigmoid_eval_scalar(const SigmoidParams& p, const double* f, double* out, std::size_t n);
double sigmoid_mse_scalar(const SigmoidParams& p, const double* f, const double* target,
                          std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
void sigmoid_eval_avx2(const SigmoidParams& p, const double* f, double* out, std::size_t n);
double sigmoid_mse_avx2(const SigmoidParams& p, const double* f, const double* target,
                        std::size_t n);
#endif

}  // namespace ptroute::kernels
