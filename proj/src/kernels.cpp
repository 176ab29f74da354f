#include "ptroute/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace ptroute::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend initial_backend() {
    if (const char* env = std::getenv("PTROUTE_KERNEL")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_state() {
    static Backend b = initial_backend();
    return b;
}

}  // namespace

Backend active_backend() { return backend_state(); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::invalid_argument("avx2 backend not supported on this cpu");
    backend_state() = b;
}

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void sigmoid_eval_scalar(const SigmoidParams& p, const double* f, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = detail::sigmoid_core(p.d1, p.d2, p.d3, p.d4, f[i]);
}

double sigmoid_mse_scalar(const SigmoidParams& p, const double* f, const double* target,
                          std::size_t n) {
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = detail::sigmoid_core(p.d1, p.d2, p.d3, p.d4, f[i]) - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

void sigmoid_eval(const SigmoidParams& p, const double* f, double* out, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (backend_state() == Backend::avx2) {
        sigmoid_eval_avx2(p, f, out, n);
        return;
    }
#endif
    sigmoid_eval_scalar(p, f, out, n);
}

double sigmoid_mse(const SigmoidParams& p, const double* f, const double* target,
                   std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (backend_state() == Backend::avx2) return sigmoid_mse_avx2(p, f, target, n);
#endif
    return sigmoid_mse_scalar(p, f, target, n);
}

}  // namespace ptroute::kernels
