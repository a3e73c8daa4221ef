#include "kgnr/kernels.hpp"

namespace kgnr::kernels {
namespace {

void cmul_scalar(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void cscale_scalar(cplx* dst, const cplx* a, cplx s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = s * a[i];
}

void caxpby_scalar(cplx* dst, cplx alpha, const cplx* a, cplx beta, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = alpha * a[i] + beta * b[i];
}

void abs2_scalar(double* dst, const cplx* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = a[i].real(), im = a[i].imag();
        dst[i] = re * re + im * im;
    }
}

void rmul_scalar(cplx* dst, const cplx* a, const double* r, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = r[i] * a[i];
}

double weighted_abs2_sum_scalar(const double* w, const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double re = a[i].real(), im = a[i].imag();
        acc += w[i] * (re * re + im * im);
    }
    return acc;
}

cplx csum_scalar(const cplx* a, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real();
        im += a[i].imag();
    }
    return {re, im};
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",         cmul_scalar, cscale_scalar,
        caxpby_scalar,    abs2_scalar, rmul_scalar,
        weighted_abs2_sum_scalar, csum_scalar,
    };
    return backend;
}

}  // namespace kgnr::kernels
