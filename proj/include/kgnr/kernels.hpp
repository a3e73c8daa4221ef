#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops shared by the spectral layer and the integrators:
// elementwise complex arithmetic and weighted reductions over contiguous
// arrays. A scalar reference implementation always exists; on x86-64 an AVX2
// variant is selected at runtime. The two are equivalence-tested against each
// other (elementwise ops bit-exact, reductions to a small relative tolerance
// since vector accumulation reassociates sums).

namespace kgnr::kernels {

using cplx = std::complex<double>;

struct Backend {
    const char* name;

    // dst[i] = a[i] * b[i]
    void (*cmul)(cplx* dst, const cplx* a, const cplx* b, std::size_t n);
    // dst[i] = s * a[i]
    void (*cscale)(cplx* dst, const cplx* a, cplx s, std::size_t n);
    // dst[i] = alpha*a[i] + beta*b[i]
    void (*caxpby)(cplx* dst, cplx alpha, const cplx* a, cplx beta, const cplx* b, std::size_t n);
    // dst[i] = |a[i]|^2
    void (*abs2)(double* dst, const cplx* a, std::size_t n);
    // dst[i] = r[i] * a[i]   (real gain per element)
    void (*rmul)(cplx* dst, const cplx* a, const double* r, std::size_t n);
    // sum_i w[i] * |a[i]|^2
    double (*weighted_abs2_sum)(const double* w, const cplx* a, std::size_t n);
    // sum_i a[i]
    cplx (*csum)(const cplx* a, std::size_t n);
};

const Backend& scalar_backend();

// Null when this build has no AVX2 variant or the CPU lacks AVX2+FMA.
const Backend* avx2_backend_if_available();

// The backend used by the library. Honors KGNR_SIMD=scalar|avx2 (set before
// first use); otherwise picks the best variant the CPU supports.
const Backend& active();

}  // namespace kgnr::kernels
