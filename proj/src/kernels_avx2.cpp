// AVX2+FMA variants of the elementwise kernels. Complex arrays are interleaved
// (re,im) doubles, two complex values per 256-bit vector. This translation
// unit is compiled with -mavx2 -mfma on x86-64; the dispatcher only hands out
// these entry points after a runtime CPU check.

#include "kgnr/kernels.hpp"

#if defined(KGNR_HAVE_AVX2)

#include <immintrin.h>

namespace kgnr::kernels {
namespace {

// [a0 b0 a1 b1] * [c0 d0 c1 d1] as two packed complex products.
inline __m256d cmul_pd(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline __m256d broadcast_cplx(cplx s) {
    return _mm256_set_pd(s.imag(), s.real(), s.imag(), s.real());
}

void cmul_avx2(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    std::size_t i = 0;
    auto* d = reinterpret_cast<double*>(dst);
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        _mm256_storeu_pd(d + 2 * i, cmul_pd(va, vb));
    }
    for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void cscale_avx2(cplx* dst, const cplx* a, cplx s, std::size_t n) {
    const __m256d vs = broadcast_cplx(s);
    std::size_t i = 0;
    auto* d = reinterpret_cast<double*>(dst);
    const auto* pa = reinterpret_cast<const double*>(a);
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        _mm256_storeu_pd(d + 2 * i, cmul_pd(va, vs));
    }
    for (; i < n; ++i) dst[i] = s * a[i];
}

void caxpby_avx2(cplx* dst, cplx alpha, const cplx* a, cplx beta, const cplx* b, std::size_t n) {
    const __m256d val = broadcast_cplx(alpha);
    const __m256d vbe = broadcast_cplx(beta);
    std::size_t i = 0;
    auto* d = reinterpret_cast<double*>(dst);
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        _mm256_storeu_pd(d + 2 * i, _mm256_add_pd(cmul_pd(va, val), cmul_pd(vb, vbe)));
    }
    for (; i < n; ++i) dst[i] = alpha * a[i] + beta * b[i];
}

// |.|^2 of 4 complex values -> one ordered 4-vector [|a0|^2 .. |a3|^2].
inline __m256d abs2x4(__m256d v0, __m256d v1) {
    const __m256d m0 = _mm256_mul_pd(v0, v0);
    const __m256d m1 = _mm256_mul_pd(v1, v1);
    const __m256d h = _mm256_hadd_pd(m0, m1);  // [a0, a2, a1, a3]
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

void abs2_avx2(double* dst, const cplx* a, std::size_t n) {
    std::size_t i = 0;
    const auto* pa = reinterpret_cast<const double*>(a);
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
        _mm256_storeu_pd(dst + i, abs2x4(v0, v1));
    }
    for (; i < n; ++i) {
        const double re = a[i].real(), im = a[i].imag();
        dst[i] = re * re + im * im;
    }
}

void rmul_avx2(cplx* dst, const cplx* a, const double* r, std::size_t n) {
    std::size_t i = 0;
    auto* d = reinterpret_cast<double*>(dst);
    const auto* pa = reinterpret_cast<const double*>(a);
    for (; i + 2 <= n; i += 2) {
        const __m128d rp = _mm_loadu_pd(r + i);
        const __m256d rv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(rp), 0x50);  // [r0 r0 r1 r1]
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(rv, va));
    }
    for (; i < n; ++i) dst[i] = r[i] * a[i];
}

inline double hsum_pd(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_abs2_sum_avx2(const double* w, const cplx* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const auto* pa = reinterpret_cast<const double*>(a);
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), abs2x4(v0, v1), acc);
    }
    double total = hsum_pd(acc);
    for (; i < n; ++i) {
        const double re = a[i].real(), im = a[i].imag();
        total += w[i] * (re * re + im * im);
    }
    return total;
}

cplx csum_avx2(const cplx* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    const auto* pa = reinterpret_cast<const double*>(a);
    for (; i + 2 <= n; i += 2) acc = _mm256_add_pd(acc, _mm256_loadu_pd(pa + 2 * i));
    const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double re = _mm_cvtsd_f64(pair);
    double im = _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
    for (; i < n; ++i) {
        re += a[i].real();
        im += a[i].imag();
    }
    return {re, im};
}

}  // namespace

const Backend* avx2_backend_if_available() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Backend backend{
        "avx2",         cmul_avx2, cscale_avx2,
        caxpby_avx2,    abs2_avx2, rmul_avx2,
        weighted_abs2_sum_avx2, csum_avx2,
    };
    return &backend;
}

}  // namespace kgnr::kernels

#else  // no AVX2 variant in this build

namespace kgnr::kernels {
const Backend* avx2_backend_if_available() { return nullptr; }
}  // namespace kgnr::kernels

#endif
