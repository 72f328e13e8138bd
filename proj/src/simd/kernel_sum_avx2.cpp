// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "npseg/simd/kernel_sum.hpp"

namespace npseg::simd {
namespace {

// exp(x) for x <= 0, four lanes. Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2,
// degree-13 Taylor polynomial (truncation < 1e-17 relative), and a two-step 2^n scale
// so results stay correct through the subnormal range.
inline __m256d exp_nonpositive(__m256d x) noexcept {
    const __m256d lo = _mm256_set1_pd(-746.0);
    x = _mm256_max_pd(x, lo);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // 1/k! for k = 13 .. 0
    static constexpr double c[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
        1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
        1.0,                1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int k = 1; k < 14; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));

    const __m256i n64 = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    // n1 = ceil(n / 2), n2 = n - n1; both stay >= -538, so 2^n1 and 2^n2 are normal.
    const __m256i n1 = _mm256_sub_epi64(_mm256_setzero_si256(),
                                        _mm256_srli_epi64(_mm256_sub_epi64(_mm256_setzero_si256(), n64), 1));
    const __m256i n2 = _mm256_sub_epi64(n64, n1);
    const __m256i bias = _mm256_set1_epi64x(1023);
    const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(n1, bias), 52));
    const __m256d s2 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(n2, bias), 52));
    return _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);
}

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double kernel_sum_avx2(const KernelSumArgs& args, const double* target) noexcept {
    const std::size_t n = args.count;
    const std::size_t n4 = n & ~std::size_t{3};
    __m256d acc = _mm256_setzero_pd();

    if (args.kind == KernelKind::Gaussian) {
        const __m256d minus_half = _mm256_set1_pd(-0.5);
        for (std::size_t i = 0; i < n4; i += 4) {
            __m256d s = _mm256_setzero_pd();
            for (int j = 0; j < args.dims; ++j) {
                const __m256d p = _mm256_loadu_pd(args.coords + j * n + i);
                const __m256d u = _mm256_div_pd(_mm256_sub_pd(_mm256_set1_pd(target[j]), p),
                                                _mm256_set1_pd(args.bandwidth[j]));
                s = _mm256_fmadd_pd(u, u, s);
            }
            const __m256d e = exp_nonpositive(_mm256_mul_pd(minus_half, s));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(args.weights + i), e, acc);
        }
    } else {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        const __m256d one = _mm256_set1_pd(1.0);
        for (std::size_t i = 0; i < n4; i += 4) {
            __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
            for (int j = 0; j < args.dims; ++j) {
                const __m256d p = _mm256_loadu_pd(args.coords + j * n + i);
                const __m256d u = _mm256_div_pd(_mm256_sub_pd(_mm256_set1_pd(target[j]), p),
                                                _mm256_set1_pd(args.bandwidth[j]));
                inside = _mm256_and_pd(inside, _mm256_cmp_pd(_mm256_and_pd(u, abs_mask), one, _CMP_LT_OQ));
            }
            acc = _mm256_add_pd(acc, _mm256_and_pd(inside, _mm256_loadu_pd(args.weights + i)));
        }
    }

    double total = hsum(acc);
    for (std::size_t i = n4; i < n; ++i) {
        if (args.kind == KernelKind::Gaussian) {
            double s = 0.0;
            for (int j = 0; j < args.dims; ++j) {
                const double u = (target[j] - args.coords[j * n + i]) / args.bandwidth[j];
                s += u * u;
            }
            total += args.weights[i] * std::exp(-0.5 * s);
        } else {
            bool inside = true;
            for (int j = 0; j < args.dims && inside; ++j) {
                inside = std::abs((target[j] - args.coords[j * n + i]) / args.bandwidth[j]) < 1.0;
            }
            if (inside) total += args.weights[i];
        }
    }
    return total;
}

}  // namespace npseg::simd
