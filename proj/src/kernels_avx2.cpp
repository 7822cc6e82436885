// AVX2 kernel variants.  This translation unit is the only one compiled with
// -mavx2; it is linked unconditionally but reached only after a runtime CPUID
// check.  Lane layout and combine order mirror the scalar reference exactly.
#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace mibel::kernels::detail {

namespace {

// Expand four mask bytes into a 4x64-bit lane mask (all-ones where nonzero).
inline __m256d lane_mask(const std::uint8_t* m) noexcept {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d v = _mm256_set_pd(m[3] ? 1.0 : 0.0, m[2] ? 1.0 : 0.0,
                                    m[1] ? 1.0 : 0.0, m[0] ? 1.0 : 0.0);
    return _mm256_cmp_pd(v, zero, _CMP_NEQ_OQ);
}

inline double combine(__m256d acc) noexcept {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double sum_avx2(const double* x, std::size_t n) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; i < n; ++i) lane[i % 4] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* x, const double* y, std::size_t n) noexcept {
    // Separate mul and add (no FMA) so the rounding sequence matches scalar.
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, p);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; i < n; ++i) lane[i % 4] += x[i] * y[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double masked_sum_avx2(const double* x, const std::uint8_t* mask, std::size_t n) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_and_pd(_mm256_loadu_pd(x + i), lane_mask(mask + i));
        acc = _mm256_add_pd(acc, v);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; i < n; ++i) lane[i % 4] += mask[i] ? x[i] : 0.0;
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void shift_where_avx2(double* x, const std::uint8_t* mask, std::size_t n,
                      double delta, double floor) noexcept {
    const __m256d vdelta = _mm256_set1_pd(delta);
    const __m256d vfloor = _mm256_set1_pd(floor);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d cur = _mm256_loadu_pd(x + i);
        const __m256d shifted = _mm256_max_pd(_mm256_add_pd(cur, vdelta), vfloor);
        _mm256_storeu_pd(x + i, _mm256_blendv_pd(cur, shifted, lane_mask(mask + i)));
    }
    for (; i < n; ++i) {
        if (mask[i]) {
            const double s = x[i] + delta;
            x[i] = (s > floor) ? s : floor;
        }
    }
}

}  // namespace mibel::kernels::detail
