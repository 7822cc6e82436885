#include "mibel/kernels.hpp"

#include <algorithm>

#include "mibel/errors.hpp"

namespace mibel::kernels {

// --- scalar reference ------------------------------------------------------
//
// The 4-lane accumulator layout matches one AVX2 register: lane j collects
// x[i] with i % 4 == j over the vectorizable body, the tail reuses the same
// lane rule, and the final combine is (l0+l1) + (l2+l3).  Keeping the order
// identical is what makes scalar and AVX2 results bit-equal.

namespace detail {

double sum_scalar(const double* x, std::size_t n) noexcept {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lane[i % 4] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_scalar(const double* x, const double* y, std::size_t n) noexcept {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lane[i % 4] += x[i] * y[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double masked_sum_scalar(const double* x, const std::uint8_t* mask, std::size_t n) noexcept {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lane[i % 4] += mask[i] ? x[i] : 0.0;
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void shift_where_scalar(double* x, const std::uint8_t* mask, std::size_t n,
                        double delta, double floor) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) {
            // Ternary rather than std::max: matches MAXPD tie handling.
            const double s = x[i] + delta;
            x[i] = (s > floor) ? s : floor;
        }
    }
}

#if defined(MIBEL_HAVE_AVX2)
double sum_avx2(const double* x, std::size_t n) noexcept;
double dot_avx2(const double* x, const double* y, std::size_t n) noexcept;
double masked_sum_avx2(const double* x, const std::uint8_t* mask, std::size_t n) noexcept;
void shift_where_avx2(double* x, const std::uint8_t* mask, std::size_t n,
                      double delta, double floor) noexcept;
#endif

}  // namespace detail

// --- dispatch ---------------------------------------------------------------

namespace {

struct Table {
    double (*sum)(const double*, std::size_t) noexcept;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*masked_sum)(const double*, const std::uint8_t*, std::size_t) noexcept;
    void (*shift_where)(double*, const std::uint8_t*, std::size_t, double, double) noexcept;
    Backend id;
};

constexpr Table kScalar{detail::sum_scalar, detail::dot_scalar,
                        detail::masked_sum_scalar, detail::shift_where_scalar,
                        Backend::scalar};

#if defined(MIBEL_HAVE_AVX2)
constexpr Table kAvx2{detail::sum_avx2, detail::dot_avx2,
                      detail::masked_sum_avx2, detail::shift_where_avx2,
                      Backend::avx2};
#endif

bool cpu_has_avx2() noexcept {
#if defined(MIBEL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Table* best_table() noexcept {
#if defined(MIBEL_HAVE_AVX2)
    if (cpu_has_avx2()) return &kAvx2;
#endif
    return &kScalar;
}

const Table* g_active = best_table();

}  // namespace

Backend active() noexcept { return g_active->id; }

bool supported(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

void select(Backend b) {
    if (!supported(b)) throw InvalidParams("kernel backend not supported on this CPU");
    switch (b) {
        case Backend::scalar: g_active = &kScalar; break;
        case Backend::avx2:
#if defined(MIBEL_HAVE_AVX2)
            g_active = &kAvx2;
#endif
            break;
    }
}

double sum(std::span<const double> x) noexcept {
    return g_active->sum(x.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    return g_active->dot(x.data(), y.data(), std::min(x.size(), y.size()));
}

double masked_sum(std::span<const double> x, std::span<const std::uint8_t> mask) noexcept {
    return g_active->masked_sum(x.data(), mask.data(), std::min(x.size(), mask.size()));
}

void shift_where(std::span<double> x, std::span<const std::uint8_t> mask,
                 double delta, double floor) noexcept {
    g_active->shift_where(x.data(), mask.data(), std::min(x.size(), mask.size()),
                          delta, floor);
}

void prefix_sum(std::span<const double> x, std::span<double> out) noexcept {
    double acc = 0.0;
    const std::size_t n = std::min(x.size(), out.size());
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i];
        out[i] = acc;
    }
}

}  // namespace mibel::kernels
