#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Low-level array kernels used by the curve and aggregation layers.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime from CPU feature bits.  The two variants are
// bitwise identical by construction: the scalar code mirrors the lane layout
// of a 4-wide register (four running accumulators, fixed combine order), so
// results do not depend on which backend happens to be active.  The
// equivalence tests assert exact equality, not a tolerance.
namespace mibel::kernels {

enum class Backend { scalar, avx2 };

// Backend actually executing right now.
Backend active() noexcept;

// True if the CPU can run the given backend.
bool supported(Backend b) noexcept;

// Force a backend; throws mibel::InvalidParams if unsupported on this CPU.
void select(Backend b);

// Sum of x with 4-lane blocked accumulation.
double sum(std::span<const double> x) noexcept;

// Dot product of x and y (sizes must match; the smaller span bounds it).
double dot(std::span<const double> x, std::span<const double> y) noexcept;

// Sum of x[i] where mask[i] != 0.
double masked_sum(std::span<const double> x, std::span<const std::uint8_t> mask) noexcept;

// In place: x[i] = max(x[i] + delta, floor) wherever mask[i] != 0.
void shift_where(std::span<double> x, std::span<const std::uint8_t> mask,
                 double delta, double floor) noexcept;

// out[i] = x[0] + ... + x[i].  Sequential by nature; scalar only.
void prefix_sum(std::span<const double> x, std::span<double> out) noexcept;

}  // namespace mibel::kernels
