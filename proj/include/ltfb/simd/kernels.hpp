#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops. Every kernel has a portable scalar reference and
// optional vector variants; the fastest one the running CPU supports is picked
// on first use. Variants are bit-for-bit equivalent to the reference.
namespace ltfb::simd {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa);

/// Variants compiled into this build and supported by the running CPU.
std::vector<Isa> available();
/// Variant the dispatching entry points currently use.
Isa active();
/// Overrides the dispatch choice; throws std::invalid_argument if unavailable.
void force(Isa isa);

using XorFn = void (*)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);

XorFn xor_kernel(Isa isa);
AxpyFn axpy_kernel(Isa isa);

/// dst ^= src, byte-wise. Spans must have equal length.
void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src);
/// y += a * x (separate multiply and add, no fused rounding).
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace detail {
void xor_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void xor_avx2(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void xor_neon(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
}  // namespace detail

}  // namespace ltfb::simd
