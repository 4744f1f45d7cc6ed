#include <atomic>
#include <stdexcept>
#include <string>

#include "ltfb/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LTFB_HAVE_AVX2_KERNELS 1
#endif
#if defined(__aarch64__)
#define LTFB_HAVE_NEON_KERNELS 1
#endif

namespace ltfb::simd {

namespace {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#ifdef LTFB_HAVE_AVX2_KERNELS
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#ifdef LTFB_HAVE_NEON_KERNELS
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best() {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{best()};
  return isa;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (supported(isa)) out.push_back(isa);
  }
  return out;
}

Isa active() { return current().load(std::memory_order_relaxed); }

void force(Isa isa) {
  if (!supported(isa)) {
    throw std::invalid_argument("simd: " + std::string(name(isa)) + " kernels unavailable here");
  }
  current().store(isa, std::memory_order_relaxed);
}

XorFn xor_kernel(Isa isa) {
  switch (isa) {
#ifdef LTFB_HAVE_AVX2_KERNELS
    case Isa::avx2:
      return &detail::xor_avx2;
#endif
#ifdef LTFB_HAVE_NEON_KERNELS
    case Isa::neon:
      return &detail::xor_neon;
#endif
    default:
      return &detail::xor_scalar;
  }
}

AxpyFn axpy_kernel(Isa isa) {
  switch (isa) {
#ifdef LTFB_HAVE_AVX2_KERNELS
    case Isa::avx2:
      return &detail::axpy_avx2;
#endif
#ifdef LTFB_HAVE_NEON_KERNELS
    case Isa::neon:
      return &detail::axpy_neon;
#endif
    default:
      return &detail::axpy_scalar;
  }
}

void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  if (dst.size() != src.size()) throw std::invalid_argument("xor_into: length mismatch");
  xor_kernel(active())(dst.data(), src.data(), dst.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  axpy_kernel(active())(a, x.data(), y.data(), y.size());
}

}  // namespace ltfb::simd
