#include <cstdlib>
#include <string_view>

#include "rxprobe/simd/conv_kernels.hpp"

namespace rxprobe::simd {

bool cpu_supports_avx2_fma() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

const ConvKernels* avx2_kernels() {
#if defined(RXPROBE_HAVE_AVX2)
  if (cpu_supports_avx2_fma()) return &detail::avx2_kernels_unchecked();
#endif
  return nullptr;
}

const ConvKernels& active_kernels() {
  static const ConvKernels& chosen = []() -> const ConvKernels& {
    const char* forced = std::getenv("RXPROBE_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const ConvKernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace rxprobe::simd
