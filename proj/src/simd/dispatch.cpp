#include <atomic>
#include <cstdlib>
#include <string>

#include "camcond/error.hpp"
#include "camcond/simd/kernels.hpp"

namespace camcond::simd {
namespace {

Isa default_isa() {
  if (const char* env = std::getenv("CAMCOND_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_supported(Isa::Avx2)) return Isa::Avx2;
  }
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{default_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(CAMCOND_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::InvalidArgument,
                "instruction set " + std::string(to_string(isa)) + " is not available");
  }
#if defined(CAMCOND_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

const Kernels& kernels() { return kernels_for(active().load(std::memory_order_relaxed)); }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  (void)kernels_for(isa);
  active().store(isa, std::memory_order_relaxed);
}

}  // namespace camcond::simd
