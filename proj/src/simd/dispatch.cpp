#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "floqflow/simd/isa.hpp"
#include "floqflow/simd/kernels.hpp"

namespace floqflow::simd {
namespace {

bool cpu_supports(Isa isa) {
#if defined(__x86_64__) || defined(__i386__)
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512:
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
             __builtin_cpu_supports("fma");
  }
  return false;
#else
  return isa == Isa::scalar;
#endif
}

bool compiled_in(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return FLOQFLOW_HAVE_AVX2 != 0;
    case Isa::avx512:
      return FLOQFLOW_HAVE_AVX512 != 0;
  }
  return false;
}

int rank(Isa isa) { return static_cast<int>(isa); }

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detected_isa()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::avx512:
      return "avx512";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::avx512}) {
    if (isa_name(isa) == name) return isa;
  }
  return std::nullopt;
}

bool isa_available(Isa isa) { return compiled_in(isa) && cpu_supports(isa); }

Isa detected_isa() {
  Isa cap = Isa::avx512;
  if (const char* env = std::getenv("FLOQFLOW_SIMD")) {
    if (auto requested = parse_isa(env)) cap = *requested;
  }
  for (Isa isa : {Isa::avx512, Isa::avx2}) {
    if (rank(isa) <= rank(cap) && isa_available(isa)) return isa;
  }
  return Isa::scalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant not available on this CPU: " +
                                std::string(isa_name(isa)));
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
  switch (isa) {
#if FLOQFLOW_HAVE_AVX512
    case Isa::avx512:
      return detail::avx512_table();
#endif
#if FLOQFLOW_HAVE_AVX2
    case Isa::avx2:
      return detail::avx2_table();
#endif
    default:
      return detail::scalar_table();
  }
}

const KernelTable& kernels() { return kernels(active_isa()); }

}  // namespace floqflow::simd
