#pragma once

#include <optional>
#include <string_view>

namespace floqflow::simd {

// Instruction-set variants of the numeric kernels. Every variant computes the
// same result as the scalar reference up to floating-point reassociation.
enum class Isa { scalar, avx2, avx512 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

// Best available variant. FLOQFLOW_SIMD=scalar|avx2|avx512 caps the choice.
Isa detected_isa();

Isa active_isa();
void set_active_isa(Isa isa);  // throws std::invalid_argument if unavailable

class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace floqflow::simd
