#include <atomic>
#include <cstdlib>
#include <string_view>

#include "avgdiff/kernels.hpp"

namespace avgdiff::kernels {

#if defined(AVGDIFF_HAVE_AVX2)
const KernelTable* avx2_kernels_unchecked();
#endif

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

const KernelTable* avx2_table() {
#if defined(AVGDIFF_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported ? avx2_kernels_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("AVGDIFF_ISA")) {
    if (std::string_view(env) == "scalar") return &scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) {
  const KernelTable* t = isa == Isa::Scalar ? &scalar_table() : avx2_table();
  if (!t) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace avgdiff::kernels
