#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "omniflow/kernels.hpp"

namespace omniflow::kernels {
namespace {

const KernelTable* detect_best() {
  if (have_avx2_kernels()) return &avx2_kernels();
  return &scalar_kernels();
}

const KernelTable* table_by_name(const std::string& name) {
  if (name == "auto") return detect_best();
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") {
    if (!have_avx2_kernels()) throw std::runtime_error("avx2 kernels not available on this cpu");
    return &avx2_kernels();
  }
  throw std::invalid_argument("unknown kernel set: " + name);
}

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* initial_table() {
  if (const char* env = std::getenv("OMNIFLOW_KERNEL")) return table_by_name(env);
  return detect_best();
}

}  // namespace

bool have_avx2_kernels() {
#if defined(OMNIFLOW_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(OMNIFLOW_HAVE_AVX2)
const KernelTable& avx2_kernels() {
  throw std::runtime_error("avx2 kernels not compiled into this build");
}
#endif

const KernelTable& active_kernels() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = initial_table();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void select_kernels(const std::string& name) {
  g_active.store(table_by_name(name), std::memory_order_release);
}

std::vector<std::string> available_kernels() {
  std::vector<std::string> names{"scalar"};
  if (have_avx2_kernels()) names.push_back("avx2");
  return names;
}

}  // namespace omniflow::kernels
