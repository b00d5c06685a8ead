#include "macrospin/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace macrospin::kernels {

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("MACROSPIN_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
    if (std::strcmp(env, "avx2") == 0 && avx2_table()) return avx2_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable*& active_ptr() {
  static const KernelTable* p = pick_default();
  return p;
}

}  // namespace

const KernelTable& active() { return *active_ptr(); }

void set_active(const KernelTable& table) { active_ptr() = &table; }

}  // namespace macrospin::kernels
