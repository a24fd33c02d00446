#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace oeprop::simd {
namespace {

bool cpu_has(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(OEPROP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::Neon:
#if defined(OEPROP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level initial_level() {
  // OEPROP_SIMD=scalar lets a user rule out the vector path without rebuilding.
  if (const char* env = std::getenv("OEPROP_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Level::Scalar;
  }
  return detected_level();
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Scalar:
      return "scalar";
    case Level::Avx2:
      return "avx2";
    case Level::Neon:
      return "neon";
  }
  return "unknown";
}

Level detected_level() {
  if (cpu_has(Level::Avx2)) return Level::Avx2;
  if (cpu_has(Level::Neon)) return Level::Neon;
  return Level::Scalar;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void force_level(Level level) {
  current().store(cpu_has(level) ? level : Level::Scalar, std::memory_order_relaxed);
}

void reset_level() { current().store(initial_level(), std::memory_order_relaxed); }

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable& kernels_for(Level level) {
  switch (level) {
#if defined(OEPROP_HAVE_AVX2)
    case Level::Avx2:
      if (cpu_has(Level::Avx2)) return detail::kAvx2Table;
      break;
#endif
#if defined(OEPROP_HAVE_NEON)
    case Level::Neon:
      return detail::kNeonTable;
#endif
    default:
      break;
  }
  return detail::kScalarTable;
}

void rotate_pair(std::span<double> x, std::span<double> y, double c, double s) {
  assert(x.size() == y.size());
  kernels_for(active_level()).rotate_pair(x.data(), y.data(), x.size(), c, s);
}

void axpy(std::span<double> y, std::span<const double> x, double a) {
  assert(x.size() == y.size());
  kernels_for(active_level()).axpy(y.data(), x.data(), y.size(), a);
}

void accumulate_squares(std::span<double> acc, std::span<const double> x, double w) {
  assert(acc.size() == x.size());
  kernels_for(active_level()).accumulate_squares(acc.data(), x.data(), acc.size(), w);
}

void three_term(std::span<double> out, std::span<const double> xi, std::span<const double> cur,
                std::span<const double> prev, double a, double b) {
  assert(out.size() == xi.size() && out.size() == cur.size() && out.size() == prev.size());
  kernels_for(active_level()).three_term(out.data(), xi.data(), cur.data(), prev.data(),
                                         out.size(), a, b);
}

}  // namespace oeprop::simd
