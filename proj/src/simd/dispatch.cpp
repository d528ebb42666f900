#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hpz/error.hpp"
#include "hpz/simd/kernels.hpp"

namespace hpz::simd {

namespace {

Level detect() {
    const char* env = std::getenv("HPZ_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Level::Scalar;
    return avx2_available() ? Level::Avx2 : Level::Scalar;
}

std::atomic<Level>& level_slot() {
    static std::atomic<Level> level{detect()};
    return level;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level active_level() { return level_slot().load(std::memory_order_relaxed); }

void set_level(Level level) {
    if (level == Level::Avx2 && !avx2_available())
        throw DomainError("simd: AVX2/FMA not available on this CPU");
    level_slot().store(level, std::memory_order_relaxed);
}

std::string to_string(Level level) { return level == Level::Avx2 ? "avx2" : "scalar"; }

double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n) {
    return active_level() == Level::Avx2 ? avx2::dual_dot(a, x, b, y, n) : scalar::dual_dot(a, x, b, y, n);
}

void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k) {
    if (active_level() == Level::Avx2)
        avx2::phase_space_row(below, row, above, p, out, n, k);
    else
        scalar::phase_space_row(below, row, above, p, out, n, k);
}

}  // namespace hpz::simd
