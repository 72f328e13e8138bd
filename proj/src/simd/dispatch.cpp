#include <atomic>
#include <cstdlib>
#include <string>

#include "npseg/simd/kernel_sum.hpp"

namespace npseg::simd {
namespace {

Level initial_level() noexcept {
    const Level best = detect_level();
    if (const char* env = std::getenv("NPSEG_SIMD")) {
        const std::string v = env;
        if (v == "scalar") return Level::Scalar;
        if (v == "avx2") return best;
    }
    return best;
}

std::atomic<Level>& level_slot() noexcept {
    static std::atomic<Level> slot{initial_level()};
    return slot;
}

}  // namespace

Level detect_level() noexcept {
#if defined(NPSEG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Level::Avx2;
#endif
    return Level::Scalar;
}

Level active_level() noexcept { return level_slot().load(std::memory_order_relaxed); }

Level set_active_level(Level level) noexcept {
    if (level == Level::Avx2 && detect_level() != Level::Avx2) level = Level::Scalar;
    level_slot().store(level, std::memory_order_relaxed);
    return level;
}

std::string_view to_string(Level level) noexcept {
    return level == Level::Avx2 ? "avx2" : "scalar";
}

double kernel_sum(const KernelSumArgs& args, const double* target) noexcept {
#if defined(NPSEG_HAVE_AVX2)
    if (active_level() == Level::Avx2) return kernel_sum_avx2(args, target);
#endif
    return kernel_sum_scalar(args, target);
}

}  // namespace npseg::simd
