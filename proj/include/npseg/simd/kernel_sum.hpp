#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "npseg/kernel.hpp"

namespace npseg::simd {

/// Weighted sample points in structure-of-arrays layout: coordinate j of point i is
/// coords[j * count + i].
struct PointSet {
    int dims = 0;
    std::size_t count = 0;
    std::vector<double> coords;
    std::vector<double> weights;

    void reserve(std::size_t n) {
        coords.reserve(n * dims);
        weights.reserve(n);
    }
    std::span<const double> axis(int j) const noexcept {
        return {coords.data() + j * count, count};
    }
};

/// Arguments of one reduced kernel sum. For a target t this computes
///   Gaussian: sum_i w_i exp(-1/2 sum_j ((t_j - p_ij) / h_j)^2)
///   Uniform:  sum_i w_i [ |t_j - p_ij| / h_j < 1 for all j ]
/// i.e. the product kernel with the constant K(0)^d factored out.
struct KernelSumArgs {
    KernelKind kind;
    int dims;
    std::size_t count;
    const double* coords;   // SoA, dims * count
    const double* weights;  // count
    const double* bandwidth;  // dims
};

using KernelSumFn = double (*)(const KernelSumArgs& args, const double* target) noexcept;

enum class Level { Scalar, Avx2 };

double kernel_sum_scalar(const KernelSumArgs& args, const double* target) noexcept;
#if defined(NPSEG_HAVE_AVX2)
double kernel_sum_avx2(const KernelSumArgs& args, const double* target) noexcept;
#endif

/// Best level supported by both the build and the running CPU.
Level detect_level() noexcept;

/// Level used by kernel_sum(). Defaults to detect_level(), overridable by the
/// NPSEG_SIMD environment variable ("scalar" or "avx2") or set_active_level().
Level active_level() noexcept;

/// Forces a level; requests above detect_level() fall back to it. Returns the level in effect.
Level set_active_level(Level level) noexcept;

std::string_view to_string(Level level) noexcept;

double kernel_sum(const KernelSumArgs& args, const double* target) noexcept;

inline KernelSumArgs make_args(KernelKind kind, const PointSet& points,
                               std::span<const double> bandwidth) noexcept {
    return {kind, points.dims, points.count, points.coords.data(), points.weights.data(),
            bandwidth.data()};
}

}  // namespace npseg::simd
