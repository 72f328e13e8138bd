#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

namespace npseg {

enum class KernelKind { Gaussian, Uniform };

/// Univariate kernel: Gaussian (2pi)^-1/2 exp(-u^2/2), Uniform 1/2 on |u| < 1 (strict).
inline double kernel_value(KernelKind kind, double u) noexcept {
    if (kind == KernelKind::Gaussian) {
        return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    }
    return std::abs(u) < 1.0 ? 0.5 : 0.0;
}

/// K(0)^dims, the constant that multiplies the reduced kernel sums below.
inline double kernel_peak(KernelKind kind, int dims) noexcept {
    const double k0 = kind == KernelKind::Gaussian ? 1.0 / std::sqrt(2.0 * std::numbers::pi) : 0.5;
    return std::pow(k0, dims);
}

std::string_view to_string(KernelKind kind) noexcept;
KernelKind parse_kernel(std::string_view name);

}  // namespace npseg
