#include <cmath>

#include "npseg/simd/kernel_sum.hpp"

namespace npseg::simd {

double kernel_sum_scalar(const KernelSumArgs& args, const double* target) noexcept {
    const std::size_t n = args.count;
    double acc = 0.0;
    if (args.kind == KernelKind::Gaussian) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < args.dims; ++j) {
                const double u = (target[j] - args.coords[j * n + i]) / args.bandwidth[j];
                s += u * u;
            }
            acc += args.weights[i] * std::exp(-0.5 * s);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            bool inside = true;
            for (int j = 0; j < args.dims && inside; ++j) {
                inside = std::abs((target[j] - args.coords[j * n + i]) / args.bandwidth[j]) < 1.0;
            }
            if (inside) acc += args.weights[i];
        }
    }
    return acc;
}

}  // namespace npseg::simd
