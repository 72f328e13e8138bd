#pragma once

#include <optional>
#include <vector>

#include "npseg/allocator.hpp"
#include "npseg/cluster_tree.hpp"
#include "npseg/density.hpp"
#include "npseg/image.hpp"

namespace npseg {

enum class DensityMode { Color, Joint };

struct PipelineConfig {
    KernelKind kernel = KernelKind::Gaussian;
    double multiplier = 1.0;
    /// Per-channel bandwidths; when set, the multiplier must stay 1.
    std::optional<std::vector<double>> explicit_h;
    int blur_radius = 0;
    DensityMode density = DensityMode::Color;
    SweepGrid grid = SweepGrid::exact();
    std::size_t min_core_size = 1;
    AllocationPolicy policy{};
};

struct PipelineResult {
    Image input;  // after optional blurring
    Bandwidth bandwidth;
    DensityField density;
    ClusterTree tree;
    LabelMap cores;
    AllocationResult allocation;

    const LabelMap& labels() const noexcept { return allocation.labels; }
};

/// Colour bandwidth actually used for the given configuration.
Bandwidth resolve_bandwidth(const Image& image, const PipelineConfig& config);

/// blur -> density -> cluster tree -> cores -> allocation.
PipelineResult run_pipeline(const Image& image, const PipelineConfig& config);

}  // namespace npseg
