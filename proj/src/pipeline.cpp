#include "npseg/pipeline.hpp"

namespace npseg {

Bandwidth resolve_bandwidth(const Image& image, const PipelineConfig& config) {
    if (config.explicit_h) {
        if (config.multiplier != 1.0) throw InvalidArgument("explicit bandwidths and a multiplier are mutually exclusive");
        Bandwidth bw;
        bw.color = *config.explicit_h;
        if (bw.color.size() == 1 && image.channels() == 3) bw.color.assign(3, bw.color.front());
        if (static_cast<int>(bw.color.size()) != image.channels()) {
            throw InvalidArgument("explicit bandwidth needs one value per channel");
        }
        if (config.density == DensityMode::Joint) bw.spatial = joint_reference_bandwidth(image).spatial;
        return bw;
    }
    Bandwidth reference = config.density == DensityMode::Joint ? joint_reference_bandwidth(image)
                                                                : normal_reference_bandwidth(image);
    return scale_bandwidth(reference, config.multiplier);
}

PipelineResult run_pipeline(const Image& image, const PipelineConfig& config) {
    PipelineResult result;
    result.input = box_blur(image, config.blur_radius);
    result.bandwidth = resolve_bandwidth(result.input, config);
    result.density = config.density == DensityMode::Joint
                         ? joint_density(result.input, config.kernel, result.bandwidth)
                         : color_density(result.input, config.kernel, result.bandwidth);
    result.tree = build_cluster_tree(result.density, {config.grid, config.min_core_size});
    result.cores = extract_cores(result.tree);

    Bandwidth color_only{result.bandwidth.color, std::nullopt};
    result.allocation = classify_unallocated(result.input, result.cores, config.kernel, color_only, config.policy);
    return result;
}

}  // namespace npseg
