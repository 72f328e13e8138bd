#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "npseg/image.hpp"
#include "npseg/kernel.hpp"

namespace npseg {

/// Per-axis smoothing parameters. Colour components match the image channels;
/// the spatial pair (h_x, h_y) is only used by the joint colour-space density.
struct Bandwidth {
    std::vector<double> color;
    std::optional<std::array<double, 2>> spatial;

    friend bool operator==(const Bandwidth&, const Bandwidth&) = default;
};

/// One density value per pixel, on the grid of the source image.
struct DensityField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Pixels grouped by exact colour. colors is AoS (bin * dims + j); bins are numbered in
/// order of first occurrence in row-major pixel order.
struct ColorBins {
    int dims = 0;
    std::vector<double> colors;
    std::vector<double> counts;
    std::vector<std::size_t> pixel_bin;

    std::size_t bin_count() const noexcept { return counts.size(); }
    const double* color(std::size_t bin) const noexcept { return colors.data() + bin * dims; }
};

ColorBins bin_colors(const Image& image);

/// Normal-reference rule for a product kernel in d = channels dimensions:
///   h_j = sd_j * (4 / ((d + 2) n))^(1 / (d + 4)).
/// A zero-variance channel borrows the smallest positive sd among the others;
/// a constant image throws DegenerateInputError.
Bandwidth normal_reference_bandwidth(const Image& image);

/// Same rule over all channels + 2 normalised coordinates (d = channels + 2), with
/// h_x = h_y from the pooled coordinate sd.
Bandwidth joint_reference_bandwidth(const Image& image);

/// Multiplies every colour component by factor; spatial components are untouched.
Bandwidth scale_bandwidth(const Bandwidth& bw, double factor);

/// Kernel density of pixel colours, evaluated at each pixel's own colour.
/// Pixels are grouped by exact colour first, so the cost is quadratic in the number
/// of distinct colours rather than pixels; the result is the same sum.
DensityField color_density(const Image& image, KernelKind kernel, const Bandwidth& bw);

/// Joint colour + position density. Pixel coordinates are mapped to [0,1] per axis
/// (x / (width - 1), y / (height - 1); a single-pixel axis maps to 0).
DensityField joint_density(const Image& image, KernelKind kernel, const Bandwidth& bw);

/// Normalised coordinate used by joint_density.
inline double normalized_coordinate(int v, int extent) noexcept {
    return extent > 1 ? static_cast<double>(v) / (extent - 1) : 0.0;
}

/// CSV with header "x,y,density".
void write_density_csv(const DensityField& field, const std::filesystem::path& path);

/// Grayscale rendering with densities rescaled linearly to [0,1].
Image density_to_image(const DensityField& field);

}  // namespace npseg
