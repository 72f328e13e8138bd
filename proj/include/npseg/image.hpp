#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "npseg/error.hpp"

namespace npseg {

/// Linear row-major pixel index, y * width + x.
using PixelIndex = std::size_t;

/// Row-major W x H x C grid of intensities in [0,1]. Channels are interleaved.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels);
    Image(int width, int height, int channels, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return data_.empty(); }

    double at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double& at(int x, int y, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    /// The colour vector of one pixel.
    std::span<const double> pixel(PixelIndex p) const noexcept {
        return {data_.data() + p * channels_, static_cast<std::size_t>(channels_)};
    }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Per-pixel integer labels; 0 means unallocated.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    LabelMap() = default;
    LabelMap(int w, int h, int fill = 0)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const noexcept { return labels.size(); }
    int operator[](std::size_t i) const noexcept { return labels[i]; }
    int& operator[](std::size_t i) noexcept { return labels[i]; }
    int max_label() const noexcept;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

/// 8-bit code of an intensity, round half up: floor(v * 255 + 0.5), clamped.
std::uint8_t to_byte(double v) noexcept;

/// Snap every intensity to the nearest k/255.
Image quantize(const Image& image);

/// Luma conversion 0.299 r + 0.587 g + 0.114 b. Grayscale input is returned as is.
Image to_grayscale(const Image& image);

/// In-bounds 4-neighbours of p, in the order up, left, right, down.
std::vector<PixelIndex> neighbors4(PixelIndex p, int width, int height);

/// Calls fn(q) for each in-bounds 4-neighbour q of p. Allocation-free variant of neighbors4.
template <typename Fn>
inline void for_each_neighbor4(PixelIndex p, int width, int height, Fn&& fn) {
    const std::size_t w = static_cast<std::size_t>(width);
    const std::size_t x = p % w;
    const std::size_t y = p / w;
    if (y > 0) fn(p - w);
    if (x > 0) fn(p - 1);
    if (x + 1 < w) fn(p + 1);
    if (y + 1 < static_cast<std::size_t>(height)) fn(p + w);
}

/// Mean over the in-bounds (2r+1) x (2r+1) window, per channel. radius 0 is the identity.
Image box_blur(const Image& image, int radius);

}  // namespace npseg
