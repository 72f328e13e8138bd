#include "npseg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace npseg {

Image::Image(int width, int height, int channels)
    : Image(width, height, channels,
            std::vector<double>(static_cast<std::size_t>(width) * height * channels, 0.0)) {}

Image::Image(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw InvalidArgument("image data length does not match width*height*channels");
    }
}

int LabelMap::max_label() const noexcept {
    int m = 0;
    for (int l : labels) m = std::max(m, l);
    return m;
}

std::uint8_t to_byte(double v) noexcept {
    const double scaled = std::floor(v * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

Image quantize(const Image& image) {
    Image out = image;
    for (double& v : out.data()) v = to_byte(v) / 255.0;
    return out;
}

Image to_grayscale(const Image& image) {
    if (image.channels() == 1) return image;
    Image out(image.width(), image.height(), 1);
    auto src = image.data();
    auto dst = out.data();
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        const double luma = 0.299 * src[3 * p] + 0.587 * src[3 * p + 1] + 0.114 * src[3 * p + 2];
        dst[p] = std::clamp(luma, 0.0, 1.0);
    }
    return out;
}

std::vector<PixelIndex> neighbors4(PixelIndex p, int width, int height) {
    std::vector<PixelIndex> out;
    out.reserve(4);
    for_each_neighbor4(p, width, height, [&](PixelIndex q) { out.push_back(q); });
    return out;
}

Image box_blur(const Image& image, int radius) {
    if (radius < 0) throw InvalidArgument("blur radius must be nonnegative");
    if (radius == 0) return image;

    const int w = image.width();
    const int h = image.height();
    const int c = image.channels();
    Image out(w, h, c);

    // Separable window sums: horizontal then vertical, in-bounds only.
    std::vector<double> rows(static_cast<std::size_t>(w) * h);
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
                    sum += image.at(xx, y, ch);
                }
                rows[static_cast<std::size_t>(y) * w + x] = sum;
            }
        }
        for (int y = 0; y < h; ++y) {
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(h - 1, y + radius);
            for (int x = 0; x < w; ++x) {
                const int x0 = std::max(0, x - radius);
                const int x1 = std::min(w - 1, x + radius);
                double sum = 0.0;
                for (int yy = y0; yy <= y1; ++yy) sum += rows[static_cast<std::size_t>(yy) * w + x];
                const double count = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
                out.at(x, y, ch) = std::clamp(sum / count, 0.0, 1.0);
            }
        }
    }
    return out;
}

}  // namespace npseg
