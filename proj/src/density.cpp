#include "npseg/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>

#include "npseg/simd/kernel_sum.hpp"
#include "parallel.hpp"

namespace npseg {
namespace {

struct ColorKey {
    std::array<std::uint64_t, 3> bits{};
    bool operator==(const ColorKey&) const = default;
};

struct ColorKeyHash {
    std::size_t operator()(const ColorKey& k) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto b : k.bits) {
            h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

// Shifted by the first value; exactly 0 for constant input.
double sample_sd(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double ref = v.front();
    double mean = 0.0;
    for (double x : v) mean += x - ref;
    if (std::all_of(v.begin(), v.end(), [ref](double x) { return x == ref; })) return 0.0;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - ref - mean) * (x - ref - mean);
    return std::sqrt(ss / (n - 1.0));
}

double reference_factor(int dims, std::size_t n) {
    return std::pow(4.0 / ((dims + 2.0) * static_cast<double>(n)), 1.0 / (dims + 4.0));
}

std::vector<double> channel_sds(const Image& image) {
    const int c = image.channels();
    std::vector<double> sds(c);
    std::vector<double> values(image.pixel_count());
    for (int ch = 0; ch < c; ++ch) {
        for (std::size_t p = 0; p < values.size(); ++p) values[p] = image.data()[p * c + ch];
        sds[ch] = sample_sd(values);
    }
    return sds;
}

// Zero-sd channels borrow the smallest positive sd.
void patch_zero_sds(std::vector<double>& sds) {
    double smallest = std::numeric_limits<double>::infinity();
    for (double s : sds) {
        if (s > 0.0) smallest = std::min(smallest, s);
    }
    if (!std::isfinite(smallest)) {
        throw DegenerateInputError("constant image: every channel has zero variance, no bandwidth can be chosen");
    }
    for (double& s : sds) {
        if (!(s > 0.0)) s = smallest;
    }
}

void check_bandwidth(const Bandwidth& bw, int channels) {
    if (static_cast<int>(bw.color.size()) != channels) {
        throw InvalidArgument("bandwidth has " + std::to_string(bw.color.size()) +
                              " colour components for a " + std::to_string(channels) + "-channel image");
    }
    for (double h : bw.color) {
        if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("bandwidth components must be positive and finite");
    }
    if (bw.spatial) {
        for (double h : *bw.spatial) {
            if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("bandwidth components must be positive and finite");
        }
    }
}

void check_finite(const DensityField& field) {
    for (double v : field.values) {
        if (!std::isfinite(v) || v < 0.0) throw std::logic_error("density evaluation produced a non-finite value");
    }
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
    return kind == KernelKind::Gaussian ? "gaussian" : "uniform";
}

KernelKind parse_kernel(std::string_view name) {
    if (name == "gaussian" || name == "normal") return KernelKind::Gaussian;
    if (name == "uniform") return KernelKind::Uniform;
    throw InvalidArgument("unknown kernel '" + std::string(name) + "' (expected gaussian or uniform)");
}

ColorBins bin_colors(const Image& image) {
    ColorBins bins;
    bins.dims = image.channels();
    bins.pixel_bin.resize(image.pixel_count());
    std::unordered_map<ColorKey, std::size_t, ColorKeyHash> index;
    index.reserve(std::min<std::size_t>(image.pixel_count(), 1 << 16));
    for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        const auto color = image.pixel(p);
        ColorKey key;
        for (int j = 0; j < bins.dims; ++j) std::memcpy(&key.bits[j], &color[j], sizeof(double));
        auto [it, inserted] = index.try_emplace(key, bins.counts.size());
        if (inserted) {
            bins.colors.insert(bins.colors.end(), color.begin(), color.end());
            bins.counts.push_back(0.0);
        }
        bins.counts[it->second] += 1.0;
        bins.pixel_bin[p] = it->second;
    }
    return bins;
}

Bandwidth normal_reference_bandwidth(const Image& image) {
    const std::size_t n = image.pixel_count();
    if (n < 2) throw DegenerateInputError("normal-reference bandwidth needs at least 2 pixels");
    auto sds = channel_sds(image);
    patch_zero_sds(sds);
    const double factor = reference_factor(image.channels(), n);
    Bandwidth bw;
    for (double s : sds) bw.color.push_back(s * factor);
    return bw;
}

Bandwidth joint_reference_bandwidth(const Image& image) {
    const std::size_t n = image.pixel_count();
    if (n < 2) throw DegenerateInputError("normal-reference bandwidth needs at least 2 pixels");
    auto sds = channel_sds(image);
    patch_zero_sds(sds);

    std::vector<double> xs(n), ys(n);
    for (std::size_t p = 0; p < n; ++p) {
        xs[p] = normalized_coordinate(static_cast<int>(p % image.width()), image.width());
        ys[p] = normalized_coordinate(static_cast<int>(p / image.width()), image.height());
    }
    const double sx = sample_sd(xs);
    const double sy = sample_sd(ys);
    const double spatial_sd = std::sqrt(0.5 * (sx * sx + sy * sy)) * (sx > 0 && sy > 0 ? 1.0 : std::sqrt(2.0));

    const double factor = reference_factor(image.channels() + 2, n);
    Bandwidth bw;
    for (double s : sds) bw.color.push_back(s * factor);
    bw.spatial = std::array<double, 2>{spatial_sd * factor, spatial_sd * factor};
    return bw;
}

Bandwidth scale_bandwidth(const Bandwidth& bw, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("bandwidth multiplier must be positive");
    Bandwidth out = bw;
    for (double& h : out.color) h *= factor;
    return out;
}

DensityField color_density(const Image& image, KernelKind kernel, const Bandwidth& bw) {
    check_bandwidth(bw, image.channels());
    if (bw.spatial) throw InvalidArgument("color_density takes a colour-only bandwidth; use joint_density");

    const ColorBins bins = bin_colors(image);
    const std::size_t u = bins.bin_count();
    const int d = bins.dims;

    simd::PointSet points;
    points.dims = d;
    points.count = u;
    points.coords.resize(u * d);
    for (std::size_t b = 0; b < u; ++b) {
        for (int j = 0; j < d; ++j) points.coords[j * u + b] = bins.colors[b * d + j];
    }
    points.weights = bins.counts;

    double norm = kernel_peak(kernel, d) / static_cast<double>(image.pixel_count());
    for (double h : bw.color) norm /= h;

    const auto args = simd::make_args(kernel, points, bw.color);
    std::vector<double> per_bin(u);
    detail::parallel_for(u, [&](std::size_t b) { per_bin[b] = norm * simd::kernel_sum(args, bins.color(b)); });

    DensityField field{image.width(), image.height(), std::vector<double>(image.pixel_count())};
    for (std::size_t p = 0; p < field.values.size(); ++p) field.values[p] = per_bin[bins.pixel_bin[p]];
    check_finite(field);
    return field;
}

DensityField joint_density(const Image& image, KernelKind kernel, const Bandwidth& bw) {
    check_bandwidth(bw, image.channels());
    if (!bw.spatial) throw InvalidArgument("joint_density needs spatial bandwidths (h_x, h_y)");

    const std::size_t n = image.pixel_count();
    const int c = image.channels();
    const int d = c + 2;
    simd::PointSet points;
    points.dims = d;
    points.count = n;
    points.coords.resize(n * d);
    points.weights.assign(n, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
        for (int j = 0; j < c; ++j) points.coords[j * n + p] = image.data()[p * c + j];
        points.coords[c * n + p] = normalized_coordinate(static_cast<int>(p % image.width()), image.width());
        points.coords[(c + 1) * n + p] = normalized_coordinate(static_cast<int>(p / image.width()), image.height());
    }
    std::vector<double> h = bw.color;
    h.push_back((*bw.spatial)[0]);
    h.push_back((*bw.spatial)[1]);

    double norm = kernel_peak(kernel, d) / static_cast<double>(n);
    for (double v : h) norm /= v;

    const auto args = simd::make_args(kernel, points, h);
    DensityField field{image.width(), image.height(), std::vector<double>(n)};
    detail::parallel_for(n, [&](std::size_t p) {
        double target[5];
        for (int j = 0; j < d; ++j) target[j] = points.coords[j * n + p];
        field.values[p] = norm * simd::kernel_sum(args, target);
    });
    check_finite(field);
    return field;
}

void write_density_csv(const DensityField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out.precision(17);
    out << "x,y,density\n";
    for (std::size_t p = 0; p < field.size(); ++p) {
        out << p % field.width << ',' << p / field.width << ',' << field.values[p] << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

Image density_to_image(const DensityField& field) {
    const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
    const double span = *hi - *lo;
    std::vector<double> data(field.size());
    for (std::size_t p = 0; p < data.size(); ++p) {
        data[p] = span > 0.0 ? (field.values[p] - *lo) / span : 1.0;
    }
    return Image(field.width, field.height, 1, std::move(data));
}

}  // namespace npseg
