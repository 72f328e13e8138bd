#include "npseg/allocator.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_map>

#include "npseg/levelset.hpp"
#include "npseg/simd/kernel_sum.hpp"
#include "parallel.hpp"

namespace npseg {
namespace {

using Assignment = std::pair<PixelIndex, int>;

// Unnormalised f_m per colour bin. Constant factors are dropped: they are common to
// all m, so neither the argmax nor the normalised shares depend on them.
class SegmentDensity {
public:
    SegmentDensity(const ColorBins& bins, int segments, KernelKind kind, std::span<const double> h)
        : bins_(bins), segments_(segments), kind_(kind), h_(h), f_(bins.bin_count() * segments, 0.0) {}

    int segments() const noexcept { return segments_; }

    std::span<const double> row(std::size_t bin) const noexcept {
        return {f_.data() + bin * segments_, static_cast<std::size_t>(segments_)};
    }

    int argmax(std::size_t bin) const noexcept {
        const auto r = row(bin);
        int best = 0;
        for (int m = 1; m < segments_; ++m) {
            if (r[m] > r[best]) best = m;
        }
        return best + 1;
    }

    // Adds the contribution of newly labelled pixels to the bins flagged in `live`.
    void add(std::span<const Assignment> assigned, const std::vector<std::uint8_t>& live) {
        std::vector<std::unordered_map<std::size_t, double>> per_label(segments_);
        for (const auto& [p, m] : assigned) per_label[m - 1][bins_.pixel_bin[p]] += 1.0;

        std::vector<std::size_t> targets;
        for (std::size_t b = 0; b < live.size(); ++b) {
            if (live[b]) targets.push_back(b);
        }
        for (int m = 0; m < segments_; ++m) {
            if (per_label[m].empty()) continue;
            // Deterministic point order regardless of hash iteration.
            std::vector<std::pair<std::size_t, double>> entries(per_label[m].begin(), per_label[m].end());
            std::sort(entries.begin(), entries.end());
            simd::PointSet points;
            points.dims = bins_.dims;
            points.count = entries.size();
            points.coords.resize(points.count * points.dims);
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const double* c = bins_.color(entries[i].first);
                for (int j = 0; j < points.dims; ++j) points.coords[j * points.count + i] = c[j];
                points.weights.push_back(entries[i].second);
            }
            const auto args = simd::make_args(kind_, points, h_);
            detail::parallel_for(targets.size(), [&](std::size_t t) {
                const std::size_t b = targets[t];
                f_[b * segments_ + m] += simd::kernel_sum(args, bins_.color(b));
            });
        }
    }

private:
    const ColorBins& bins_;
    int segments_;
    KernelKind kind_;
    std::span<const double> h_;
    std::vector<double> f_;
};

void normalize_row(std::span<const double> f, std::span<double> out, std::uint8_t& flagged) {
    double total = 0.0;
    for (double v : f) total += v;
    if (total > 0.0) {
        for (std::size_t m = 0; m < f.size(); ++m) out[m] = f[m] / total;
        flagged = 0;
    } else {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        flagged = 1;
    }
}

void check_color_bandwidth(const Image& image, const Bandwidth& bw) {
    if (static_cast<int>(bw.color.size()) != image.channels()) {
        throw InvalidArgument("bandwidth does not match the image channel count");
    }
    for (double h : bw.color) {
        if (!(h > 0.0)) throw InvalidArgument("bandwidth components must be positive");
    }
}

bool has_neighbor_with(const LabelMap& labels, PixelIndex p, int label) {
    bool found = false;
    for_each_neighbor4(p, labels.width, labels.height, [&](PixelIndex q) { found |= labels[q] == label; });
    return found;
}

std::vector<std::uint8_t> live_bins(const ColorBins& bins, const std::vector<PixelIndex>& pending) {
    std::vector<std::uint8_t> live(bins.bin_count(), 0);
    for (PixelIndex p : pending) live[bins.pixel_bin[p]] = 1;
    return live;
}

}  // namespace

AllocationResult classify_unallocated(const Image& image, const LabelMap& cores, KernelKind kernel,
                                      const Bandwidth& bw, const AllocationPolicy& policy) {
    if (cores.width != image.width() || cores.height != image.height()) {
        throw InvalidArgument("core label map does not match the image size");
    }
    const int segments = cores.max_label();
    if (segments < 1) throw InvalidArgument("no segment cores: every pixel is unallocated");
    check_color_bandwidth(image, bw);

    AllocationResult result;
    result.labels = cores;
    result.round_assigned.assign(cores.size(), 0);
    if (!policy.classify) {
        for (std::size_t p = 0; p < cores.size(); ++p) {
            if (cores[p] == 0) result.round_assigned[p] = -1;
        }
        result.leftover_count = static_cast<std::size_t>(std::count(cores.labels.begin(), cores.labels.end(), 0));
        return result;
    }

    const ColorBins bins = bin_colors(image);
    SegmentDensity density(bins, segments, kernel, bw.color);
    LabelMap& labels = result.labels;

    std::vector<PixelIndex> pending;
    std::vector<Assignment> seeded;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] == 0) {
            pending.push_back(p);
        } else {
            seeded.emplace_back(p, labels[p]);
        }
    }
    density.add(seeded, live_bins(bins, pending));

    std::unordered_map<PixelIndex, std::vector<double>> decision_rows;
    auto remember = [&](PixelIndex p) {
        const auto f = density.row(bins.pixel_bin[p]);
        decision_rows[p].assign(f.begin(), f.end());
    };

    std::mt19937_64 shuffler(policy.visit_seed);
    while (!pending.empty()) {
        std::vector<PixelIndex> order = pending;
        if (policy.visit_seed != 0) std::shuffle(order.begin(), order.end(), shuffler);

        std::vector<Assignment> assigned;
        const int round = result.rounds + 1;
        for (PixelIndex u : order) {
            const int best = density.argmax(bins.pixel_bin[u]);
            if (!has_neighbor_with(labels, u, best)) continue;  // isolated this round
            if (policy.sequential) {
                labels[u] = best;
                result.round_assigned[u] = round;
                remember(u);
                const Assignment one{u, best};
                density.add(std::span(&one, 1), live_bins(bins, pending));
            }
            assigned.emplace_back(u, best);
        }
        if (assigned.empty()) break;
        ++result.rounds;

        if (!policy.sequential) {
            for (const auto& [u, m] : assigned) {
                remember(u);
                labels[u] = m;
                result.round_assigned[u] = round;
            }
        }
        std::erase_if(pending, [&](PixelIndex p) { return labels[p] != 0; });
        if (!policy.sequential) density.add(assigned, live_bins(bins, pending));
    }

    result.leftover_count = pending.size();
    for (PixelIndex p : pending) result.round_assigned[p] = -1;

    switch (policy.leftover) {
    case LeftoverPolicy::LeaveUnallocated:
        break;
    case LeftoverPolicy::ForceHighestDensity: {
        std::vector<Assignment> forced;
        for (PixelIndex p : pending) forced.emplace_back(p, density.argmax(bins.pixel_bin[p]));
        for (const auto& [p, m] : forced) {
            remember(p);
            labels[p] = m;
        }
        break;
    }
    case LeftoverPolicy::NewSegment: {
        std::vector<std::uint8_t> mask(labels.size(), 0);
        for (PixelIndex p : pending) mask[p] = 1;
        const auto groups = connected_components(mask, labels.width, labels.height);
        for (PixelIndex p : pending) labels[p] = segments + groups[p];
        break;
    }
    }

    result.confidence = confidence_of(image, labels, kernel, bw);
    const int width = result.confidence.segments;
    for (const auto& [p, f] : decision_rows) {
        std::vector<double> padded(width, 0.0);
        std::copy(f.begin(), f.end(), padded.begin());
        std::span<double> out(result.confidence.values.data() + p * width, static_cast<std::size_t>(width));
        normalize_row(padded, out, result.confidence.flagged[p]);
    }
    return result;
}

Confidence confidence_of(const Image& image, const LabelMap& labels, KernelKind kernel, const Bandwidth& bw) {
    if (labels.width != image.width() || labels.height != image.height()) {
        throw InvalidArgument("label map does not match the image size");
    }
    const int segments = labels.max_label();
    if (segments < 1) throw InvalidArgument("confidence needs at least one labelled segment");
    check_color_bandwidth(image, bw);

    const ColorBins bins = bin_colors(image);
    SegmentDensity density(bins, segments, kernel, bw.color);
    std::vector<Assignment> labelled;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] > 0) labelled.emplace_back(p, labels[p]);
    }
    density.add(labelled, std::vector<std::uint8_t>(bins.bin_count(), 1));

    Confidence conf;
    conf.segments = segments;
    conf.values.resize(labels.size() * segments);
    conf.flagged.resize(labels.size());
    for (std::size_t p = 0; p < labels.size(); ++p) {
        std::span<double> out(conf.values.data() + p * segments, static_cast<std::size_t>(segments));
        normalize_row(density.row(bins.pixel_bin[p]), out, conf.flagged[p]);
    }
    return conf;
}

void write_confidence_csv(const LabelMap& labels, const Confidence& confidence, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out.precision(17);
    out << "pixel,x,y,label";
    for (int m = 1; m <= confidence.segments; ++m) out << ",conf_" << m;
    out << ",flagged\n";
    for (std::size_t p = 0; p < labels.size(); ++p) {
        out << p << ',' << p % labels.width << ',' << p / labels.width << ',' << labels[p];
        for (double v : confidence.row(p)) out << ',' << v;
        out << ',' << int(confidence.flagged[p]) << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace npseg
