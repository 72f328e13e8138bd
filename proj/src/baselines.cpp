#include "npseg/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>

#include "npseg/rng.hpp"

namespace npseg {

OtsuResult otsu(const Image& image) {
    const Image gray = to_grayscale(image);
    const std::size_t n = gray.pixel_count();
    std::array<double, 256> hist{};
    std::vector<int> code(n);
    for (std::size_t p = 0; p < n; ++p) {
        code[p] = to_byte(gray.data()[p]);
        hist[code[p]] += 1.0;
    }

    OtsuResult result;
    result.labels = LabelMap(gray.width(), gray.height(), 1);

    const double total = static_cast<double>(n);
    double sum_all = 0.0;
    for (int k = 0; k < 256; ++k) sum_all += k * hist[k];

    double w0 = 0.0;
    double sum0 = 0.0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 1; t < 256; ++t) {
        w0 += hist[t - 1];
        sum0 += (t - 1) * hist[t - 1];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    if (best_t == 0) {
        std::cerr << "warning: otsu on a constant image; returning a single class\n";
        result.degenerate = true;
        return result;
    }
    result.threshold = best_t;
    result.between_class_variance = best;
    for (std::size_t p = 0; p < n; ++p) result.labels[p] = code[p] < best_t ? 1 : 2;
    return result;
}

namespace {

struct Lloyd {
    std::vector<int> assign;
    std::vector<double> centroids;
    double wcss = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

double sq_dist(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
}

Lloyd run_lloyd(const Image& image, std::vector<double> centroids, int k, int max_iterations) {
    const int d = image.channels();
    const std::size_t n = image.pixel_count();
    const double* x = image.data().data();
    Lloyd out;
    out.assign.assign(n, -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            int best = 0;
            double best_d = sq_dist(x + p * d, centroids.data(), d);
            for (int c = 1; c < k; ++c) {
                const double dist = sq_dist(x + p * d, centroids.data() + c * d, d);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            changed |= out.assign[p] != best;
            out.assign[p] = best;
            wcss += best_d;
        }
        out.trace.push_back(wcss);
        out.iterations = it + 1;
        if (!changed) break;
        // Update step; an emptied cluster keeps its centroid.
        std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
        std::vector<double> counts(k, 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            counts[out.assign[p]] += 1.0;
            for (int j = 0; j < d; ++j) sums[out.assign[p] * d + j] += x[p * d + j];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0.0) continue;
            for (int j = 0; j < d; ++j) centroids[c * d + j] = sums[c * d + j] / counts[c];
        }
    }
    // Final WCSS against the final centroids.
    double wcss = 0.0;
    for (std::size_t p = 0; p < n; ++p) wcss += sq_dist(x + p * d, centroids.data() + out.assign[p] * d, d);
    out.wcss = wcss;
    out.centroids = std::move(centroids);
    return out;
}

}  // namespace

KMeansResult kmeans(const Image& image, const KMeansOptions& options) {
    if (options.clusters < 1) throw InvalidArgument("k-means needs at least one cluster");
    if (options.restarts < 1) throw InvalidArgument("k-means needs at least one restart");
    const int d = image.channels();
    const std::size_t n = image.pixel_count();

    // Distinct colours, first-occurrence order.
    std::vector<std::size_t> distinct;
    {
        std::set<std::vector<double>> seen;
        for (std::size_t p = 0; p < n; ++p) {
            const auto c = image.pixel(p);
            if (seen.insert(std::vector<double>(c.begin(), c.end())).second) distinct.push_back(p);
        }
    }
    const int k = options.clusters;
    if (static_cast<std::size_t>(k) > distinct.size()) {
        throw InvalidArgument("k-means: K = " + std::to_string(k) + " exceeds the " +
                              std::to_string(distinct.size()) + " distinct colours");
    }

    Lloyd best;
    int best_restart = -1;
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(substream_seed(options.seed, static_cast<std::uint64_t>(r)));
        // Partial Fisher-Yates over the distinct colours.
        std::vector<std::size_t> pool = distinct;
        std::vector<double> init(static_cast<std::size_t>(k) * d);
        for (int c = 0; c < k; ++c) {
            const std::size_t pick = c + rng.below(pool.size() - c);
            std::swap(pool[c], pool[pick]);
            const auto color = image.pixel(pool[c]);
            std::copy(color.begin(), color.end(), init.begin() + c * d);
        }
        Lloyd run = run_lloyd(image, std::move(init), k, options.max_iterations);
        if (best_restart < 0 || run.wcss < best.wcss) {
            best = std::move(run);
            best_restart = r;
        }
    }

    // Relabel by first occurrence.
    KMeansResult result;
    result.labels = LabelMap(image.width(), image.height(), 0);
    std::vector<int> relabel(k, 0);
    int next = 1;
    for (std::size_t p = 0; p < n; ++p) {
        int& l = relabel[best.assign[p]];
        if (l == 0) l = next++;
        result.labels[p] = l;
    }
    result.centroids.assign(static_cast<std::size_t>(k) * d, 0.0);
    for (int c = 0; c < k; ++c) {
        const int l = relabel[c] > 0 ? relabel[c] : next++;
        std::copy(best.centroids.begin() + c * d, best.centroids.begin() + (c + 1) * d,
                  result.centroids.begin() + (l - 1) * d);
    }
    result.wcss = best.wcss;
    result.iterations = best.iterations;
    result.best_restart = best_restart;
    result.wcss_trace = std::move(best.trace);
    return result;
}

EdgeMap sobel(const Image& image, double quantile) {
    if (!(quantile >= 0.0 && quantile <= 1.0)) throw InvalidArgument("sobel quantile must lie in [0, 1]");
    const Image gray = to_grayscale(image);
    const int w = gray.width();
    const int h = gray.height();
    auto at = [&](int x, int y) { return gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

    EdgeMap map;
    map.width = w;
    map.height = h;
    const std::size_t n = gray.pixel_count();
    map.gx.resize(n);
    map.gy.resize(n);
    map.magnitude.resize(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            map.gx[p] = gx;
            map.gy[p] = gy;
            map.magnitude[p] = std::sqrt(gx * gx + gy * gy);
        }
    }

    std::vector<double> sorted = map.magnitude;
    std::sort(sorted.begin(), sorted.end());
    const double pos = quantile * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    double threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    if (!(threshold > 0.0)) {
        const auto first_positive = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
        threshold = first_positive != sorted.end() ? *first_positive : std::numeric_limits<double>::infinity();
    }
    map.threshold = threshold;
    map.edges.resize(n);
    for (std::size_t p = 0; p < n; ++p) map.edges[p] = map.magnitude[p] >= threshold ? 1 : 0;
    return map;
}

}  // namespace npseg
