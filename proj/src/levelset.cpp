#include "npseg/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "npseg/error.hpp"

namespace npseg {

LevelSetMask upper_level_set(const DensityField& density, double level) {
    LevelSetMask mask{density.width, density.height, level, std::vector<std::uint8_t>(density.size())};
    for (std::size_t p = 0; p < density.size(); ++p) mask.inside[p] = density.values[p] >= level ? 1 : 0;
    return mask;
}

double density_quantile_level(const DensityField& density, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile must lie in [0, 1]");
    if (density.values.empty()) throw InvalidArgument("empty density field");
    std::vector<double> sorted = density.values;
    std::sort(sorted.begin(), sorted.end());
    if (q == 1.0) return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<int> connected_components(const std::vector<std::uint8_t>& mask, int width, int height) {
    const std::size_t n = mask.size();
    const std::size_t w = static_cast<std::size_t>(width);
    if (n != w * static_cast<std::size_t>(height)) throw InvalidArgument("mask size does not match width*height");

    UnionFind uf(n);
    for (std::size_t p = 0; p < n; ++p) {
        if (!mask[p]) continue;
        // Looking back (left, up) is enough to see every 4-adjacency once.
        if (p % w > 0 && mask[p - 1]) uf.unite(p, p - 1);
        if (p >= w && mask[p - w]) uf.unite(p, p - w);
    }

    std::vector<int> ids(n, 0);
    std::unordered_map<std::size_t, int> root_id;
    int next = 1;
    for (std::size_t p = 0; p < n; ++p) {
        if (!mask[p]) continue;
        auto [it, inserted] = root_id.try_emplace(uf.find(p), next);
        if (inserted) ++next;
        ids[p] = it->second;
    }
    return ids;
}

std::vector<std::uint8_t> level_set_boundary(const LevelSetMask& mask) {
    std::vector<std::uint8_t> edge(mask.inside.size(), 0);
    for (std::size_t p = 0; p < mask.inside.size(); ++p) {
        if (!mask.inside[p]) continue;
        bool touches_outside = false;
        for_each_neighbor4(p, mask.width, mask.height, [&](PixelIndex q) { touches_outside |= !mask.inside[q]; });
        edge[p] = touches_outside ? 1 : 0;
    }
    return edge;
}

}  // namespace npseg
