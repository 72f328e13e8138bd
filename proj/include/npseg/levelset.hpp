#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "npseg/density.hpp"

namespace npseg {

/// Pixels with density >= level.
struct LevelSetMask {
    int width = 0;
    int height = 0;
    double level = 0.0;
    std::vector<std::uint8_t> inside;
};

LevelSetMask upper_level_set(const DensityField& density, double level);

/// Level whose upper set keeps a 1 - q share of the pixels: the q-quantile of the densities
/// (linear interpolation between order statistics). q = 1 maps just above the maximum, so
/// the upper set is empty.
double density_quantile_level(const DensityField& density, double q);

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        size_.assign(n, 1);
    }

    std::size_t find(std::size_t x) noexcept {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Returns the surviving root.
    std::size_t unite(std::size_t a, std::size_t b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return a;
    }

    std::size_t size_of(std::size_t x) noexcept { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// 4-connected components of the true pixels. Ids run from 1 in order of first
/// row-major encounter; false pixels get 0.
std::vector<int> connected_components(const std::vector<std::uint8_t>& mask, int width, int height);

inline std::vector<int> connected_components(const LevelSetMask& mask) {
    return connected_components(mask.inside, mask.width, mask.height);
}

/// Pixels in the level set with at least one 4-neighbour outside it.
std::vector<std::uint8_t> level_set_boundary(const LevelSetMask& mask);

}  // namespace npseg
