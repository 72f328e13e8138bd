#pragma once

#include <string>
#include <vector>

#include "npseg/density.hpp"
#include "npseg/image.hpp"

namespace npseg {

/// How the density levels are visited when building the tree.
struct SweepGrid {
    enum class Mode { ExactLevels, EpsilonStep };
    Mode mode = Mode::ExactLevels;
    double epsilon = 0.0;

    static SweepGrid exact() { return {}; }
    static SweepGrid step(double eps) { return {Mode::EpsilonStep, eps}; }
};

struct TreeNode {
    int id = 0;
    int parent = -1;
    std::vector<int> children;
    double birth = 0.0;       // level at which the component appears
    double merge = 0.0;       // level at which it fuses with a sibling; 0 for the root
    double birth_mass = 0.0;  // |L(birth)| / n
    double mass = 0.0;        // |L(merge)| / n; 1 for the root
    PixelIndex representative = 0;
    bool leaf = false;
    int label = 0;  // 1..M for leaves, 0 otherwise
    std::vector<PixelIndex> core;  // leaves only, sorted
};

/// Merge hierarchy of the 4-connected components of the upper level sets.
struct ClusterTree {
    int width = 0;
    int height = 0;
    int root = -1;
    std::vector<TreeNode> nodes;
    std::vector<int> leaves;  // node ids, leaves[m - 1] carries label m

    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width) * height; }
    int mode_count() const noexcept { return static_cast<int>(leaves.size()); }
    const TreeNode& leaf(int label) const { return nodes[leaves.at(label - 1)]; }
};

struct TreeOptions {
    SweepGrid grid = SweepGrid::exact();
    /// Leaves whose component holds fewer pixels than this when it first meets another
    /// component are absorbed instead of forming a branch. 1 disables pruning.
    std::size_t min_core_size = 1;
};

/// Sweeps the level sets from the top density down. All pixels of one pass are
/// activated before any union, so the result does not depend on visiting order
/// within a level. A leaf's core is its component just before its first merge.
ClusterTree build_cluster_tree(const DensityField& density, const TreeOptions& options = {});

/// Core pixels labelled 1..M, everything else 0.
LabelMap extract_cores(const ClusterTree& tree);

/// Same leaves (representatives and cores), same parent/child structure. Levels are ignored.
bool same_topology(const ClusterTree& a, const ClusterTree& b);

/// JSON with birth/merge levels, masses and children per node.
std::string tree_to_json(const ClusterTree& tree);

/// JSON where each branch spans mass birth_mass (top) to mass (bottom); levels are dropped.
std::string tree_probability_view(const ClusterTree& tree);

/// Graphviz rendering.
std::string tree_to_dot(const ClusterTree& tree);

}  // namespace npseg
