#include "npseg/cluster_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "npseg/levelset.hpp"

namespace npseg {
namespace {

struct Pass {
    double level = 0.0;
    std::vector<PixelIndex> pixels;  // ascending index
};

std::vector<Pass> exact_passes(const DensityField& density) {
    std::vector<PixelIndex> order(density.size());
    std::iota(order.begin(), order.end(), PixelIndex{0});
    std::sort(order.begin(), order.end(), [&](PixelIndex a, PixelIndex b) {
        if (density[a] != density[b]) return density[a] > density[b];
        return a < b;
    });
    std::vector<Pass> passes;
    for (PixelIndex p : order) {
        if (passes.empty() || passes.back().level != density[p]) passes.push_back({density[p], {}});
        passes.back().pixels.push_back(p);
    }
    return passes;
}

// Grid levels k * eps. Pass k holds the pixels entering L(k * eps), i.e. densities in
// [k eps, (k + 1) eps). Grid levels that add no pixel change no component and are skipped.
std::vector<Pass> epsilon_passes(const DensityField& density, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("epsilon step must be positive and finite");
    std::vector<std::int64_t> bucket(density.size());
    for (std::size_t p = 0; p < density.size(); ++p) {
        const double f = density[p];
        auto k = static_cast<std::int64_t>(std::floor(f / eps));
        while (static_cast<double>(k + 1) * eps <= f) ++k;
        while (k > 0 && static_cast<double>(k) * eps > f) --k;
        bucket[p] = k;
    }
    std::vector<PixelIndex> order(density.size());
    std::iota(order.begin(), order.end(), PixelIndex{0});
    std::sort(order.begin(), order.end(), [&](PixelIndex a, PixelIndex b) {
        if (bucket[a] != bucket[b]) return bucket[a] > bucket[b];
        return a < b;
    });
    std::vector<Pass> passes;
    std::int64_t current = -1;
    for (PixelIndex p : order) {
        if (passes.empty() || bucket[p] != current) {
            current = bucket[p];
            passes.push_back({static_cast<double>(current) * eps, {}});
        }
        passes.back().pixels.push_back(p);
    }
    return passes;
}

struct WorkNode {
    TreeNode node;
    std::size_t birth_pass = 0;
    std::size_t merge_pass = 0;
    bool pruned = false;
};

// Higher density first, then lower index.
bool better_rep(const DensityField& f, PixelIndex a, PixelIndex b) {
    if (f[a] != f[b]) return f[a] > f[b];
    return a < b;
}

}  // namespace

ClusterTree build_cluster_tree(const DensityField& density, const TreeOptions& options) {
    const std::size_t n = density.size();
    if (n == 0) throw InvalidArgument("cannot build a cluster tree on an empty density field");
    if (n != static_cast<std::size_t>(density.width) * density.height) {
        throw InvalidArgument("density field size does not match its dimensions");
    }

    const std::vector<Pass> passes = options.grid.mode == SweepGrid::Mode::ExactLevels
                                         ? exact_passes(density)
                                         : epsilon_passes(density, options.grid.epsilon);

    constexpr std::size_t kInactive = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> pass_of(n, kInactive);
    std::vector<int> comp_node(n, -1);  // indexed by union-find root
    std::vector<std::size_t> active_after(passes.size());
    std::vector<WorkNode> work;
    UnionFind uf(n);

    struct Touch {
        PixelIndex pixel;
        int node;
        std::size_t size;
    };
    struct Group {
        std::vector<PixelIndex> pixels;
        std::vector<std::pair<int, std::size_t>> olds;  // (node, component size), unique
    };

    std::size_t active = 0;
    for (std::size_t pi = 0; pi < passes.size(); ++pi) {
        const Pass& pass = passes[pi];
        for (PixelIndex p : pass.pixels) pass_of[p] = pi;
        active += pass.pixels.size();
        active_after[pi] = active;

        // Components present before this pass, seen from each new pixel.
        std::vector<Touch> touches;
        for (PixelIndex p : pass.pixels) {
            for_each_neighbor4(p, density.width, density.height, [&](PixelIndex q) {
                if (pass_of[q] < pi) {
                    const std::size_t r = uf.find(q);
                    touches.push_back({p, comp_node[r], uf.size_of(r)});
                }
            });
        }
        for (PixelIndex p : pass.pixels) {
            for_each_neighbor4(p, density.width, density.height, [&](PixelIndex q) {
                if (pass_of[q] <= pi) uf.unite(p, q);
            });
        }

        std::unordered_map<std::size_t, std::size_t> group_of_root;
        std::vector<Group> groups;
        auto group_for = [&](PixelIndex p) -> Group& {
            auto [it, inserted] = group_of_root.try_emplace(uf.find(p), groups.size());
            if (inserted) groups.emplace_back();
            return groups[it->second];
        };
        for (PixelIndex p : pass.pixels) group_for(p).pixels.push_back(p);
        for (const Touch& t : touches) {
            auto& olds = group_for(t.pixel).olds;
            if (std::none_of(olds.begin(), olds.end(), [&](const auto& o) { return o.first == t.node; })) {
                olds.emplace_back(t.node, t.size);
            }
        }

        for (Group& g : groups) {
            const std::size_t root = uf.find(g.pixels.front());
            if (g.olds.empty()) {
                WorkNode w;
                w.node.leaf = true;
                w.node.birth = pass.level;
                w.birth_pass = pi;
                w.node.representative = *std::min_element(g.pixels.begin(), g.pixels.end(),
                                                          [&](PixelIndex a, PixelIndex b) { return better_rep(density, a, b); });
                comp_node[root] = static_cast<int>(work.size());
                work.push_back(std::move(w));
                continue;
            }

            std::sort(g.olds.begin(), g.olds.end());
            std::vector<int> significant;
            for (const auto& [node, size] : g.olds) {
                if (!(work[node].node.leaf && size < options.min_core_size)) significant.push_back(node);
            }
            int survivor = -1;
            if (significant.size() >= 2) {
                WorkNode w;
                w.node.birth = pass.level;
                w.birth_pass = pi;
                w.node.children = significant;
                w.node.representative = work[significant.front()].node.representative;
                const int id = static_cast<int>(work.size());
                for (int c : significant) {
                    work[c].node.parent = id;
                    work[c].node.merge = pass.level;
                    work[c].merge_pass = pi;
                    if (better_rep(density, work[c].node.representative, w.node.representative)) {
                        w.node.representative = work[c].node.representative;
                    }
                }
                work.push_back(std::move(w));
                survivor = id;
            } else if (significant.size() == 1) {
                survivor = significant.front();
            } else {
                // Only undersized leaves meet: the earliest-born one carries on.
                survivor = g.olds.front().first;
                for (const auto& [node, size] : g.olds) {
                    const TreeNode& a = work[node].node;
                    const TreeNode& b = work[survivor].node;
                    if (a.birth > b.birth || (a.birth == b.birth && a.representative < b.representative)) survivor = node;
                }
            }
            for (const auto& [node, size] : g.olds) {
                if (node != survivor && std::find(significant.begin(), significant.end(), node) == significant.end()) {
                    work[node].pruned = true;
                }
            }
            comp_node[root] = survivor;
        }
    }

    const int root_work = comp_node[uf.find(0)];
    work[root_work].node.merge = 0.0;
    work[root_work].merge_pass = passes.size();

    // Compact away pruned leaves, keeping creation order.
    std::vector<int> new_id(work.size(), -1);
    ClusterTree tree;
    tree.width = density.width;
    tree.height = density.height;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i].pruned) continue;
        new_id[i] = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(work[i].node);
    }
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (new_id[i] < 0) continue;
        TreeNode& node = tree.nodes[new_id[i]];
        node.id = new_id[i];
        if (node.parent >= 0) node.parent = new_id[node.parent];
        for (int& c : node.children) c = new_id[c];
        node.birth_mass = active_after[work[i].birth_pass] / nn;
        node.mass = work[i].merge_pass < passes.size() ? active_after[work[i].merge_pass] / nn : 1.0;
    }
    tree.root = new_id[root_work];
    std::vector<std::size_t> old_id(tree.nodes.size());
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (new_id[i] >= 0) old_id[new_id[i]] = i;
    }

    // Leaf labels: higher birth first, then lower representative index.
    for (const TreeNode& node : tree.nodes) {
        if (node.leaf) tree.leaves.push_back(node.id);
    }
    std::sort(tree.leaves.begin(), tree.leaves.end(), [&](int a, int b) {
        const TreeNode& x = tree.nodes[a];
        const TreeNode& y = tree.nodes[b];
        if (x.birth != y.birth) return x.birth > y.birth;
        return x.representative < y.representative;
    });

    // Core = component of the representative among pixels active before the merge pass.
    std::vector<PixelIndex> stack;
    std::vector<std::uint8_t> seen(n, 0);
    for (std::size_t m = 0; m < tree.leaves.size(); ++m) {
        TreeNode& leaf = tree.nodes[tree.leaves[m]];
        leaf.label = static_cast<int>(m) + 1;
        const std::size_t merge_pass = work[old_id[leaf.id]].merge_pass;
        stack.assign(1, leaf.representative);
        seen[leaf.representative] = 1;
        while (!stack.empty()) {
            const PixelIndex p = stack.back();
            stack.pop_back();
            leaf.core.push_back(p);
            for_each_neighbor4(p, density.width, density.height, [&](PixelIndex q) {
                if (!seen[q] && pass_of[q] < merge_pass) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            });
        }
        std::sort(leaf.core.begin(), leaf.core.end());
    }
    return tree;
}

LabelMap extract_cores(const ClusterTree& tree) {
    LabelMap labels(tree.width, tree.height, 0);
    for (int id : tree.leaves) {
        const TreeNode& leaf = tree.nodes[id];
        for (PixelIndex p : leaf.core) labels[p] = leaf.label;
    }
    return labels;
}

namespace {

std::vector<std::set<int>> descendant_labels(const ClusterTree& tree) {
    std::vector<std::set<int>> out(tree.nodes.size());
    // Children are created before parents, so ascending id order is a valid post-order.
    for (const TreeNode& node : tree.nodes) {
        if (node.leaf) out[node.id].insert(node.label);
        for (int c : node.children) out[node.id].insert(out[c].begin(), out[c].end());
    }
    return out;
}

}  // namespace

bool same_topology(const ClusterTree& a, const ClusterTree& b) {
    if (a.width != b.width || a.height != b.height || a.mode_count() != b.mode_count()) return false;
    if (a.nodes.size() != b.nodes.size()) return false;
    for (int m = 1; m <= a.mode_count(); ++m) {
        if (a.leaf(m).representative != b.leaf(m).representative || a.leaf(m).core != b.leaf(m).core) return false;
    }
    auto structure = [](const ClusterTree& t) {
        const auto sets = descendant_labels(t);
        std::map<std::set<int>, std::set<int>> parent_of;
        for (const TreeNode& node : t.nodes) {
            parent_of[sets[node.id]] = node.parent >= 0 ? sets[node.parent] : std::set<int>{};
        }
        return parent_of;
    };
    return structure(a) == structure(b);
}

namespace {

nlohmann::json node_common(const TreeNode& node) {
    nlohmann::json j;
    j["id"] = node.id;
    j["parent"] = node.parent;
    j["children"] = node.children;
    j["leaf"] = node.leaf;
    if (node.leaf) {
        j["label"] = node.label;
        j["core_size"] = node.core.size();
    }
    j["representative"] = node.representative;
    return j;
}

}  // namespace

std::string tree_to_json(const ClusterTree& tree) {
    nlohmann::json j;
    j["width"] = tree.width;
    j["height"] = tree.height;
    j["root"] = tree.root;
    j["modes"] = tree.mode_count();
    j["nodes"] = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
        auto n = node_common(node);
        n["birth_level"] = node.birth;
        n["merge_level"] = node.merge;
        n["birth_mass"] = node.birth_mass;
        n["mass"] = node.mass;
        j["nodes"].push_back(std::move(n));
    }
    return j.dump(2);
}

std::string tree_probability_view(const ClusterTree& tree) {
    nlohmann::json j;
    j["root"] = tree.root;
    j["modes"] = tree.mode_count();
    j["nodes"] = nlohmann::json::array();
    for (const TreeNode& node : tree.nodes) {
        auto n = node_common(node);
        n["mass_top"] = node.birth_mass;
        n["mass"] = node.mass;
        j["nodes"].push_back(std::move(n));
    }
    return j.dump(2);
}

std::string tree_to_dot(const ClusterTree& tree) {
    std::ostringstream out;
    out << "digraph cluster_tree {\n  node [shape=box];\n";
    for (const TreeNode& node : tree.nodes) {
        out << "  n" << node.id << " [label=\"";
        if (node.leaf) out << "segment " << node.label << "\\n";
        out << "birth " << node.birth << "\\nmerge " << node.merge << "\\nmass " << node.mass << "\"];\n";
    }
    for (const TreeNode& node : tree.nodes) {
        for (int c : node.children) out << "  n" << node.id << " -> n" << c << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace npseg
