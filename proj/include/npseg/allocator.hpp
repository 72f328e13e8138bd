#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "npseg/density.hpp"
#include "npseg/image.hpp"
#include "npseg/kernel.hpp"

namespace npseg {

/// What happens to pixels that are still unallocated when no further adjacent
/// assignment is possible.
enum class LeftoverPolicy { LeaveUnallocated, ForceHighestDensity, NewSegment };

struct AllocationPolicy {
    /// false: return the cores untouched (every non-core pixel keeps label 0).
    bool classify = true;
    LeftoverPolicy leftover = LeftoverPolicy::LeaveUnallocated;
    /// Literal in-place updates in row-major order instead of synchronous rounds.
    bool sequential = false;
    /// Nonzero: shuffle the per-round visiting order with this seed. Synchronous rounds
    /// must not depend on it; the knob exists so tests can check that.
    std::uint64_t visit_seed = 0;
};

/// Per-pixel segment-density shares f_m / sum_m f_m, row-major n x segments.
struct Confidence {
    int segments = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> flagged;  // all f_m were zero; the row is uniform 1/segments

    bool empty() const noexcept { return values.empty(); }
    std::span<const double> row(PixelIndex p) const noexcept {
        return {values.data() + p * segments, static_cast<std::size_t>(segments)};
    }
};

struct AllocationResult {
    LabelMap labels;
    Confidence confidence;
    int rounds = 0;
    /// 0 for core pixels, r >= 1 when allocated in main-loop round r, -1 for pixels
    /// left over after the loop (whatever the leftover policy did with them).
    std::vector<int> round_assigned;
    std::size_t leftover_count = 0;
};

/// Grows the segment cores: each unallocated pixel goes to the segment m maximising
///   f_m(z) = sum over pixels c labelled m of prod_j K((z_j - z_cj) / h_j)
/// but only if one of its 4-neighbours already carries m. Rounds repeat until every
/// pixel is labelled or a round assigns nothing; the remainder is handled by
/// policy.leftover. Argmax ties go to the smaller label.
///
/// Confidence rows are the normalised f_m used for the decision for pixels assigned by
/// argmax (main loop and ForceHighestDensity), and are computed against the final
/// labels for every other pixel.
AllocationResult classify_unallocated(const Image& image, const LabelMap& cores, KernelKind kernel,
                                      const Bandwidth& bw, const AllocationPolicy& policy = {});

/// Normalised segment densities of every pixel against the given labels (label-0
/// pixels contribute nothing).
Confidence confidence_of(const Image& image, const LabelMap& labels, KernelKind kernel, const Bandwidth& bw);

void write_confidence_csv(const LabelMap& labels, const Confidence& confidence, const std::filesystem::path& path);

}  // namespace npseg
