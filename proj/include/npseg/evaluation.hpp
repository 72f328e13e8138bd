#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "npseg/image.hpp"
#include "npseg/kernel.hpp"
#include "npseg/synth.hpp"

namespace npseg {

/// Cross-tabulation of two labelings over the same pixels.
struct Contingency {
    std::vector<int> row_labels;
    std::vector<int> col_labels;
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;
};

Contingency contingency(const LabelMap& a, const LabelMap& b);

/// Adjusted Rand Index. Both maps must be fully labelled unless zero_is_class is set,
/// in which case label 0 counts as one more class. Defined as 1 when the expected-index
/// denominator vanishes and the partitions coincide, 0 otherwise.
double adjusted_rand_index(const LabelMap& a, const LabelMap& b, bool zero_is_class = false);

/// Number of distinct positive labels.
int count_segments(const LabelMap& labels);

struct SimSummary {
    std::string setting;
    std::string kernel;
    double multiplier = 1.0;
    int reps = 0;
    double ari_mean = 0.0;
    double ari_sd = 0.0;
    double nseg_mean = 0.0;
    double nseg_sd = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const SimSummary&, const SimSummary&) = default;
};

struct MonteCarloOptions {
    SynthConfig synth{};       // seed is ignored; replicates use substream_seed(seed, r)
    std::size_t min_core_size = 1;
    bool unallocated_as_class = false;  // LeaveUnallocated + 0 as its own ARI class
    unsigned threads = 0;               // 0: hardware concurrency
};

/// Per-replicate outcome, in replicate order.
struct ReplicateResult {
    double ari = 0.0;
    int segments = 0;
};

std::vector<ReplicateResult> run_replicates(const SettingId& setting, KernelKind kernel, double multiplier,
                                            int reps, std::uint64_t seed, const MonteCarloOptions& options = {});

/// Mean and sd (n - 1 denominator, 0 for a single replicate).
std::pair<double, double> mean_sd(const std::vector<double>& values);

SimSummary run_monte_carlo(const SettingId& setting, KernelKind kernel, double multiplier, int reps,
                           std::uint64_t seed, const MonteCarloOptions& options = {});

/// CSV: setting,kernel,multiplier,reps,ari_mean,ari_sd,nseg_mean,nseg_sd,seed
void write_results(const std::vector<SimSummary>& summaries, const std::filesystem::path& path);
std::vector<SimSummary> read_results(const std::filesystem::path& path);

/// JSON mirror of the CSV content.
void write_results_json(const std::vector<SimSummary>& summaries, const std::filesystem::path& path);

}  // namespace npseg
