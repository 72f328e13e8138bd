#include "npseg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "npseg/pipeline.hpp"
#include "npseg/rng.hpp"

namespace npseg {
namespace {

double choose2(std::int64_t k) { return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1); }

const char* const kCsvHeader = "setting,kernel,multiplier,reps,ari_mean,ari_sd,nseg_mean,nseg_sd,seed";

}  // namespace

Contingency contingency(const LabelMap& a, const LabelMap& b) {
    if (a.width != b.width || a.height != b.height || a.size() != b.size()) {
        throw InvalidArgument("labelings have different sizes");
    }
    std::map<int, std::size_t> rows, cols;
    for (std::size_t p = 0; p < a.size(); ++p) {
        rows.try_emplace(a[p], 0);
        cols.try_emplace(b[p], 0);
    }
    Contingency t;
    for (auto& [label, idx] : rows) {
        idx = t.row_labels.size();
        t.row_labels.push_back(label);
    }
    for (auto& [label, idx] : cols) {
        idx = t.col_labels.size();
        t.col_labels.push_back(label);
    }
    t.counts.assign(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
    t.row_sums.assign(rows.size(), 0);
    t.col_sums.assign(cols.size(), 0);
    for (std::size_t p = 0; p < a.size(); ++p) {
        const std::size_t i = rows[a[p]];
        const std::size_t j = cols[b[p]];
        ++t.counts[i][j];
        ++t.row_sums[i];
        ++t.col_sums[j];
    }
    t.total = static_cast<std::int64_t>(a.size());
    return t;
}

double adjusted_rand_index(const LabelMap& a, const LabelMap& b, bool zero_is_class) {
    if (a.size() != b.size() || a.width != b.width || a.height != b.height) {
        throw InvalidArgument("labelings have different sizes");
    }
    if (!zero_is_class) {
        const auto has_zero = [](const LabelMap& m) {
            return std::find(m.labels.begin(), m.labels.end(), 0) != m.labels.end();
        };
        if (has_zero(a) || has_zero(b)) {
            throw InvalidArgument("ARI needs fully labelled maps (label 0 present); allocate leftovers first");
        }
    }
    const Contingency t = contingency(a, b);
    double index = 0.0;
    for (const auto& row : t.counts) {
        for (std::int64_t c : row) index += choose2(c);
    }
    double sum_a = 0.0, sum_b = 0.0;
    for (std::int64_t s : t.row_sums) sum_a += choose2(s);
    for (std::int64_t s : t.col_sums) sum_b += choose2(s);
    const double pairs = choose2(t.total);
    const double expected = pairs > 0.0 ? sum_a * sum_b / pairs : 0.0;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        // Both partitions trivial in the same way (all-one-class or all-singletons).
        return index == max_index ? 1.0 : 0.0;
    }
    return (index - expected) / denom;
}

int count_segments(const LabelMap& labels) {
    std::vector<int> seen;
    for (int l : labels.labels) {
        if (l > 0) seen.push_back(l);
    }
    std::sort(seen.begin(), seen.end());
    return static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

std::pair<double, double> mean_sd(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<ReplicateResult> run_replicates(const SettingId& setting, KernelKind kernel, double multiplier,
                                            int reps, std::uint64_t seed, const MonteCarloOptions& options) {
    if (reps < 1) throw InvalidArgument("replicate count must be at least 1");

    PipelineConfig config;
    config.kernel = kernel;
    config.multiplier = multiplier;
    config.min_core_size = options.min_core_size;
    config.policy.classify = true;
    config.policy.leftover =
        options.unallocated_as_class ? LeftoverPolicy::LeaveUnallocated : LeftoverPolicy::ForceHighestDensity;

    std::vector<ReplicateResult> results(reps);
    std::vector<std::exception_ptr> errors(reps);
    auto run_one = [&](int r) {
        try {
            SynthConfig synth = options.synth;
            synth.seed = substream_seed(seed, static_cast<std::uint64_t>(r));
            const SyntheticImage sample = generate(setting, synth);
            const PipelineResult out = run_pipeline(sample.image, config);
            results[r].ari = adjusted_rand_index(out.labels(), sample.truth, options.unallocated_as_class);
            results[r].segments = count_segments(out.labels());
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));
    if (threads <= 1) {
        for (int r = 0; r < reps; ++r) run_one(r);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int r = static_cast<int>(t); r < reps; r += static_cast<int>(threads)) run_one(r);
            });
        }
    }

    for (int r = 0; r < reps; ++r) {
        if (!errors[r]) continue;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const std::exception& e) {
            throw std::runtime_error("replicate " + std::to_string(r) + " of " + setting.name() + ": " + e.what());
        }
    }
    return results;
}

SimSummary run_monte_carlo(const SettingId& setting, KernelKind kernel, double multiplier, int reps,
                           std::uint64_t seed, const MonteCarloOptions& options) {
    const auto results = run_replicates(setting, kernel, multiplier, reps, seed, options);
    std::vector<double> ari, nseg;
    for (const auto& r : results) {
        ari.push_back(r.ari);
        nseg.push_back(r.segments);
    }
    SimSummary s;
    s.setting = setting.name();
    s.kernel = std::string(to_string(kernel));
    s.multiplier = multiplier;
    s.reps = reps;
    std::tie(s.ari_mean, s.ari_sd) = mean_sd(ari);
    std::tie(s.nseg_mean, s.nseg_sd) = mean_sd(nseg);
    s.seed = seed;
    return s;
}

void write_results(const std::vector<SimSummary>& summaries, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out.precision(17);
    out << kCsvHeader << '\n';
    for (const auto& s : summaries) {
        out << s.setting << ',' << s.kernel << ',' << s.multiplier << ',' << s.reps << ',' << s.ari_mean << ','
            << s.ari_sd << ',' << s.nseg_mean << ',' << s.nseg_sd << ',' << s.seed << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

std::vector<SimSummary> read_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw DataError(path.string() + ": unexpected results header");
    std::vector<SimSummary> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 9) throw DataError(path.string() + ": malformed results row");
        SimSummary s;
        try {
            s.setting = cells[0];
            s.kernel = cells[1];
            s.multiplier = std::stod(cells[2]);
            s.reps = std::stoi(cells[3]);
            s.ari_mean = std::stod(cells[4]);
            s.ari_sd = std::stod(cells[5]);
            s.nseg_mean = std::stod(cells[6]);
            s.nseg_sd = std::stod(cells[7]);
            s.seed = std::stoull(cells[8]);
        } catch (const std::logic_error&) {
            throw DataError(path.string() + ": malformed number in results row");
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_results_json(const std::vector<SimSummary>& summaries, const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : summaries) {
        j.push_back({{"setting", s.setting},
                     {"kernel", s.kernel},
                     {"multiplier", s.multiplier},
                     {"reps", s.reps},
                     {"ari_mean", s.ari_mean},
                     {"ari_sd", s.ari_sd},
                     {"nseg_mean", s.nseg_mean},
                     {"nseg_sd", s.nseg_sd},
                     {"seed", s.seed}});
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace npseg
