#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "npseg/baselines.hpp"
#include "npseg/error.hpp"
#include "npseg/evaluation.hpp"
#include "npseg/image_io.hpp"
#include "npseg/levelset.hpp"
#include "npseg/pipeline.hpp"
#include "npseg/synth.hpp"

using namespace npseg;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kDegenerate = 4 };

struct PipelineFlags {
    std::string kernel = "gaussian";
    double h_mult = 1.0;
    std::vector<double> h;
    int blur = 0;
    std::string density = "color";
    std::string policy = "leave";
    std::size_t min_core = 1;
    std::string levels = "exact";
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--kernel", f.kernel, "gaussian | uniform")
        ->check(CLI::IsMember({"gaussian", "normal", "uniform"}))
        ->capture_default_str();
    auto* mult = cmd->add_option("--h-mult", f.h_mult, "bandwidth multiplier on h_N")->capture_default_str();
    cmd->add_option("--h", f.h, "explicit per-channel bandwidth, e.g. 0.05,0.05,0.05")
        ->delimiter(',')
        ->excludes(mult);
    cmd->add_option("--blur", f.blur, "neighbourhood-mean radius applied first")->check(CLI::NonNegativeNumber);
    cmd->add_option("--density", f.density, "color | joint")->check(CLI::IsMember({"color", "joint"}));
    cmd->add_option("--policy", f.policy, "leftover policy: leave | force | new")
        ->check(CLI::IsMember({"leave", "force", "new"}))
        ->capture_default_str();
    cmd->add_option("--min-core", f.min_core, "drop leaves smaller than this (1 = off)")->check(CLI::PositiveNumber);
    cmd->add_option("--levels", f.levels, "exact | eps:<real>")->capture_default_str();
}

PipelineConfig to_config(const PipelineFlags& f) {
    PipelineConfig c;
    c.kernel = parse_kernel(f.kernel);
    c.multiplier = f.h_mult;
    if (!f.h.empty()) c.explicit_h = f.h;
    c.blur_radius = f.blur;
    c.density = f.density == "joint" ? DensityMode::Joint : DensityMode::Color;
    c.min_core_size = f.min_core;
    if (f.policy == "force") {
        c.policy.leftover = LeftoverPolicy::ForceHighestDensity;
    } else if (f.policy == "new") {
        c.policy.leftover = LeftoverPolicy::NewSegment;
    }
    if (f.levels == "exact") {
        c.grid = SweepGrid::exact();
    } else if (f.levels.rfind("eps:", 0) == 0) {
        double eps = 0.0;
        try {
            eps = std::stod(f.levels.substr(4));
        } catch (const std::exception&) {
            throw InvalidArgument("bad --levels value: " + f.levels);
        }
        if (!(eps > 0.0)) throw InvalidArgument("--levels eps must be positive");
        c.grid = SweepGrid::step(eps);
    } else {
        throw InvalidArgument("--levels must be exact or eps:<real>");
    }
    return c;
}

// Fixed palette; label 0 is black, labels cycle through the rest.
constexpr std::array<std::array<double, 3>, 12> kPalette = {{
    {0.90, 0.10, 0.10}, {0.10, 0.60, 0.90}, {0.95, 0.80, 0.10}, {0.20, 0.75, 0.25},
    {0.60, 0.25, 0.80}, {1.00, 0.50, 0.00}, {0.00, 0.80, 0.80}, {0.90, 0.40, 0.70},
    {0.55, 0.35, 0.15}, {0.60, 0.60, 0.60}, {0.70, 0.90, 0.30}, {0.20, 0.20, 0.60},
}};

Image render_labels(const LabelMap& labels) {
    Image out(labels.width, labels.height, 3);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] <= 0) continue;
        const auto& c = kPalette[(labels[p] - 1) % kPalette.size()];
        for (int j = 0; j < 3; ++j) out.data()[p * 3 + j] = c[j];
    }
    return out;
}

Image render_mask(int w, int h, const std::vector<std::uint8_t>& mask) {
    Image out(w, h, 1);
    for (std::size_t p = 0; p < mask.size(); ++p) out.data()[p] = mask[p] ? 1.0 : 0.0;
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

int cmd_segment(const std::string& input, const PipelineFlags& flags, const std::string& out,
                const std::string& tree_json, const std::string& confidence_csv, const std::string& density_csv) {
    const Image image = load_image(input);
    const PipelineResult r = run_pipeline(image, to_config(flags));
    save_image(render_labels(r.labels()), out);
    if (!tree_json.empty()) write_text(tree_json, tree_to_json(r.tree));
    if (!confidence_csv.empty()) write_confidence_csv(r.labels(), r.allocation.confidence, confidence_csv);
    if (!density_csv.empty()) write_density_csv(r.density, density_csv);

    json summary{{"width", image.width()},
                 {"height", image.height()},
                 {"channels", image.channels()},
                 {"bandwidth", r.bandwidth.color},
                 {"modes", r.tree.mode_count()},
                 {"segments", count_segments(r.labels())},
                 {"rounds", r.allocation.rounds},
                 {"unallocated", r.allocation.leftover_count}};
    std::cout << summary.dump() << "\n";
    return kOk;
}

int cmd_contours(const std::string& input, const PipelineFlags& flags, std::optional<double> level,
                 double quantile, const std::string& out) {
    const Image image = load_image(input);
    const PipelineConfig config = to_config(flags);
    const Image smoothed = box_blur(image, config.blur_radius);
    const Bandwidth bw = resolve_bandwidth(smoothed, config);
    const DensityField f = config.density == DensityMode::Joint ? joint_density(smoothed, config.kernel, bw)
                                                                : color_density(smoothed, config.kernel, bw);
    const double lambda = level ? *level : density_quantile_level(f, quantile);
    const double top = *std::max_element(f.values.begin(), f.values.end());
    if (lambda > top) std::cerr << "warning: level " << lambda << " exceeds the maximum density " << top << "\n";
    const LevelSetMask mask = upper_level_set(f, lambda);
    const auto edges = level_set_boundary(mask);
    save_image(render_mask(f.width, f.height, edges), out);

    std::size_t count = 0;
    for (auto e : edges) count += e;
    std::cout << json{{"level", lambda}, {"edge_pixels", count}}.dump() << "\n";
    return kOk;
}

int cmd_simulate(const std::vector<std::string>& settings, const std::vector<std::string>& kernels,
                 const std::vector<double>& mults, int reps, std::uint64_t seed, std::size_t min_core,
                 bool unallocated_class, const std::string& out, const std::string& out_json) {
    std::vector<SettingId> ids;
    for (const auto& s : settings) {
        if (s == "all") {
            for (const auto& id : all_settings()) ids.push_back(id);
        } else {
            ids.push_back(SettingId::parse(s));
        }
    }
    MonteCarloOptions opts;
    opts.min_core_size = min_core;
    opts.unallocated_as_class = unallocated_class;

    std::vector<SimSummary> results;
    for (const auto& id : ids) {
        for (const auto& k : kernels) {
            for (double m : mults) {
                results.push_back(run_monte_carlo(id, parse_kernel(k), m, reps, seed, opts));
                const auto& s = results.back();
                std::fprintf(stderr, "%s %-8s %.2f  ARI %.3f (%.3f)  segments %.2f (%.2f)\n", s.setting.c_str(),
                             s.kernel.c_str(), s.multiplier, s.ari_mean, s.ari_sd, s.nseg_mean, s.nseg_sd);
            }
        }
    }
    if (!out.empty()) {
        write_results(results, out);
    } else {
        std::cout << "setting,kernel,multiplier,reps,ari_mean,ari_sd,nseg_mean,nseg_sd,seed\n";
        for (const auto& s : results) {
            std::printf("%s,%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%llu\n", s.setting.c_str(), s.kernel.c_str(),
                        s.multiplier, s.reps, s.ari_mean, s.ari_sd, s.nseg_mean, s.nseg_sd,
                        static_cast<unsigned long long>(s.seed));
        }
    }
    if (!out_json.empty()) write_results_json(results, out_json);
    return kOk;
}

int cmd_synth(const std::string& setting, std::uint64_t seed, std::optional<double> sigma, const std::string& out,
              const std::string& truth_out) {
    SynthConfig config;
    config.seed = seed;
    config.sigma_override = sigma;
    const SettingId id = SettingId::parse(setting);
    const SyntheticImage s = generate(id, config);
    save_image(s.image, out);
    if (!truth_out.empty()) save_image(render_labels(s.truth), truth_out);
    std::cerr << describe_setting(id, config) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric (modal) image segmentation"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    // segment
    auto* seg = app.add_subcommand("segment", "segment an image by density level sets");
    std::string seg_in, seg_out, tree_json, conf_csv, dens_csv;
    PipelineFlags seg_flags;
    seg->add_option("input", seg_in, "PNG, PGM or PPM")->required()->check(CLI::ExistingFile);
    seg->add_option("--out", seg_out, "label PNG (0 = black)")->required();
    seg->add_option("--tree-json", tree_json, "write the cluster tree as JSON");
    seg->add_option("--confidence-csv", conf_csv, "write per-pixel segment confidences");
    seg->add_option("--density-csv", dens_csv, "write the density field");
    add_pipeline_flags(seg, seg_flags);

    // contours
    auto* con = app.add_subcommand("contours", "boundary of a density upper level set");
    std::string con_in, con_out;
    PipelineFlags con_flags;
    std::optional<double> con_level;
    double con_quantile = 0.1;
    con->add_option("input", con_in)->required()->check(CLI::ExistingFile);
    con->add_option("--out", con_out, "binary edge PNG")->required();
    auto* lvl = con->add_option("--level", con_level, "explicit density level");
    con->add_option("--quantile", con_quantile, "density quantile used as the level")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(lvl)
        ->capture_default_str();
    add_pipeline_flags(con, con_flags);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo benchmark on the synthetic settings");
    std::vector<std::string> sim_settings{"A1"}, sim_kernels{"gaussian"};
    std::vector<double> sim_mults{1.0};
    int sim_reps = 100;
    std::uint64_t sim_seed = 0;
    std::size_t sim_min_core = 1;
    bool sim_unalloc = false;
    std::string sim_out, sim_json;
    sim->add_option("--setting", sim_settings, "A1..D3 or all")->delimiter(',')->capture_default_str();
    sim->add_option("--kernel", sim_kernels, "gaussian,uniform")->delimiter(',')->capture_default_str();
    sim->add_option("--h-mult", sim_mults, "multipliers, e.g. 0.75,1,1.25")->delimiter(',')->capture_default_str();
    sim->add_option("--reps", sim_reps)->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--seed", sim_seed)->required();
    sim->add_option("--min-core", sim_min_core)->check(CLI::PositiveNumber);
    sim->add_flag("--unallocated-class", sim_unalloc, "leave leftovers unallocated and score 0 as a class");
    sim->add_option("--out", sim_out, "CSV path (stdout if omitted)");
    sim->add_option("--json", sim_json, "also write JSON");

    // baseline
    auto* base = app.add_subcommand("baseline", "otsu | kmeans | sobel");
    std::string base_method, base_in, base_out;
    int km_k = 2, km_restarts = 10;
    std::optional<std::uint64_t> base_seed;
    double sobel_q = 0.9;
    base->add_option("method", base_method)->required()->check(CLI::IsMember({"otsu", "kmeans", "sobel"}));
    base->add_option("input", base_in)->required()->check(CLI::ExistingFile);
    base->add_option("--out", base_out)->required();
    base->add_option("--k", km_k, "k-means clusters")->check(CLI::PositiveNumber);
    base->add_option("--restarts", km_restarts)->check(CLI::PositiveNumber);
    base->add_option("--seed", base_seed, "required for kmeans");
    base->add_option("--quantile", sobel_q, "sobel edge quantile")->check(CLI::Range(0.0, 1.0));

    // synth
    auto* syn = app.add_subcommand("synth", "draw one synthetic image");
    std::string syn_setting, syn_out, syn_truth;
    std::uint64_t syn_seed = 0;
    std::optional<double> syn_sigma;
    syn->add_option("--setting", syn_setting, "A1..D3")->required();
    syn->add_option("--seed", syn_seed)->required();
    syn->add_option("--sigma", syn_sigma, "override the noise sd (0 = nominal pattern)");
    syn->add_option("--out", syn_out)->required();
    syn->add_option("--truth", syn_truth, "ground-truth label PNG");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*seg) return cmd_segment(seg_in, seg_flags, seg_out, tree_json, conf_csv, dens_csv);
        if (*con) return cmd_contours(con_in, con_flags, con_level, con_quantile, con_out);
        if (*sim) {
            return cmd_simulate(sim_settings, sim_kernels, sim_mults, sim_reps, sim_seed, sim_min_core, sim_unalloc,
                                sim_out, sim_json);
        }
        if (*syn) return cmd_synth(syn_setting, syn_seed, syn_sigma, syn_out, syn_truth);
        if (*base) {
            const Image image = load_image(base_in);
            if (base_method == "otsu") {
                const OtsuResult r = otsu(image);
                save_image(render_labels(r.labels), base_out);
                std::cout << json{{"threshold", r.threshold}, {"degenerate", r.degenerate}}.dump() << "\n";
            } else if (base_method == "kmeans") {
                if (!base_seed) {
                    std::cerr << "error: kmeans needs --seed\n";
                    return kUsage;
                }
                const KMeansResult r = kmeans(image, {km_k, km_restarts, 300, *base_seed});
                save_image(render_labels(r.labels), base_out);
                std::cout << json{{"wcss", r.wcss}, {"iterations", r.iterations}, {"restarts", km_restarts}}.dump()
                          << "\n";
            } else {
                const EdgeMap e = sobel(image, sobel_q);
                save_image(render_mask(e.width, e.height, e.edges), base_out);
                std::cout << json{{"threshold", e.threshold}}.dump() << "\n";
            }
            return kOk;
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
