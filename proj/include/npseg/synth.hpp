#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "npseg/image.hpp"

namespace npseg {

/// Simulation setting: family A (two convex segments), B (3 x 3 blocks),
/// C (non-convex U shape), D (thin frame); variant 1 benchmark, 2 shaded contours,
/// 3 heterogeneous colours.
struct SettingId {
    char family = 'A';
    int variant = 1;

    static SettingId parse(const std::string& text);  // "A1" .. "D3"
    std::string name() const;
    int true_segments() const;
    friend bool operator==(const SettingId&, const SettingId&) = default;
};

/// All twelve settings, A1 .. D3.
std::vector<SettingId> all_settings();

struct SynthConfig {
    int width = 20;
    int height = 16;
    double sigma_low = 0.05;   // variants 1 and 2
    double sigma_high = 0.15;  // variant 3
    std::optional<double> sigma_override;  // replaces either sigma, e.g. 0 for the noiseless pattern
    std::uint64_t seed = 0;
};

struct SyntheticImage {
    Image image;
    LabelMap truth;
    std::vector<double> nominal;  // per pixel, after contour shading
};

/// Per-pixel segment layout of a family on the configured grid (labels 1..K).
LabelMap setting_layout(char family, int width = 20, int height = 16);

/// Nominal intensity of each truth segment, indexed by label - 1.
std::vector<double> setting_nominals(char family);

/// Draws one image: intensity = clamp(Normal(nominal, sigma^2), 0, 1), snapped to k/255.
SyntheticImage generate(const SettingId& setting, const SynthConfig& config);

std::string describe_setting(const SettingId& setting, const SynthConfig& config = {});

}  // namespace npseg
