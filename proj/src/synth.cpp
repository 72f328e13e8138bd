#include "npseg/synth.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "npseg/rng.hpp"

namespace npseg {
namespace {

bool in_rect(int x, int y, int x0, int y0, int x1, int y1) { return x >= x0 && x < x1 && y >= y0 && y < y1; }

void check_family(char family) {
    if (family < 'A' || family > 'D') throw InvalidArgument(std::string("unknown setting family '") + family + "'");
}

}  // namespace

SettingId SettingId::parse(const std::string& text) {
    if (text.size() != 2) throw InvalidArgument("setting must look like A1 .. D3, got '" + text + "'");
    SettingId s{static_cast<char>(std::toupper(static_cast<unsigned char>(text[0]))), text[1] - '0'};
    check_family(s.family);
    if (s.variant < 1 || s.variant > 3) throw InvalidArgument("setting variant must be 1, 2 or 3");
    return s;
}

std::string SettingId::name() const { return std::string(1, family) + std::to_string(variant); }

int SettingId::true_segments() const {
    switch (family) {
    case 'A': return 2;
    case 'B': return 9;
    case 'C': return 2;
    case 'D': return 3;
    }
    throw InvalidArgument(std::string("unknown setting family '") + family + "'");
}

std::vector<SettingId> all_settings() {
    std::vector<SettingId> out;
    for (char f : {'A', 'B', 'C', 'D'}) {
        for (int v = 1; v <= 3; ++v) out.push_back({f, v});
    }
    return out;
}

LabelMap setting_layout(char family, int width, int height) {
    check_family(family);
    if (width != 20 || height != 16) throw InvalidArgument("synthetic layouts are defined on the 20 x 16 grid");
    LabelMap layout(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int& l = layout[static_cast<std::size_t>(y) * width + x];
            switch (family) {
            case 'A':  // 10 x 8 centred rectangle
                l = in_rect(x, y, 5, 4, 15, 12) ? 2 : 1;
                break;
            case 'B': {  // columns 7/7/6, rows 5/5/6
                const int col = x < 7 ? 0 : (x < 14 ? 1 : 2);
                const int row = y < 5 ? 0 : (y < 10 ? 1 : 2);
                l = row * 3 + col + 1;
                break;
            }
            case 'C':  // 12 x 10 block with a 4 x 7 notch opening upwards
                l = in_rect(x, y, 4, 3, 16, 13) && !in_rect(x, y, 8, 3, 12, 10) ? 2 : 1;
                break;
            case 'D':  // 2-pixel frame around a 10 x 6 inner rectangle
                if (in_rect(x, y, 5, 5, 15, 11)) {
                    l = 3;
                } else if (in_rect(x, y, 3, 3, 17, 13)) {
                    l = 2;
                } else {
                    l = 1;
                }
                break;
            }
        }
    }
    return layout;
}

std::vector<double> setting_nominals(char family) {
    switch (family) {
    case 'A': return {0.30, 0.70};
    case 'B': return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    case 'C': return {0.30, 0.70};
    case 'D': return {0.20, 0.50, 0.80};
    }
    throw InvalidArgument(std::string("unknown setting family '") + family + "'");
}

SyntheticImage generate(const SettingId& setting, const SynthConfig& config) {
    const LabelMap truth = setting_layout(setting.family, config.width, config.height);
    const auto nominals = setting_nominals(setting.family);
    const int w = truth.width;
    const int h = truth.height;

    std::vector<double> nominal(truth.size());
    for (std::size_t p = 0; p < truth.size(); ++p) nominal[p] = nominals[truth[p] - 1];

    if (setting.variant == 2) {
        // Border pixels take the mean nominal of the segments meeting there.
        for (std::size_t p = 0; p < truth.size(); ++p) {
            std::set<int> meeting{truth[p]};
            for_each_neighbor4(p, w, h, [&](PixelIndex q) { meeting.insert(truth[q]); });
            if (meeting.size() < 2) continue;
            double sum = 0.0;
            for (int l : meeting) sum += nominals[l - 1];
            nominal[p] = sum / static_cast<double>(meeting.size());
        }
    }

    const double sigma = config.sigma_override.value_or(setting.variant == 3 ? config.sigma_high : config.sigma_low);
    if (sigma < 0.0) throw InvalidArgument("noise sd must be nonnegative");

    Rng rng(config.seed);
    std::vector<double> data(truth.size());
    for (std::size_t p = 0; p < truth.size(); ++p) {
        const double draw = rng.normal(nominal[p], sigma);
        data[p] = to_byte(std::clamp(draw, 0.0, 1.0)) / 255.0;
    }
    return {Image(w, h, 1, std::move(data)), truth, std::move(nominal)};
}

std::string describe_setting(const SettingId& setting, const SynthConfig& config) {
    static const char* const kVariant[] = {"benchmark", "shaded contours", "heterogeneous colors"};
    std::ostringstream out;
    out << setting.name() << ": " << kVariant[setting.variant - 1] << ", " << setting.true_segments()
        << " segments, nominals {";
    const auto nominals = setting_nominals(setting.family);
    for (std::size_t i = 0; i < nominals.size(); ++i) out << (i ? ", " : "") << nominals[i];
    const double sigma = config.sigma_override.value_or(setting.variant == 3 ? config.sigma_high : config.sigma_low);
    out << "}, sigma " << sigma << ", " << config.width << "x" << config.height;
    return out.str();
}

}  // namespace npseg
