#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "npseg/error.hpp"
#include "npseg/rng.hpp"
#include "npseg/image.hpp"
#include "npseg/synth.hpp"

using namespace npseg;

TEST(Rng, SplitMixReference) {
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
    EXPECT_NE(substream_seed(42, 0), substream_seed(42, 1));
    EXPECT_NE(substream_seed(42, 0), substream_seed(43, 0));
    EXPECT_EQ(substream_seed(42, 7), substream_seed(42, 7));
}

TEST(Rng, Mt19937Reference) {
    // The 10000th output of a default-seeded mt19937_64 is fixed by the C++ standard.
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next();
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, InverseNormalCdf) {
    EXPECT_EQ(inverse_normal_cdf(0.5), 0.0);
    EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-15);
    EXPECT_NEAR(inverse_normal_cdf(0.025), -1.959963984540054, 1e-15);
    EXPECT_NEAR(inverse_normal_cdf(1e-10), -6.361340902404056, 1e-13);
    EXPECT_NEAR(inverse_normal_cdf(0.8413447460685429), 1.0, 1e-13);
}

TEST(Rng, UniformAndBelow) {
    Rng rng(1);
    std::map<std::uint64_t, int> hist;
    for (int i = 0; i < 7000; ++i) {
        const double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        ++hist[rng.below(7)];
    }
    ASSERT_EQ(hist.size(), 7u);
    for (const auto& [k, n] : hist) EXPECT_NEAR(n, 1000, 150);
}

TEST(Setting, ParseAndNames) {
    EXPECT_EQ(SettingId::parse("C2"), (SettingId{'C', 2}));
    EXPECT_EQ(SettingId::parse("b3").name(), "B3");
    EXPECT_THROW(SettingId::parse("E1"), InvalidArgument);
    EXPECT_THROW(SettingId::parse("A4"), InvalidArgument);
    EXPECT_EQ(all_settings().size(), 12u);
    EXPECT_EQ(SettingId::parse("A1").true_segments(), 2);
    EXPECT_EQ(SettingId::parse("B1").true_segments(), 9);
    EXPECT_EQ(SettingId::parse("D1").true_segments(), 3);
    EXPECT_EQ(SettingId::parse("C3").true_segments(), 2);
}

TEST(Synth, A1Areas) {
    SynthConfig config;
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        config.seed = seed;
        const SyntheticImage s = generate(SettingId::parse("A1"), config);
        std::map<int, int> area;
        for (int l : s.truth.labels) ++area[l];
        EXPECT_EQ(area, (std::map<int, int>{{1, 240}, {2, 80}}));
    }
}

TEST(Synth, TruthCountsForEveryVariant) {
    for (const SettingId& id : all_settings()) {
        const SyntheticImage s = generate(id, {});
        std::set<int> labels(s.truth.labels.begin(), s.truth.labels.end());
        EXPECT_EQ(static_cast<int>(labels.size()), id.true_segments()) << id.name();
        EXPECT_EQ(*labels.begin(), 1);
        EXPECT_EQ(s.image.width(), 20);
        EXPECT_EQ(s.image.height(), 16);
    }
}

TEST(Synth, ZeroSigmaGivesNominalPattern) {
    SynthConfig config;
    config.sigma_override = 0.0;
    for (const SettingId& id : all_settings()) {
        const SyntheticImage s = generate(id, config);
        for (std::size_t p = 0; p < s.image.pixel_count(); ++p) {
            EXPECT_DOUBLE_EQ(s.image.data()[p], to_byte(s.nominal[p]) / 255.0);
        }
        if (id.variant != 2) {
            const auto nominals = setting_nominals(id.family);
            for (std::size_t p = 0; p < s.image.pixel_count(); ++p) {
                EXPECT_DOUBLE_EQ(s.nominal[p], nominals[s.truth[p] - 1]);
            }
        }
    }
}

TEST(Synth, ShadedContoursOnlyOnBorders) {
    SynthConfig config;
    config.sigma_override = 0.0;
    const SyntheticImage s = generate(SettingId::parse("A2"), config);
    const auto nominals = setting_nominals('A');
    int shaded = 0;
    for (std::size_t p = 0; p < s.image.pixel_count(); ++p) {
        bool border = false;
        for_each_neighbor4(p, 20, 16, [&](std::size_t q) { border = border || s.truth[q] != s.truth[p]; });
        if (border) {
            EXPECT_DOUBLE_EQ(s.nominal[p], 0.5);
            ++shaded;
        } else {
            EXPECT_DOUBLE_EQ(s.nominal[p], nominals[s.truth[p] - 1]);
        }
    }
    EXPECT_EQ(shaded, 32 + 36);  // inner and outer rings of the 10 x 8 rectangle
}

TEST(Synth, Deterministic) {
    SynthConfig a, b;
    a.seed = b.seed = 5;
    const SettingId id = SettingId::parse("B3");
    EXPECT_EQ(generate(id, a).image, generate(id, b).image);
    b.seed = 6;
    EXPECT_NE(generate(id, a).image, generate(id, b).image);
    EXPECT_EQ(generate(id, a).truth, generate(id, b).truth);
}

TEST(Synth, ValuesOnGridAndInRange) {
    SynthConfig config;
    config.seed = 3;
    const SyntheticImage s = generate(SettingId::parse("D3"), config);
    for (double v : s.image.data()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_DOUBLE_EQ(v, to_byte(v) / 255.0);
    }
}

TEST(Synth, SegmentMeansConverge) {
    // Foreground 0.7 and background 0.3 are far enough from 0 and 1 that clamping is negligible.
    const int reps = 200;
    double fg = 0.0, bg = 0.0;
    SynthConfig config;
    for (int r = 0; r < reps; ++r) {
        config.seed = substream_seed(8, r);
        const SyntheticImage s = generate(SettingId::parse("A1"), config);
        for (std::size_t p = 0; p < s.image.pixel_count(); ++p) (s.truth[p] == 2 ? fg : bg) += s.image.data()[p];
    }
    fg /= 80.0 * reps;
    bg /= 240.0 * reps;
    EXPECT_NEAR(fg, 0.7, 3 * 0.05 / std::sqrt(80.0 * reps) + 0.5 / 255);
    EXPECT_NEAR(bg, 0.3, 3 * 0.05 / std::sqrt(240.0 * reps) + 0.5 / 255);
}

TEST(Synth, Description) {
    EXPECT_NE(describe_setting(SettingId::parse("A1")).find("2 segments"), std::string::npos);
    EXPECT_NE(describe_setting(SettingId::parse("B3")).find("sigma 0.15"), std::string::npos);
}
