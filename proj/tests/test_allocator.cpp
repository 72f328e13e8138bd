#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "npseg/allocator.hpp"
#include "npseg/density.hpp"
#include "npseg/levelset.hpp"
#include "test_util.hpp"

using namespace npseg;

namespace {

const Bandwidth kH05{{0.05}, std::nullopt};

std::vector<int> allocate(std::vector<double> z, std::vector<int> cores, LeftoverPolicy lp) {
    const int w = static_cast<int>(z.size());
    LabelMap c(w, 1);
    c.labels = std::move(cores);
    AllocationPolicy policy;
    policy.leftover = lp;
    return classify_unallocated(Image(w, 1, 1, std::move(z)), c, KernelKind::Gaussian, kH05, policy).labels.labels;
}

struct Instance {
    Image image;
    LabelMap cores;
    Bandwidth bw;
};

Instance random_instance(Rng& rng) {
    const int w = 3 + static_cast<int>(rng.below(8)), h = 3 + static_cast<int>(rng.below(8));
    Instance in{testutil::random_image(rng, w, h, rng.below(2) ? 3 : 1, 12), LabelMap(w, h), {}};
    const int m = 1 + static_cast<int>(rng.below(4));
    for (int label = 1; label <= m; ++label) {
        const std::size_t p = rng.below(in.cores.size());
        if (in.cores[p]) continue;
        in.cores[p] = label;
        for_each_neighbor4(p, w, h, [&](std::size_t q) {
            if (!in.cores[q] && rng.below(2)) in.cores[q] = label;
        });
    }
    if (in.cores.max_label() == 0) in.cores[0] = 1;
    in.cores.labels = testutil::canonical(in.cores.labels);
    in.bw = normal_reference_bandwidth(in.image);
    return in;
}

}  // namespace

TEST(Allocator, ArgmaxWithAdjacentSegment) {
    EXPECT_EQ(allocate({0.1, 0.12, 0.9}, {1, 0, 2}, LeftoverPolicy::LeaveUnallocated), (std::vector<int>{1, 1, 2}));
}

TEST(Allocator, LeftoverPolicies) {
    const std::vector<double> z{0.1, 0.9, 0.11};
    const std::vector<int> c{1, 2, 0};
    EXPECT_EQ(allocate(z, c, LeftoverPolicy::LeaveUnallocated), (std::vector<int>{1, 2, 0}));
    EXPECT_EQ(allocate(z, c, LeftoverPolicy::ForceHighestDensity), (std::vector<int>{1, 2, 1}));
    EXPECT_EQ(allocate(z, c, LeftoverPolicy::NewSegment), (std::vector<int>{1, 2, 3}));
}

TEST(Allocator, NewSegmentNumbersComponents) {
    // Two isolated runs of leftovers become segments 3 and 4.
    const std::vector<double> z{0.11, 0.9, 0.1, 0.9, 0.11, 0.12};
    const std::vector<int> c{0, 2, 1, 2, 0, 0};
    EXPECT_EQ(allocate(z, c, LeftoverPolicy::NewSegment), (std::vector<int>{3, 2, 1, 2, 4, 4}));
}

TEST(Allocator, FullCoresNeedNoRounds) {
    LabelMap cores(2, 2);
    cores.labels = {1, 1, 2, 2};
    const auto r = classify_unallocated(Image(2, 2, 1, {0.1, 0.2, 0.7, 0.8}), cores, KernelKind::Gaussian, kH05);
    EXPECT_EQ(r.labels, cores);
    EXPECT_EQ(r.rounds, 0);
    EXPECT_EQ(r.leftover_count, 0u);
}

TEST(Allocator, ClassifyFalseReturnsCores) {
    Rng rng(41);
    for (int t = 0; t < 30; ++t) {
        const Instance in = random_instance(rng);
        AllocationPolicy off;
        off.classify = false;
        EXPECT_EQ(classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw, off).labels, in.cores);
    }
}

TEST(Allocator, SpatialSoundnessAndProgress) {
    Rng rng(42);
    for (int t = 0; t < 100; ++t) {
        const Instance in = random_instance(rng);
        const int w = in.image.width(), h = in.image.height();
        for (LeftoverPolicy lp : {LeftoverPolicy::LeaveUnallocated, LeftoverPolicy::NewSegment}) {
            AllocationPolicy policy;
            policy.leftover = lp;
            const auto r = classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw, policy);
            EXPECT_LE(r.rounds, static_cast<int>(in.cores.size()));
            std::vector<int> per_round(r.rounds + 1, 0);
            for (std::size_t p = 0; p < r.labels.size(); ++p) {
                const int round = r.round_assigned[p];
                if (in.cores[p]) {
                    EXPECT_EQ(round, 0);
                    EXPECT_EQ(r.labels[p], in.cores[p]);
                }
                if (round < 1) continue;
                ++per_round[round];
                bool supported = false;
                for_each_neighbor4(p, w, h, [&](std::size_t q) {
                    supported = supported || (r.labels[q] == r.labels[p] && r.round_assigned[q] >= 0 &&
                                              r.round_assigned[q] < round);
                });
                EXPECT_TRUE(supported);
            }
            for (int k = 1; k <= r.rounds; ++k) EXPECT_GT(per_round[k], 0) << "round " << k;

            // Each of the original segments stays 4-connected.
            for (int m = 1; m <= in.cores.max_label(); ++m) {
                std::vector<std::uint8_t> mask(r.labels.size());
                for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = r.labels[p] == m;
                const auto comp = connected_components(mask, w, h);
                EXPECT_LE(*std::max_element(comp.begin(), comp.end()), 1);
            }
        }
    }
}

TEST(Allocator, LeftoversHaveNoAdjacentArgmax) {
    Rng rng(43);
    for (int t = 0; t < 60; ++t) {
        const Instance in = random_instance(rng);
        const int w = in.image.width(), h = in.image.height();
        const auto r = classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw);
        for (std::size_t p = 0; p < r.labels.size(); ++p) {
            if (r.labels[p] != 0) continue;
            const auto row = r.confidence.row(p);
            const int best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()) + 1;
            for_each_neighbor4(p, w, h, [&](std::size_t q) { EXPECT_NE(r.labels[q], best); });
        }
    }
}

TEST(Allocator, EnclosedPocketStaysUnallocated) {
    // The middle pixel has segment 1's colour but only touches segment 2, away from the border.
    LabelMap cores(4, 3);
    cores.labels = {1, 2, 2, 2, 1, 2, 0, 2, 1, 2, 2, 2};
    const Image im(4, 3, 1, {0.1, 0.9, 0.9, 0.9, 0.1, 0.9, 0.1, 0.9, 0.1, 0.9, 0.9, 0.9});
    const auto r = classify_unallocated(im, cores, KernelKind::Gaussian, kH05);
    EXPECT_EQ(r.labels[6], 0);
    EXPECT_EQ(r.leftover_count, 1u);
}

TEST(Allocator, RoundsIgnoreVisitOrder) {
    Rng rng(44);
    for (int t = 0; t < 30; ++t) {
        const Instance in = random_instance(rng);
        AllocationPolicy shuffled;
        shuffled.visit_seed = 1000 + t;
        const auto a = classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw);
        const auto b = classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw, shuffled);
        EXPECT_EQ(a.labels, b.labels);
        EXPECT_EQ(a.round_assigned, b.round_assigned);
    }
}

TEST(Allocator, SequentialModeStillSound) {
    Rng rng(45);
    for (int t = 0; t < 30; ++t) {
        const Instance in = random_instance(rng);
        AllocationPolicy seq;
        seq.sequential = true;
        const auto r = classify_unallocated(in.image, in.cores, KernelKind::Gaussian, in.bw, seq);
        for (std::size_t p = 0; p < r.labels.size(); ++p) {
            if (in.cores[p]) EXPECT_EQ(r.labels[p], in.cores[p]);
        }
    }
}

TEST(Confidence, SingleSegmentIsCertain) {
    LabelMap cores(3, 1);
    cores.labels = {1, 0, 0};
    const auto r = classify_unallocated(Image(3, 1, 1, {0.2, 0.3, 0.9}), cores, KernelKind::Gaussian, kH05);
    ASSERT_EQ(r.confidence.segments, 1);
    for (double v : r.confidence.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Confidence, UniformSmallBandwidth) {
    LabelMap labels(3, 1);
    labels.labels = {1, 2, 2};
    const Confidence c = confidence_of(Image(3, 1, 1, {0.1, 0.5, 0.9}), labels, KernelKind::Uniform,
                                       {{0.05}, std::nullopt});
    EXPECT_EQ(c.row(0)[0], 1.0);
    EXPECT_EQ(c.row(0)[1], 0.0);
    EXPECT_EQ(c.row(1)[1], 1.0);
}

TEST(Confidence, RowsSumToOne) {
    Rng rng(46);
    for (int t = 0; t < 40; ++t) {
        const Instance in = random_instance(rng);
        for (KernelKind kind : {KernelKind::Gaussian, KernelKind::Uniform}) {
            AllocationPolicy force;
            force.leftover = LeftoverPolicy::ForceHighestDensity;
            const auto r = classify_unallocated(in.image, in.cores, kind, in.bw, force);
            ASSERT_EQ(r.confidence.segments, r.labels.max_label());
            for (std::size_t p = 0; p < r.labels.size(); ++p) {
                const auto row = r.confidence.row(p);
                EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
            }
        }
    }
}

TEST(Confidence, CsvHeader) {
    LabelMap labels(2, 1);
    labels.labels = {1, 2};
    const Confidence c = confidence_of(Image(2, 1, 1, {0.1, 0.9}), labels, KernelKind::Gaussian, kH05);
    const auto path = testutil::scratch_dir() / "conf.csv";
    write_confidence_csv(labels, c, path);
    const auto bytes = testutil::read_bytes(path);
    const std::string text(bytes.begin(), bytes.end());
    EXPECT_EQ(text.substr(0, text.find('\n')), "pixel,x,y,label,conf_1,conf_2,flagged");
}
