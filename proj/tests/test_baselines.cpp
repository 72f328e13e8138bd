#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "npseg/baselines.hpp"
#include "npseg/error.hpp"
#include "test_util.hpp"

using namespace npseg;

namespace {

// Threshold maximising the between-class variance, computed from pixel codes directly.
int exhaustive_otsu(const Image& im) {
    std::vector<int> codes;
    for (double v : im.data()) codes.push_back(to_byte(v));
    const double n = static_cast<double>(codes.size());
    int best_t = 0;
    double best = -1.0;
    for (int t = 1; t <= 255; ++t) {
        double n0 = 0, s0 = 0, s1 = 0;
        for (int c : codes) (c < t ? (n0 += 1, s0) : s1) += c;
        const double n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        const double d = s0 / n0 - s1 / n1;
        const double v = (n0 / n) * (n1 / n) * d * d;
        if (v > best * (1 + 1e-12)) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

double wcss(const Image& im, const std::vector<int>& labels, int k) {
    const int c = im.channels();
    std::vector<double> sum(k * c, 0.0), cnt(k, 0.0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        cnt[labels[p]] += 1;
        for (int j = 0; j < c; ++j) sum[labels[p] * c + j] += im.pixel(p)[j];
    }
    double total = 0.0;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        for (int j = 0; j < c; ++j) {
            const double d = im.pixel(p)[j] - sum[labels[p] * c + j] / cnt[labels[p]];
            total += d * d;
        }
    }
    return total;
}

Image rotate90(const Image& im) {
    // (x, y) -> (h - 1 - y, x)
    Image out(im.height(), im.width(), im.channels());
    for (int y = 0; y < im.height(); ++y) {
        for (int x = 0; x < im.width(); ++x) out.at(im.height() - 1 - y, x) = im.at(x, y);
    }
    return out;
}

}  // namespace

TEST(Otsu, BiValued) {
    const Image im(4, 1, 1, {0, 1, 1, 0});
    const OtsuResult r = otsu(im);
    EXPECT_EQ(r.labels.labels, (std::vector<int>{1, 2, 2, 1}));
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.threshold, 1);
}

TEST(Otsu, MatchesExhaustiveScan) {
    Rng rng(51);
    for (int t = 0; t < 100; ++t) {
        const Image im = testutil::random_image(rng, 8, 7, t % 5 == 0 ? 3 : 1, t % 3 ? 256 : 4);
        const Image gray = to_grayscale(im);
        const OtsuResult r = otsu(im);
        if (r.degenerate) continue;
        EXPECT_EQ(r.threshold, exhaustive_otsu(quantize(gray)));
        for (std::size_t p = 0; p < gray.pixel_count(); ++p) {
            EXPECT_EQ(r.labels[p], to_byte(gray.data()[p]) < r.threshold ? 1 : 2);
        }
    }
}

TEST(Otsu, ShiftMovesThreshold) {
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
        Image im(6, 6, 1);
        for (double& v : im.data()) v = static_cast<double>(20 + rng.below(150)) / 255.0;
        Image shifted = im;
        for (double& v : shifted.data()) v += 40.0 / 255.0;
        shifted = quantize(shifted);
        EXPECT_EQ(otsu(shifted).threshold, otsu(im).threshold + 40);
    }
}

TEST(Otsu, ConstantImageIsDegenerate) {
    const OtsuResult r = otsu(Image(3, 3, 1, std::vector<double>(9, 0.4)));
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.labels.labels, std::vector<int>(9, 1));
}

TEST(KMeans, ExactlyKColours) {
    const Image im(3, 2, 3, {0.1, 0.1, 0.1, 0.9, 0.2, 0.2, 0.1, 0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 0.2, 0.2, 0.5, 0.5, 0.9});
    const KMeansResult r = kmeans(im, {3, 5, 300, 1});
    EXPECT_EQ(r.labels.labels, (std::vector<int>{1, 2, 1, 3, 2, 3}));
    EXPECT_NEAR(r.wcss, 0.0, 1e-15);
}

TEST(KMeans, SingleCluster) {
    const Image im(4, 1, 1, {0.1, 0.3, 0.5, 0.9});
    const KMeansResult r = kmeans(im, {1, 3, 300, 2});
    EXPECT_EQ(r.labels.labels, std::vector<int>(4, 1));
    EXPECT_NEAR(r.centroids[0], 0.45, 1e-15);
}

TEST(KMeans, MatchesBestTwoPartition) {
    Rng rng(53);
    for (int t = 0; t < 10; ++t) {
        Image im(4, 4, 1);
        for (std::size_t p = 0; p < 16; ++p) {
            const double base = rng.below(2) ? 0.25 : 0.75;
            im.data()[p] = quantize(Image(1, 1, 1, {base + 0.1 * (rng.uniform_open() - 0.5)})).data()[0];
        }
        // Brute force over every 2-partition of the pixels.
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_labels;
        for (unsigned mask = 1; mask < (1u << 15); ++mask) {
            std::vector<int> labels(16);
            for (int p = 1; p < 16; ++p) labels[p] = (mask >> (p - 1)) & 1;
            const double w = wcss(im, labels, 2);
            if (w < best - 1e-12) {
                best = w;
                best_labels = labels;
            }
        }
        const KMeansResult r = kmeans(im, {2, 10, 300, static_cast<std::uint64_t>(t)});
        EXPECT_NEAR(r.wcss, best, 1e-12);
        EXPECT_EQ(testutil::canonical(r.labels.labels), testutil::canonical([&] {
                      auto v = best_labels;
                      for (int& x : v) x += 1;
                      return v;
                  }()));
    }
}

TEST(KMeans, WcssTraceNonincreasing) {
    Rng rng(54);
    for (int t = 0; t < 20; ++t) {
        const Image im = testutil::random_image(rng, 12, 10, t % 2 ? 3 : 1);
        const KMeansResult r = kmeans(im, {2 + t % 4, 4, 300, static_cast<std::uint64_t>(t)});
        ASSERT_FALSE(r.wcss_trace.empty());
        for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) {
            EXPECT_LE(r.wcss_trace[i], r.wcss_trace[i - 1] * (1 + 1e-12));
        }
        EXPECT_NEAR(r.wcss, r.wcss_trace.back(), 1e-12 * (1 + r.wcss));
        EXPECT_NEAR(r.wcss, wcss(im, [&] {
                        auto v = r.labels.labels;
                        for (int& x : v) x -= 1;
                        return v;
                    }(), 2 + t % 4), 1e-10);
    }
}

TEST(KMeans, Errors) {
    const Image im(3, 1, 1, {0.1, 0.1, 0.5});
    EXPECT_THROW(kmeans(im, {3, 1, 300, 0}), InvalidArgument);
    EXPECT_THROW(kmeans(im, {0, 1, 300, 0}), InvalidArgument);
}

TEST(KMeans, SeedDeterminism) {
    Rng rng(55);
    const Image im = testutil::random_image(rng, 9, 9, 3);
    const KMeansResult a = kmeans(im, {3, 3, 300, 77});
    const KMeansResult b = kmeans(im, {3, 3, 300, 77});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.wcss, b.wcss);
}

TEST(Sobel, ConstantImage) {
    const EdgeMap e = sobel(Image(5, 4, 1, std::vector<double>(20, 0.3)));
    for (double m : e.magnitude) EXPECT_EQ(m, 0.0);
    for (auto b : e.edges) EXPECT_EQ(b, 0);
}

TEST(Sobel, StepEdge) {
    for (double delta : {0.1, 0.4, 0.8}) {
        Image im(8, 6, 1);
        for (int y = 0; y < 6; ++y) {
            for (int x = 0; x < 8; ++x) im.at(x, y) = x < 4 ? 0.1 : 0.1 + delta;
        }
        const EdgeMap e = sobel(im);
        for (int y = 0; y < 6; ++y) {
            EXPECT_NEAR(e.magnitude[y * 8 + 3], 4 * delta, 1e-12);
            EXPECT_NEAR(e.magnitude[y * 8 + 4], 4 * delta, 1e-12);
            EXPECT_EQ(e.magnitude[y * 8 + 1], 0.0);
            EXPECT_TRUE(e.edges[y * 8 + 3]);
            EXPECT_FALSE(e.edges[y * 8 + 0]);
        }
    }
}

TEST(Sobel, RotationSwapsComponents) {
    Rng rng(56);
    for (int t = 0; t < 10; ++t) {
        const Image im = testutil::random_image(rng, 7, 5, 1);
        const EdgeMap a = sobel(im);
        const EdgeMap b = sobel(rotate90(im));
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 7; ++x) {
                const std::size_t p = y * 7 + x;
                const std::size_t q = static_cast<std::size_t>(x) * 5 + (5 - 1 - y);
                EXPECT_NEAR(std::abs(b.gx[q]), std::abs(a.gy[p]), 1e-12);
                EXPECT_NEAR(std::abs(b.gy[q]), std::abs(a.gx[p]), 1e-12);
                EXPECT_NEAR(b.magnitude[q], a.magnitude[p], 1e-12);
            }
        }
    }
}

TEST(Sobel, ShiftInvariantScaleLinear) {
    Rng rng(57);
    Image im(6, 6, 1);
    for (double& v : im.data()) v = 0.5 * rng.uniform_open();
    Image shifted = im, scaled = im;
    for (double& v : shifted.data()) v += 0.3;
    for (double& v : scaled.data()) v *= 2.0;
    const EdgeMap a = sobel(im), b = sobel(shifted), c = sobel(scaled);
    for (std::size_t p = 0; p < 36; ++p) {
        EXPECT_NEAR(b.magnitude[p], a.magnitude[p], 1e-12);
        EXPECT_NEAR(c.magnitude[p], 2 * a.magnitude[p], 1e-12);
    }
}

TEST(Sobel, QuantileThreshold) {
    Image im(8, 6, 1);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 8; ++x) im.at(x, y) = x < 4 ? 0.0 : 0.5;
    }
    // 12 of 48 magnitudes are 2, the rest 0: the 0.5 quantile is 0, so the smallest
    // positive magnitude becomes the threshold.
    const EdgeMap e = sobel(im, 0.5);
    EXPECT_DOUBLE_EQ(e.threshold, 2.0);
    EXPECT_THROW(sobel(im, 1.5), InvalidArgument);
    EXPECT_TRUE(std::isinf(sobel(Image(2, 2, 1)).threshold));
}
