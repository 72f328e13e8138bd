#pragma once

#include <cstdint>
#include <vector>

#include "npseg/image.hpp"

namespace npseg {

struct OtsuResult {
    LabelMap labels;    // 1 below the threshold, 2 at or above
    int threshold = 0;  // 8-bit code t*; pixels with code < t* are class 1
    double between_class_variance = 0.0;
    bool degenerate = false;  // constant image, single label
};

/// 256-bin Otsu thresholding; maximises w0 w1 (mu0 - mu1)^2 over t in 1..255, ties to the
/// smaller t. Colour input is converted to luma first.
OtsuResult otsu(const Image& image);

struct KMeansOptions {
    int clusters = 2;
    int restarts = 10;
    int max_iterations = 300;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    LabelMap labels;  // 1..K in order of first pixel occurrence
    std::vector<double> centroids;  // K x channels, in label order
    double wcss = 0.0;
    int iterations = 0;
    int best_restart = 0;
    /// WCSS after every assignment step of the winning restart.
    std::vector<double> wcss_trace;
};

/// Lloyd iterations from distinct random colours; best restart by WCSS (lowest index on ties).
KMeansResult kmeans(const Image& image, const KMeansOptions& options);

struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> magnitude;
    double threshold = 0.0;
    std::vector<std::uint8_t> edges;  // magnitude >= threshold
};

/// 3 x 3 Sobel gradients with replicated borders; edges are magnitudes at or above the
/// q-quantile (linear interpolation between order statistics). Zero gradients never count
/// as edges: if the quantile is 0 the smallest positive magnitude is used instead.
EdgeMap sobel(const Image& image, double quantile = 0.9);

}  // namespace npseg
