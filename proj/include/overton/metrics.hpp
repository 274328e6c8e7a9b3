#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace overton {

struct Cluster {
    double center = 0.0;  // member mean
    std::size_t size = 0;
};

struct ClusterSet {
    std::vector<Cluster> clusters;  // centers strictly increasing
    double gap_tolerance = 0.0;
};

/// Gaussian-kernel smoothing of an opinion distribution on the grid
/// r_k = -1 + (2k - 1)/h, k = 1..h, with bandwidth alpha * epsilon:
/// S(r_k) = sum_j exp(-((x_j - r_k) / (alpha epsilon))^2).
struct SmoothedDensity {
    std::size_t h = 0;
    double alpha = 0.0;
    double epsilon = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
};

/// Output of the primary-cluster pipeline: local maxima of the smoothed
/// density with raw shares w and effective weights W = w / sum(w^2),
/// screened at delta, and the center/amplitude of the surviving interval.
struct PrimaryClusterReport {
    std::vector<std::size_t> maxima;        // grid indices of local maxima
    std::vector<double> raw_weights;        // w, aligned with maxima
    std::vector<double> effective_weights;  // W, aligned with maxima
    std::vector<std::size_t> surviving;     // maxima kept after screening
    double delta = 0.0;
    double center = 0.0;     // midpoint of the surviving grid positions
    double amplitude = 0.0;  // half-width of the surviving grid positions
};

/// Arithmetic mean and population (1/N) standard deviation. Throws on empty
/// input.
std::pair<double, double> mean_std(const std::vector<double>& x);

/// Sort and split wherever a consecutive gap exceeds gap_tolerance; each
/// cluster reported as (member mean, size). Throws on empty input.
ClusterSet detect_clusters(std::vector<double> x, double gap_tolerance);

SmoothedDensity smooth_density(const std::vector<double>& x, double epsilon,
                               std::size_t h = 200, double alpha = 0.1);

/// Grid indices of the local maxima of S. A maximal run of equal values
/// qualifies when both flanks are strictly smaller (array ends count as
/// flanks); plateaus report their leftmost index.
std::vector<std::size_t> find_local_maxima(const SmoothedDensity& density);

/// W_i = w_i / sum_j w_j^2 with raw shares w_i = S(r_i) / sum_j S(r_j).
std::vector<double> effective_weights(const SmoothedDensity& density,
                                      const std::vector<std::size_t>& maxima);

/// Full pipeline: smooth, find maxima, weight, screen at delta (keep
/// W >= delta; if nothing survives, keep the single largest-W maximum),
/// and report center/amplitude of the surviving grid interval.
PrimaryClusterReport primary_interval(const std::vector<double>& x,
                                      double epsilon, double delta,
                                      std::size_t h = 200, double alpha = 0.1);

}  // namespace overton
