#include "overton/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace overton {

std::pair<double, double> mean_std(const std::vector<double>& x) {
    if (x.empty()) {
        throw std::invalid_argument("mean_std: empty input");
    }
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : x) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

ClusterSet detect_clusters(std::vector<double> x, double gap_tolerance) {
    if (x.empty()) {
        throw std::invalid_argument("detect_clusters: empty input");
    }
    std::sort(x.begin(), x.end());
    ClusterSet result;
    result.gap_tolerance = gap_tolerance;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        if (i == x.size() || x[i] - x[i - 1] > gap_tolerance) {
            double sum = 0.0;
            for (std::size_t j = start; j < i; ++j) sum += x[j];
            result.clusters.push_back(
                {sum / static_cast<double>(i - start), i - start});
            start = i;
        }
    }
    return result;
}

SmoothedDensity smooth_density(const std::vector<double>& x, double epsilon,
                               std::size_t h, double alpha) {
    if (h < 2) {
        throw std::invalid_argument("smooth_density: h must be >= 2");
    }
    if (!(alpha > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument(
            "smooth_density: alpha and epsilon must be > 0");
    }
    SmoothedDensity density;
    density.h = h;
    density.alpha = alpha;
    density.epsilon = epsilon;
    density.grid.resize(h);
    density.values.resize(h);
    const double bandwidth = alpha * epsilon;
    for (std::size_t k = 1; k <= h; ++k) {
        const double r = -1.0 + static_cast<double>(2 * k - 1) /
                                    static_cast<double>(h);
        double s = 0.0;
        for (double v : x) {
            const double u = (v - r) / bandwidth;
            s += std::exp(-u * u);
        }
        density.grid[k - 1] = r;
        density.values[k - 1] = s;
    }
    return density;
}

std::vector<std::size_t> find_local_maxima(const SmoothedDensity& density) {
    const auto& s = density.values;
    std::vector<std::size_t> maxima;
    if (s.empty()) {
        return maxima;
    }
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        if (i < s.size() && s[i] == s[run_start]) {
            continue;  // still inside a plateau
        }
        const bool rises_left =
            run_start == 0 || s[run_start - 1] < s[run_start];
        const bool falls_right = i == s.size() || s[i] < s[run_start];
        if (rises_left && falls_right) {
            maxima.push_back(run_start);
        }
        run_start = i;
    }
    return maxima;
}

std::vector<double> effective_weights(const SmoothedDensity& density,
                                      const std::vector<std::size_t>& maxima) {
    if (maxima.empty()) {
        throw std::invalid_argument("effective_weights: no maxima");
    }
    double total = 0.0;
    for (std::size_t k : maxima) total += density.values[k];
    std::vector<double> raw(maxima.size());
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        raw[i] = total > 0.0 ? density.values[maxima[i]] / total
                             : 1.0 / static_cast<double>(maxima.size());
        sum_sq += raw[i] * raw[i];
    }
    std::vector<double> effective(maxima.size());
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        effective[i] = raw[i] / sum_sq;
    }
    return effective;
}

PrimaryClusterReport primary_interval(const std::vector<double>& x,
                                      double epsilon, double delta,
                                      std::size_t h, double alpha) {
    if (x.empty()) {
        throw std::invalid_argument("primary_interval: empty input");
    }
    const SmoothedDensity density = smooth_density(x, epsilon, h, alpha);
    PrimaryClusterReport report;
    report.delta = delta;
    report.maxima = find_local_maxima(density);
    report.effective_weights = effective_weights(density, report.maxima);

    double total = 0.0;
    for (std::size_t k : report.maxima) total += density.values[k];
    report.raw_weights.resize(report.maxima.size());
    for (std::size_t i = 0; i < report.maxima.size(); ++i) {
        report.raw_weights[i] =
            total > 0.0 ? density.values[report.maxima[i]] / total
                        : 1.0 / static_cast<double>(report.maxima.size());
    }

    for (std::size_t i = 0; i < report.maxima.size(); ++i) {
        if (report.effective_weights[i] >= delta) {
            report.surviving.push_back(report.maxima[i]);
        }
    }
    if (report.surviving.empty()) {
        // The screening value removed everything; keep the heaviest maximum
        // (leftmost on ties) so the report stays total.
        std::size_t best = 0;
        for (std::size_t i = 1; i < report.maxima.size(); ++i) {
            if (report.effective_weights[i] > report.effective_weights[best]) {
                best = i;
            }
        }
        report.surviving.push_back(report.maxima[best]);
    }

    const double lo = density.grid[report.surviving.front()];
    const double hi = density.grid[report.surviving.back()];
    report.center = 0.5 * (hi + lo);
    report.amplitude = 0.5 * (hi - lo);
    return report;
}

}  // namespace overton
