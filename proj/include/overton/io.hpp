#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "overton/config.hpp"
#include "overton/metrics.hpp"
#include "overton/models.hpp"
#include "overton/sweep.hpp"

namespace overton {

/// Both window proxies of one opinion snapshot.
struct StateSummary {
    std::int64_t time = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<Cluster> clusters;
    double center = 0.0;
    double amplitude = 0.0;
    std::size_t n_primary = 0;
    std::vector<double> effective_weights;
};

StateSummary summarize_state(const std::vector<double>& x, std::int64_t time,
                             double epsilon, const MetricParams& params);

/// Fixed 17-significant-digit formatting; round-trips doubles exactly.
std::string format_double(double v);

std::string summary_to_json(const StateSummary& summary, StopReason reason,
                            std::int64_t stop_time);

// One JSON object per snapshot: {"t": ..., "opinions": [...],
// "manipulator": value-or-null}. LF line endings.
void write_trajectory_jsonl(const std::string& path, const Trajectory& traj,
                            const ManipulatorGroup& group);

void write_summary_json(const std::string& path, const StateSummary& summary,
                        StopReason reason, std::int64_t stop_time);

/// Re-read a trajectory JSONL file and recompute both metrics per record.
std::vector<StateSummary> analyze_jsonl(const std::string& path,
                                        double epsilon,
                                        const MetricParams& params);

/// Header:
/// K,t_delta,snapshot,mean_of_means,mean_of_stds,mean_n_clusters,mean_center,mean_amplitude,mean_n_primary
void write_sweep_csv(const std::string& path,
                     const std::vector<CellResult>& cells);
std::string sweep_csv_text(const std::vector<CellResult>& cells);

/// Effective-weight histogram, pooled per snapshot label: 0.1-wide bins on
/// [0, 2) plus a trailing catch-all. Header: snapshot,bin_low,bin_high,count
void write_weights_csv(const std::string& path,
                       const std::vector<CellResult>& cells);

// Presentation-only SVG output.
void write_trajectory_svg(const std::string& path, const Trajectory& traj,
                          const ManipulatorGroup& group);
void write_heatmap_svgs(const std::string& base_path,
                        const std::vector<CellResult>& cells);

}  // namespace overton
