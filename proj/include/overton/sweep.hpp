#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "overton/metrics.hpp"
#include "overton/models.hpp"

namespace overton {

struct MetricParams {
    double delta = 0.5;
    std::size_t h = 200;
    double alpha = 0.1;
    double gap_tolerance = 1e-3;
};

/// The (K, t_delta) grid and replication plan of one sweep.
struct SweepGrid {
    std::vector<std::size_t> k_values;
    std::vector<std::int64_t> tdelta_values;
    std::size_t replicates = 1;
    std::uint64_t base_seed = 1;
};

/// Everything one run needs besides the cell coordinates and the stream.
struct RunSetup {
    ModelKind kind = ModelKind::HK;
    double epsilon = 0.1;
    std::vector<double> initial_opinions;
    double f_start = -1.0;
    double f_end = 1.0;
    StopRule stop;
    std::int64_t horizon = 5000;
    MetricParams metrics;
};

/// Observables of one replicate's state at one snapshot.
struct SnapshotStats {
    double mean = 0.0;
    double stddev = 0.0;
    double n_clusters = 0.0;
    double center = 0.0;
    double amplitude = 0.0;
    double n_primary = 0.0;
};

/// Per-replicate observations plus their plain averages for one cell and
/// snapshot label.
struct SnapshotAggregate {
    std::string label;  // "final" for HK/DW; "t_delta" / "horizon" otherwise
    std::vector<SnapshotStats> replicates;
    double mean_of_means = 0.0;
    double mean_of_stds = 0.0;
    double mean_n_clusters = 0.0;
    double mean_center = 0.0;
    double mean_amplitude = 0.0;
    double mean_n_primary = 0.0;
    std::vector<double> effective_weights;  // pooled over replicates
};

struct CellResult {
    std::size_t k = 0;
    std::int64_t t_delta = 0;
    std::vector<SnapshotAggregate> snapshots;
    std::vector<StopReason> stop_reasons;  // one per replicate
};

/// Stream seed for (base_seed, k, t_delta, replicate); distinct coordinates
/// give distinct, platform-independent streams.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t k,
                          std::int64_t t_delta, std::size_t replicate);

/// Run all replicates of one grid cell and aggregate both metrics at every
/// snapshot label. Deterministic given (setup, grid.base_seed).
CellResult run_cell(const RunSetup& setup, const SweepGrid& grid,
                    std::size_t k, std::int64_t t_delta);

/// All cells, executed by `parallelism` workers over an index queue. The
/// result vector is ordered k-major (k outer, t_delta inner) regardless of
/// scheduling, and its content is bitwise independent of `parallelism`.
std::vector<CellResult> run_sweep(const RunSetup& setup, const SweepGrid& grid,
                                  std::size_t parallelism);

/// Worker count: OVERTON_WORKERS if set, else hardware concurrency.
std::size_t default_worker_count();

}  // namespace overton
