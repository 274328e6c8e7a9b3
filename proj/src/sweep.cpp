#include "overton/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace overton {

namespace {

struct SnapshotPlan {
    std::string label;
    std::int64_t time;  // -1 marks "whatever the final state is"
};

std::vector<SnapshotPlan> snapshot_plan(const RunSetup& setup,
                                        std::int64_t t_delta) {
    if (model_is_weighted(setup.kind)) {
        // t_delta past the horizon collapses onto the horizon snapshot.
        return {{"t_delta", std::min(t_delta, setup.horizon)},
                {"horizon", setup.horizon}};
    }
    return {{"final", -1}};
}

const OpinionState* snapshot_at(const Trajectory& traj, std::int64_t time) {
    if (time < 0) {
        return &traj.final_state();
    }
    for (const auto& s : traj.snapshots) {
        if (s.time == time) {
            return &s;
        }
    }
    // A run that stopped before the requested time only has its final state.
    return &traj.final_state();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t k,
                          std::int64_t t_delta, std::size_t replicate) {
    return derive_stream(base_seed, static_cast<std::uint64_t>(k),
                         static_cast<std::uint64_t>(t_delta),
                         static_cast<std::uint64_t>(replicate));
}

CellResult run_cell(const RunSetup& setup, const SweepGrid& grid,
                    std::size_t k, std::int64_t t_delta) {
    if (grid.replicates == 0) {
        throw std::invalid_argument("run_cell: replicates must be >= 1");
    }
    const ManipulatorGroup group{k, setup.f_start, setup.f_end, t_delta};
    const ModelSpec model{setup.kind, setup.epsilon, std::nullopt};
    const OpinionState init(setup.initial_opinions, 0);
    const auto plan = snapshot_plan(setup, t_delta);

    std::vector<std::int64_t> wanted;
    for (const auto& p : plan) {
        if (p.time >= 0) {
            wanted.push_back(p.time);
        }
    }

    CellResult cell;
    cell.k = k;
    cell.t_delta = t_delta;
    cell.snapshots.resize(plan.size());
    for (std::size_t s = 0; s < plan.size(); ++s) {
        cell.snapshots[s].label = plan[s].label;
    }

    const std::vector<double>* first_final = nullptr;
    std::vector<double> first_final_storage;
    for (std::size_t rep = 0; rep < grid.replicates; ++rep) {
        SplitMix64 rng(derive_seed(grid.base_seed, k, t_delta, rep));
        const Trajectory traj = run_simulation(model, init, group, setup.stop,
                                               setup.horizon, wanted, rng);
        cell.stop_reasons.push_back(traj.stop_reason);

        // Deterministic models make replication pointless; keep the
        // contract honest by checking the runs really are identical.
        if (!model_is_stochastic(setup.kind) && grid.replicates > 1) {
            if (rep == 0) {
                first_final_storage = traj.final_state().opinions;
                first_final = &first_final_storage;
            } else if (traj.final_state().opinions != *first_final) {
                throw std::logic_error(
                    "run_cell: deterministic model produced diverging "
                    "replicates");
            }
        }

        for (std::size_t s = 0; s < plan.size(); ++s) {
            const OpinionState& snap = *snapshot_at(traj, plan[s].time);
            auto& agg = cell.snapshots[s];
            const auto [mean, sd] = mean_std(snap.opinions);
            const ClusterSet clusters =
                detect_clusters(snap.opinions, setup.metrics.gap_tolerance);
            const PrimaryClusterReport primary = primary_interval(
                snap.opinions, setup.epsilon, setup.metrics.delta,
                setup.metrics.h, setup.metrics.alpha);
            agg.replicates.push_back(
                {mean, sd, static_cast<double>(clusters.clusters.size()),
                 primary.center, primary.amplitude,
                 static_cast<double>(primary.surviving.size())});
            agg.effective_weights.insert(agg.effective_weights.end(),
                                         primary.effective_weights.begin(),
                                         primary.effective_weights.end());
        }
    }

    const double reps = static_cast<double>(grid.replicates);
    for (auto& agg : cell.snapshots) {
        for (const auto& r : agg.replicates) {
            agg.mean_of_means += r.mean;
            agg.mean_of_stds += r.stddev;
            agg.mean_n_clusters += r.n_clusters;
            agg.mean_center += r.center;
            agg.mean_amplitude += r.amplitude;
            agg.mean_n_primary += r.n_primary;
        }
        agg.mean_of_means /= reps;
        agg.mean_of_stds /= reps;
        agg.mean_n_clusters /= reps;
        agg.mean_center /= reps;
        agg.mean_amplitude /= reps;
        agg.mean_n_primary /= reps;
    }
    return cell;
}

std::vector<CellResult> run_sweep(const RunSetup& setup, const SweepGrid& grid,
                                  std::size_t parallelism) {
    if (grid.k_values.empty() || grid.tdelta_values.empty()) {
        throw std::invalid_argument("run_sweep: empty grid");
    }
    if (!model_is_stochastic(setup.kind) && grid.replicates > 1) {
        std::cerr << "overton: warning: " << model_name(setup.kind)
                  << " is deterministic; " << grid.replicates
                  << " replicates per cell will be identical\n";
    }

    struct Coord {
        std::size_t k;
        std::int64_t t_delta;
    };
    std::vector<Coord> coords;
    coords.reserve(grid.k_values.size() * grid.tdelta_values.size());
    for (std::size_t k : grid.k_values) {
        for (std::int64_t td : grid.tdelta_values) {
            coords.push_back({k, td});
        }
    }

    std::vector<CellResult> results(coords.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min(parallelism, coords.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= coords.size()) {
                return;
            }
            try {
                results[idx] =
                    run_cell(setup, grid, coords[idx].k, coords[idx].t_delta);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::make_exception_ptr(std::runtime_error(
                        "sweep cell (K=" + std::to_string(coords[idx].k) +
                        ", t_delta=" + std::to_string(coords[idx].t_delta) +
                        ") failed: " + e.what()));
                }
                return;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("OVERTON_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            return static_cast<std::size_t>(v);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace overton
