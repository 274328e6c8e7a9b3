#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "overton/analytic.hpp"
#include "overton/config.hpp"
#include "overton/io.hpp"
#include "overton/metrics.hpp"
#include "overton/models.hpp"
#include "overton/sweep.hpp"

namespace {

using overton::RunConfig;

std::vector<std::int64_t> snapshot_times_for(const RunConfig& cfg,
                                             std::int64_t horizon) {
    if (cfg.snapshot_all) {
        std::vector<std::int64_t> times(static_cast<std::size_t>(horizon) + 1);
        for (std::int64_t t = 0; t <= horizon; ++t) {
            times[static_cast<std::size_t>(t)] = t;
        }
        return times;
    }
    if (!cfg.snapshot_times.empty()) {
        return cfg.snapshot_times;
    }
    if (overton::model_is_weighted(cfg.require_model()) &&
        cfg.manipulators.k > 0) {
        return {std::min(cfg.manipulators.t_delta, horizon)};
    }
    return {};
}

int cmd_simulate(const std::string& config_path) {
    const RunConfig cfg = overton::load_config(config_path);
    const overton::ModelSpec model{cfg.require_model(), cfg.require_epsilon(),
                                   std::nullopt};
    const overton::OpinionState init(cfg.require_population().build(), 0);
    const overton::ManipulatorGroup group = cfg.manipulators.group();
    const overton::StopRule stop = cfg.resolved_stop();
    const std::int64_t horizon = cfg.resolved_horizon();

    overton::SplitMix64 rng(
        overton::derive_seed(cfg.seed, group.k, group.t_delta, 0));
    const overton::Trajectory traj =
        overton::run_simulation(model, init, group, stop, horizon,
                                snapshot_times_for(cfg, horizon), rng);

    const overton::StateSummary summary =
        overton::summarize_state(traj.final_state().opinions,
                                 traj.final_state().time, model.epsilon,
                                 cfg.metrics);
    std::cout << overton::summary_to_json(summary, traj.stop_reason,
                                          traj.stop_time)
              << '\n';

    if (cfg.output.trajectory) {
        overton::write_trajectory_jsonl(*cfg.output.trajectory, traj, group);
    }
    if (cfg.output.summary) {
        overton::write_summary_json(*cfg.output.summary, summary,
                                    traj.stop_reason, traj.stop_time);
    }
    if (cfg.output.svg) {
        overton::write_trajectory_svg(*cfg.output.svg, traj, group);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, std::size_t workers) {
    const RunConfig cfg = overton::load_config(config_path);
    overton::RunSetup setup;
    setup.kind = cfg.require_model();
    setup.epsilon = cfg.require_epsilon();
    setup.initial_opinions = cfg.require_population().build();
    setup.f_start = cfg.manipulators.f_start;
    setup.f_end = cfg.manipulators.f_end;
    setup.stop = cfg.resolved_stop();
    setup.horizon = cfg.resolved_horizon();
    setup.metrics = cfg.metrics;
    const overton::SweepGrid grid = cfg.require_sweep();

    const auto cells = overton::run_sweep(setup, grid, workers);

    if (cfg.output.sweep_csv) {
        overton::write_sweep_csv(*cfg.output.sweep_csv, cells);
    } else {
        std::cout << overton::sweep_csv_text(cells);
    }
    if (cfg.output.weights_csv) {
        overton::write_weights_csv(*cfg.output.weights_csv, cells);
    }
    if (cfg.output.heatmap_svg) {
        overton::write_heatmap_svgs(*cfg.output.heatmap_svg, cells);
    }
    return 0;
}

int cmd_analyze(const std::string& snapshot_path, double epsilon,
                const overton::MetricParams& params,
                const std::optional<std::string>& out_path) {
    const auto summaries =
        overton::analyze_jsonl(snapshot_path, epsilon, params);
    std::ostringstream out;
    for (const auto& s : summaries) {
        nlohmann::json j{{"t", s.time},
                         {"mean", s.mean},
                         {"std", s.stddev},
                         {"n_clusters", s.clusters.size()},
                         {"center", s.center},
                         {"amplitude", s.amplitude},
                         {"n_primary", s.n_primary}};
        out << j.dump() << '\n';
    }
    if (out_path) {
        std::ofstream file(*out_path, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot write '" + *out_path + "'");
        }
        file << out.str();
    } else {
        std::cout << out.str();
    }
    return 0;
}

int cmd_oracle(const std::string& config_path) {
    const RunConfig cfg = overton::load_config(config_path);
    const overton::OracleSpec& spec = cfg.require_oracle();
    const double epsilon = cfg.require_epsilon();
    const overton::TwoGroupSystem sys{spec.n,  spec.k,      spec.x0,
                                      spec.f0, spec.lambda, epsilon};

    const double bound = overton::influence_bound(spec.k, spec.n, epsilon);
    const bool holds = overton::holds_forever(sys);
    const auto detach = overton::detachment_time(sys, spec.horizon);

    // Re-run the same system through the actual HK iteration and compare the
    // gap to the closed form while its hypothesis (attachment, schedule in
    // range) still holds. The closed form is evaluated with the ramp's own
    // quantized slope so both routes share lambda bit-for-bit.
    const overton::ManipulatorGroup ramp{
        spec.k, spec.f0,
        spec.f0 + sys.lambda * static_cast<double>(std::max<std::int64_t>(
                      spec.horizon, 1)),
        std::max<std::int64_t>(spec.horizon, 1)};
    overton::TwoGroupSystem sim_sys = sys;
    sim_sys.lambda = ramp.slope();
    overton::OpinionState state(std::vector<double>(spec.n, spec.x0), 0);
    double max_deviation = 0.0;
    std::int64_t compared = 0;
    for (std::int64_t t = 0; t <= spec.horizon; ++t) {
        const double f = overton::schedule_opinion(ramp, t);
        if (std::abs(f) > overton::kOpinionMax) {
            break;  // the schedule type cannot represent this ramp any further
        }
        const double gap = f - state.opinions.front();
        if (std::abs(gap) > epsilon) {
            break;  // detached; the closed form no longer applies
        }
        const double predicted = overton::gap_closed_form(sim_sys, t);
        max_deviation = std::max(max_deviation, std::abs(gap - predicted));
        compared = t;
        if (t < spec.horizon) {
            state = overton::hk_step(state, ramp, epsilon, t);
        }
    }

    nlohmann::json j{{"influence_bound", bound},
                     {"holds_forever", holds},
                     {"max_gap_deviation", max_deviation},
                     {"compared_steps", compared}};
    if (detach) {
        j["detachment_time"] = *detach;
    } else {
        j["detachment_time"] = nullptr;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "overton: bounded-confidence opinion dynamics with a scheduled "
        "manipulative group"};
    app.require_subcommand(1);

    std::string config_path;
    std::string snapshot_path;
    double analyze_epsilon = 0.1;
    overton::MetricParams analyze_params;
    std::optional<std::string> analyze_out;
    std::size_t workers = overton::default_worker_count();

    auto* simulate =
        app.add_subcommand("simulate", "run one simulation from a config file");
    simulate->add_option("config", config_path, "JSON config file")
        ->required();

    auto* sweep = app.add_subcommand(
        "sweep", "run a (K, t_delta) parameter sweep from a config file");
    sweep->add_option("config", config_path, "JSON config file")->required();
    sweep->add_option("--workers", workers,
                      "worker threads (default: OVERTON_WORKERS or hardware "
                      "concurrency)");

    auto* analyze = app.add_subcommand(
        "analyze", "recompute both metrics on a saved trajectory JSONL");
    analyze->add_option("snapshot", snapshot_path, "trajectory .jsonl file")
        ->required();
    analyze->add_option("--epsilon", analyze_epsilon, "confidence threshold")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--delta", analyze_params.delta, "screening value");
    analyze->add_option("--smoothing-points", analyze_params.h,
                        "density grid size h");
    analyze->add_option("--alpha", analyze_params.alpha, "kernel bandwidth factor");
    analyze->add_option("--gap-tolerance", analyze_params.gap_tolerance,
                        "cluster split tolerance");
    std::string analyze_out_str;
    auto* out_opt =
        analyze->add_option("--out", analyze_out_str, "write JSONL here "
                                                      "instead of stdout");

    auto* oracle = app.add_subcommand(
        "oracle", "closed-form two-group diagnostics for a config file");
    oracle->add_option("config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path);
        }
        if (sweep->parsed()) {
            return cmd_sweep(config_path, workers);
        }
        if (analyze->parsed()) {
            if (out_opt->count() > 0) {
                analyze_out = analyze_out_str;
            }
            return cmd_analyze(snapshot_path, analyze_epsilon, analyze_params,
                               analyze_out);
        }
        if (oracle->parsed()) {
            return cmd_oracle(config_path);
        }
    } catch (const overton::ConfigError& e) {
        std::cerr << "overton: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "overton: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
