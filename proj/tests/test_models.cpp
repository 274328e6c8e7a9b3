#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "overton/analytic.hpp"
#include "overton/core.hpp"
#include "overton/models.hpp"

using namespace overton;

namespace {

// Independent route for the HK rule: literal mean over the confidence set
// of the materialized extended opinion vector.
std::vector<double> hk_step_naive(const std::vector<double>& x,
                                  const ManipulatorGroup& group, double epsilon,
                                  std::int64_t t) {
    const auto z = extended_opinions(OpinionState(x, t), group, t);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto set = confidence_set(z, i, epsilon);
        double sum = 0.0;
        for (std::size_t j : set) sum += z[j];
        out[i] = sum / static_cast<double>(set.size());
    }
    return out;
}

WeightMatrix unit_weights(std::size_t n, std::size_t k) {
    return {n, n + k, std::vector<double>(n * (n + k), 1.0)};
}

}  // namespace

TEST_CASE("hk step: frozen examples") {
    const ManipulatorGroup none{};
    const auto tight =
        hk_step(OpinionState({-0.05, 0.0, 0.05}, 0), none, 0.1, 0);
    for (double v : tight.opinions) CHECK(v == doctest::Approx(0.0));

    const ManipulatorGroup one{1, 0.05, 0.05, 0};
    const auto pulled = hk_step(OpinionState({0.0, 0.0}, 0), one, 0.1, 0);
    CHECK(pulled.opinions[0] == doctest::Approx(0.05 / 3.0).epsilon(1e-15));
    CHECK(pulled.opinions[1] == doctest::Approx(0.05 / 3.0).epsilon(1e-15));

    const auto isolated = hk_step(OpinionState({-0.9, 0.9}, 0), none, 0.1, 0);
    CHECK(isolated.opinions == std::vector<double>{-0.9, 0.9});
}

TEST_CASE("hk step agrees with the confidence-set route") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.next_below(25) + 1;
        std::vector<double> x(n);
        for (double& v : x) v = rng.next_in(-1.0, 1.0);
        ManipulatorGroup g;
        g.k = rng.next_below(10);
        g.f_start = rng.next_in(-1.0, 1.0);
        g.f_end = rng.next_in(-1.0, 1.0);
        g.t_delta = static_cast<std::int64_t>(rng.next_below(100));
        const std::int64_t t = static_cast<std::int64_t>(rng.next_below(150));
        const double eps = rng.next_in(0.01, 0.8);

        const auto fast = hk_step(OpinionState(x, t), g, eps, t).opinions;
        const auto naive = hk_step_naive(x, g, eps, t);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(fast[i] == doctest::Approx(naive[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("hk step: one epsilon-ball collapses to local consensus") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.next_below(12) + 1;
        const std::size_t k = rng.next_below(6) + 1;
        const double eps = 0.5;
        std::vector<double> x(n);
        for (double& v : x) v = rng.next_in(-0.1, 0.1);
        const double f = rng.next_in(-0.1, 0.1);
        const ManipulatorGroup g{k, f, f, 0};
        const auto next = hk_step(OpinionState(x, 0), g, eps, 0).opinions;

        std::vector<GroupMass> normals;
        for (double v : x) normals.push_back({1, v});
        const double merged = merge_groups(normals, {{k, f}});
        for (double v : next) {
            CHECK(v == doctest::Approx(merged).epsilon(1e-12));
        }
    }
}

TEST_CASE("dw step: forced partner cases via a single normal agent") {
    SplitMix64 rng(3);
    // n = 1, k = 1: the lone normal agent always draws the manipulator.
    const ManipulatorGroup close{1, 0.08, 0.08, 0};
    const auto averaged =
        dw_step(OpinionState({0.0}, 0), close, 0.1, 0, rng).opinions;
    CHECK(averaged[0] == doctest::Approx(0.04).epsilon(1e-15));

    const ManipulatorGroup far{1, 0.5, 0.5, 0};
    const auto unchanged =
        dw_step(OpinionState({0.0}, 0), far, 0.1, 0, rng).opinions;
    CHECK(unchanged[0] == 0.0);
}

TEST_CASE("dw step without any partner leaves the agent alone") {
    SplitMix64 rng(4);
    const auto alone =
        dw_step(OpinionState({0.4}, 0), ManipulatorGroup{}, 0.1, 0, rng);
    CHECK(alone.opinions == std::vector<double>{0.4});
}

TEST_CASE("dw trajectories are reproducible per seed") {
    const auto init = equispaced_opinions(-1.0, 1.0, 40);
    const ManipulatorGroup g{4, -1.0, 1.0, 60};
    const ModelSpec model{ModelKind::DW, 0.2, std::nullopt};
    const StopRule stop = default_stop_rule(ModelKind::DW);

    SplitMix64 a(derive_stream(9, 4, 60, 0));
    SplitMix64 b(derive_stream(9, 4, 60, 0));
    const auto ta =
        run_simulation(model, OpinionState(init, 0), g, stop, 2000, {}, a);
    const auto tb =
        run_simulation(model, OpinionState(init, 0), g, stop, 2000, {}, b);
    CHECK(ta.stop_time == tb.stop_time);
    CHECK(ta.final_state().opinions == tb.final_state().opinions);

    SplitMix64 c(derive_stream(10, 4, 60, 0));
    const auto tc =
        run_simulation(model, OpinionState(init, 0), g, stop, 2000, {}, c);
    CHECK(ta.final_state().opinions != tc.final_state().opinions);
}

TEST_CASE("weighted steps: frozen examples with unit weights") {
    SplitMix64 rng(6);
    const auto w = unit_weights(1, 1);

    const ManipulatorGroup near{1, 0.05, 0.05, 0};
    const auto attracted =
        awhk_step(OpinionState({0.0}, 0), near, 0.1, w, 0, rng).opinions;
    CHECK(attracted[0] == doctest::Approx(0.025).epsilon(1e-15));

    const ManipulatorGroup far{1, 0.5, 0.5, 0};
    const auto repelled =
        rwhk_step(OpinionState({0.0}, 0), far, 0.1, w, 0, rng).opinions;
    CHECK(repelled[0] == doctest::Approx(-0.25).epsilon(1e-15));

    const auto both_near =
        arwhk_step(OpinionState({0.0}, 0), near, 0.1, w, 0, rng).opinions;
    CHECK(both_near[0] == doctest::Approx(0.025).epsilon(1e-15));
    const auto both_far =
        arwhk_step(OpinionState({0.0}, 0), far, 0.1, w, 0, rng).opinions;
    CHECK(both_far[0] == doctest::Approx(-0.25).epsilon(1e-15));

    // no-op branches
    const auto rw_inside =
        rwhk_step(OpinionState({0.0}, 0), near, 0.1, w, 0, rng).opinions;
    CHECK(rw_inside[0] == 0.0);
    const auto aw_outside =
        awhk_step(OpinionState({0.5}, 0), ManipulatorGroup{1, -0.5, -0.5, 0},
                  0.1, w, 0, rng)
            .opinions;
    CHECK(aw_outside[0] == 0.5);
}

TEST_CASE("weighted steps: +-1 are fixed points") {
    SplitMix64 rng(8);
    const auto w = unit_weights(2, 1);
    for (double f : {-0.95, 0.95, 0.2}) {
        const ManipulatorGroup g{1, f, f, 0};
        const OpinionState state({1.0, -1.0}, 0);
        for (int which = 0; which < 3; ++which) {
            const auto next = which == 0
                                  ? awhk_step(state, g, 0.6, w, 0, rng)
                                  : which == 1
                                        ? rwhk_step(state, g, 0.6, w, 0, rng)
                                        : arwhk_step(state, g, 0.6, w, 0, rng);
            CHECK(next.opinions[0] == 1.0);
            CHECK(next.opinions[1] == -1.0);
        }
    }
}

TEST_CASE("weighted steps stay inside the opinion space") {
    SplitMix64 rng(123);
    SplitMix64 setup(321);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = setup.next_below(20) + 1;
        const std::size_t k = setup.next_below(10);
        const double eps = setup.next_in(0.05, 0.8);
        std::vector<double> x(n);
        for (double& v : x) v = setup.next_in(-1.0, 1.0);
        const ManipulatorGroup g{k, setup.next_in(-1.0, 1.0),
                                 setup.next_in(-1.0, 1.0),
                                 static_cast<std::int64_t>(setup.next_below(50))};
        auto weights = sample_weight_matrix(n, k, setup);
        OpinionState state(x, 0);
        for (std::int64_t t = 0; t < 100; ++t) {
            switch (t % 3) {
                case 0: state = awhk_step(state, g, eps, weights, t, rng); break;
                case 1: state = rwhk_step(state, g, eps, weights, t, rng); break;
                default:
                    state = arwhk_step(state, g, eps, weights, t, rng);
                    break;
            }
            for (double v : state.opinions) {
                CHECK(v >= -1.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("consensus is a fixed point of every model") {
    SplitMix64 rng(17);
    const std::vector<double> flat(10, 0.3);
    const OpinionState state(flat, 0);
    const ManipulatorGroup none{};
    const auto w = sample_weight_matrix(10, 0, rng);

    // HK averages n equal values, so allow accumulation at the ulp level
    for (double v : hk_step(state, none, 0.1, 0).opinions) {
        CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
    }
    CHECK(dw_step(state, none, 0.1, 0, rng).opinions == flat);
    CHECK(awhk_step(state, none, 0.1, w, 0, rng).opinions == flat);
    CHECK(rwhk_step(state, none, 0.1, w, 0, rng).opinions == flat);
    CHECK(arwhk_step(state, none, 0.1, w, 0, rng).opinions == flat);
}

TEST_CASE("sample_weight_matrix: shape, range, determinism") {
    SplitMix64 a(55), b(55);
    const auto wa = sample_weight_matrix(3, 2, a);
    const auto wb = sample_weight_matrix(3, 2, b);
    CHECK(wa.rows() == 3);
    CHECK(wa.cols() == 5);
    CHECK(wa.entries() == wb.entries());
    for (double w : wa.entries()) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("manipulator schedule is untouched by the dynamics") {
    const auto init = equispaced_opinions(-1.0, 1.0, 30);
    const ManipulatorGroup g{5, -1.0, 0.75, 40};
    const ModelSpec model{ModelKind::DW, 0.3, std::nullopt};
    SplitMix64 rng(2);
    std::vector<std::int64_t> times;
    for (std::int64_t t = 0; t <= 100; ++t) times.push_back(t);
    const auto traj = run_simulation(model, OpinionState(init, 0), g,
                                     default_stop_rule(ModelKind::DW), 100,
                                     times, rng);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        CHECK(traj.manipulator_opinions[s] ==
              schedule_opinion(g, traj.snapshots[s].time));
    }
}

TEST_CASE("run_simulation: hk converges and snapshot times increase") {
    const auto init = equispaced_opinions(-1.0, 1.0, 100);
    const ModelSpec model{ModelKind::HK, 0.6, std::nullopt};
    SplitMix64 rng(1);
    const auto traj = run_simulation(model, OpinionState(init, 0),
                                     ManipulatorGroup{}, default_stop_rule(
                                         ModelKind::HK),
                                     5000, {0, 2, 4}, rng);
    CHECK(traj.stop_reason == StopReason::converged);
    CHECK(traj.stop_time <= 5000);
    for (std::size_t s = 1; s < traj.snapshots.size(); ++s) {
        CHECK(traj.snapshots[s].time > traj.snapshots[s - 1].time);
    }
    CHECK(traj.final_state().time == traj.stop_time);
}

TEST_CASE("run_simulation never stops while the ramp is still moving") {
    // HK: clusters freeze early, but the schedule keeps ramping; the run
    // must outlive the ramp.
    const auto init = equispaced_opinions(-1.0, 1.0, 20);
    const ManipulatorGroup g{5, -1.0, 1.0, 50};
    SplitMix64 rng(1);
    const auto hk = run_simulation({ModelKind::HK, 0.1, std::nullopt},
                                   OpinionState(init, 0), g,
                                   default_stop_rule(ModelKind::HK), 5000, {},
                                   rng);
    CHECK(hk.stop_time >= 50);

    SplitMix64 rng2(1);
    const auto dw = run_simulation({ModelKind::DW, 0.1, std::nullopt},
                                   OpinionState(init, 0), g,
                                   default_stop_rule(ModelKind::DW), 5000, {},
                                   rng2);
    CHECK(dw.stop_time >= 50);
}

TEST_CASE("run_simulation: dw stops once rounded clusters separate") {
    // Two agents far outside each other's threshold: the partition holds
    // after the very first step.
    SplitMix64 rng(1);
    const auto traj = run_simulation({ModelKind::DW, 0.1, std::nullopt},
                                     OpinionState({-0.9, 0.9}, 0),
                                     ManipulatorGroup{},
                                     default_stop_rule(ModelKind::DW), 5000,
                                     {}, rng);
    CHECK(traj.stop_reason == StopReason::converged);
    CHECK(traj.stop_time == 1);
    CHECK(traj.final_state().opinions == std::vector<double>{-0.9, 0.9});
}

TEST_CASE("dw convergence means separated rounded clusters") {
    const auto init = equispaced_opinions(-1.0, 1.0, 60);
    const ManipulatorGroup g{6, -1.0, 1.0, 120};
    const double eps = 0.15;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SplitMix64 rng(seed);
        const auto traj = run_simulation({ModelKind::DW, eps, std::nullopt},
                                         OpinionState(init, 0), g,
                                         default_stop_rule(ModelKind::DW),
                                         5000, {}, rng);
        if (traj.stop_reason != StopReason::converged) {
            continue;
        }
        CHECK(traj.stop_time >= g.t_delta);
        // independent re-check of the stop rule's claim
        std::vector<long long> rounded;
        for (double v : traj.final_state().opinions) {
            rounded.push_back(std::llround(v * 1000.0));
        }
        rounded.push_back(std::llround(g.f_end * 1000.0));
        std::sort(rounded.begin(), rounded.end());
        for (std::size_t i = 1; i < rounded.size(); ++i) {
            if (rounded[i] != rounded[i - 1]) {
                CHECK(static_cast<double>(rounded[i] - rounded[i - 1]) /
                          1000.0 >
                      eps);
            }
        }
    }
}

TEST_CASE("run_simulation: fixed horizon reports horizon or oscillating") {
    const auto init = equispaced_opinions(-1.0, 1.0, 50);
    SplitMix64 rng(9);
    const auto traj = run_simulation({ModelKind::RWHK, 0.1, std::nullopt},
                                     OpinionState(init, 0), ManipulatorGroup{},
                                     default_stop_rule(ModelKind::RWHK), 200,
                                     {}, rng);
    CHECK(traj.stop_time == 200);
    CHECK((traj.stop_reason == StopReason::horizon ||
           traj.stop_reason == StopReason::oscillating));
}
