#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "overton/analytic.hpp"
#include "overton/metrics.hpp"
#include "overton/core.hpp"
#include "overton/models.hpp"
#include "overton/rng.hpp"

using namespace overton;

TEST_CASE("influence bound") {
    CHECK(influence_bound(0, 100, 0.1) == 0.0);
    CHECK(influence_bound(7, 7, 0.3) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(influence_bound(8, 2, 0.1) == doctest::Approx(0.08).epsilon(1e-15));
    CHECK_THROWS_AS(influence_bound(1, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(influence_bound(1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("gap closed form: anchors and limit") {
    const TwoGroupSystem sys{1, 1, 0.0, 0.0, 0.05, 0.1};
    CHECK(gap_closed_form(sys, 0) == doctest::Approx(0.0));
    CHECK(gap_closed_form(sys, 1) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(gap_closed_form(sys, 200) == doctest::Approx(0.1).epsilon(1e-12));

    const TwoGroupSystem offset{3, 2, 0.2, 0.25, 0.01, 0.1};
    CHECK(gap_closed_form(offset, 0) == doctest::Approx(0.05).epsilon(1e-15));

    const TwoGroupSystem stubborn{5, 2, 0.3, 0.3, 0.0, 0.1};
    for (std::int64_t t : {0, 1, 10, 1000}) {
        CHECK(gap_closed_form(stubborn, t) == doctest::Approx(0.0));
    }

    const TwoGroupSystem no_group{1, 0, 0.0, 0.0, 0.0, 0.1};
    CHECK_THROWS_AS(gap_closed_form(no_group, 1), std::invalid_argument);
}

TEST_CASE("gap approaches lambda (K+N)/K monotonically from f0 = x0") {
    const TwoGroupSystem sys{10, 3, -0.2, -0.2, 0.002, 0.1};
    const double limit = sys.lambda * 13.0 / 3.0;
    double prev = 0.0;
    for (std::int64_t t = 1; t <= 500; ++t) {
        const double g = gap_closed_form(sys, t);
        // non-strict: the iterates saturate at the limit in double precision
        CHECK(std::abs(g) >= std::abs(prev));
        CHECK(std::abs(g) <= std::abs(limit) + 1e-15);
        prev = g;
    }
    CHECK(gap_closed_form(sys, 20000) == doctest::Approx(limit).epsilon(1e-12));
}

TEST_CASE("holds_forever: inclusive boundary") {
    CHECK(holds_forever({1, 1, 0.1, 0.1, 0.05, 0.1}));
    CHECK_FALSE(holds_forever({1, 1, 0.1, 0.1, 0.0501, 0.1}));
    CHECK(holds_forever({4, 2, -0.3, -0.25, 0.0, 0.1}));
    CHECK_FALSE(holds_forever({4, 2, -0.3, 0.3, 0.0, 0.1}));  // too far apart
}

TEST_CASE("detachment time: frozen example and stubborn case") {
    CHECK(detachment_time({1, 1, 0.0, 0.0, 0.2, 0.1}, 100) == 1);
    CHECK_FALSE(detachment_time({1, 1, 0.0, 0.0, 0.0, 0.1}, 1000).has_value());
    CHECK_FALSE(detachment_time({1, 1, 0.0, 0.05, 0.0, 0.1}, 1000).has_value());
}

TEST_CASE("holds_forever implies no detachment (random systems)") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        TwoGroupSystem sys;
        sys.n_normal = rng.next_below(60) + 1;
        sys.k_manip = rng.next_below(30) + 1;
        sys.epsilon = rng.next_in(0.02, 0.6);
        sys.x0 = rng.next_in(-0.8, 0.8);
        sys.f0 = sys.x0 + rng.next_in(-1.0, 1.0) * sys.epsilon;
        const double bound =
            influence_bound(sys.k_manip, sys.n_normal, sys.epsilon);
        sys.lambda = rng.next_in(-0.999, 0.999) * bound;
        REQUIRE(holds_forever(sys));
        CHECK_FALSE(detachment_time(sys, 2000).has_value());
    }
}

TEST_CASE("past the bound the group always detaches") {
    SplitMix64 rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        TwoGroupSystem sys;
        sys.n_normal = rng.next_below(60) + 1;
        sys.k_manip = rng.next_below(30) + 1;
        sys.epsilon = rng.next_in(0.02, 0.6);
        sys.x0 = rng.next_in(-0.8, 0.8);
        sys.f0 = sys.x0;
        const double bound =
            influence_bound(sys.k_manip, sys.n_normal, sys.epsilon);
        const double sign = rng.next_below(2) == 0 ? 1.0 : -1.0;
        sys.lambda = sign * 1.05 * bound;
        REQUIRE_FALSE(holds_forever(sys));
        CHECK(detachment_time(sys, 20000).has_value());
    }
}

TEST_CASE("merge groups") {
    CHECK(merge_groups({{2, 0.2}, {2, 0.4}}, {{1, 0.3}}) ==
          doctest::Approx(0.3).epsilon(1e-15));
    CHECK(merge_groups({{7, -0.4}}, {}) == doctest::Approx(-0.4));
    CHECK(merge_groups({{1, -0.6}, {1, 0.6}}, {}) == doctest::Approx(0.0));
    const std::vector<GroupMass> empty;
    CHECK_THROWS_AS(merge_groups(empty, empty), std::invalid_argument);
}

TEST_CASE("merge over singleton groups is the arithmetic mean") {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = rng.next_below(30) + 1;
        std::vector<double> x(n);
        std::vector<GroupMass> singletons;
        for (double& v : x) {
            v = rng.next_in(-1.0, 1.0);
            singletons.push_back({1, v});
        }
        const auto [mean, sd] = mean_std(x);
        CHECK(merge_groups(singletons, {}) ==
              doctest::Approx(mean).epsilon(1e-13));
    }
}

TEST_CASE("merge groups is invariant under splitting") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.next_below(8) + 2;
        const double x = rng.next_in(-1.0, 1.0);
        const double f = rng.next_in(-1.0, 1.0);
        const std::size_t k = rng.next_below(10) + 2;

        const double whole = merge_groups({{n, x}}, {{k, f}});
        std::vector<GroupMass> split_normals;
        for (std::size_t i = 0; i < n; ++i) split_normals.push_back({1, x});
        const std::size_t k1 = rng.next_below(k - 1) + 1;
        const double split =
            merge_groups(split_normals, {{k1, f}, {k - k1, f}});
        CHECK(whole == doctest::Approx(split).epsilon(1e-13));
    }
}

TEST_CASE("closed form matches the real hk iteration while attached") {
    SplitMix64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        TwoGroupSystem sys;
        sys.n_normal = rng.next_below(10) + 1;
        sys.k_manip = rng.next_below(10) + 1;
        sys.epsilon = rng.next_in(0.05, 0.4);
        sys.x0 = rng.next_in(-0.5, 0.5);
        sys.f0 = sys.x0 + rng.next_in(-0.9, 0.9) * sys.epsilon;
        const std::int64_t t_max = 300;
        const double bound =
            influence_bound(sys.k_manip, sys.n_normal, sys.epsilon);
        // keep the ramp inside [-1, 1] for the whole compared window
        double lam = rng.next_in(-1.0, 1.0) * bound;
        const double cap = (1.0 - std::abs(sys.f0)) / static_cast<double>(t_max);
        if (std::abs(lam) > cap) lam = lam > 0 ? cap : -cap;
        const double f_final =
            sys.f0 + lam * static_cast<double>(t_max);
        const ManipulatorGroup ramp{sys.k_manip, sys.f0, f_final, t_max};
        sys.lambda = ramp.slope();
        REQUIRE(holds_forever(sys));

        OpinionState state(std::vector<double>(sys.n_normal, sys.x0), 0);
        for (std::int64_t t = 0; t <= t_max; ++t) {
            const double gap =
                schedule_opinion(ramp, t) - state.opinions.front();
            CHECK(std::abs(gap - gap_closed_form(sys, t)) < 1e-9);
            if (t < t_max) {
                state = hk_step(state, ramp, sys.epsilon, t);
            }
        }
    }
}
