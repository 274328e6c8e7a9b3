#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace overton {

/// One aggregated cluster of N normal agents at x0 coupled to K scheduled
/// agents on the unbounded ramp f(t) = f0 + lambda * t. The closed forms
/// require |f0 - x0| <= epsilon at t = 0.
struct TwoGroupSystem {
    std::size_t n_normal = 1;
    std::size_t k_manip = 1;
    double x0 = 0.0;
    double f0 = 0.0;
    double lambda = 0.0;
    double epsilon = 0.1;
};

/// Largest ramp slope the group can sustain without losing the normal
/// cluster: K * epsilon / (K + N).
double influence_bound(std::size_t k, std::size_t n, double epsilon);

/// Signed gap f(t) - x(t) under permanent coupling:
///   (N/(K+N))^t (f0 - x0) + lambda (K+N)/K (1 - (N/(K+N))^t).
/// Throws std::invalid_argument when k_manip == 0.
double gap_closed_form(const TwoGroupSystem& sys, std::int64_t t);

/// True iff |f0 - x0| <= epsilon and |lambda| <= influence_bound (both
/// inclusive), i.e. the group keeps the cluster for all t.
bool holds_forever(const TwoGroupSystem& sys);

/// Smallest t <= horizon with |f(t) - x(t)| > epsilon, evaluated by
/// iterating the coupled recurrence (valid through the first crossing);
/// nullopt if the gap never exceeds epsilon by the horizon.
std::optional<std::int64_t> detachment_time(const TwoGroupSystem& sys,
                                            std::int64_t horizon);

/// (count, opinion) mass of one group.
using GroupMass = std::pair<std::size_t, double>;

/// Common value all normal groups take after one simultaneous HK step when
/// every listed opinion lies in one epsilon-ball:
///   (sum K_j f_j + sum N_i x_i) / (sum K_j + sum N_i).
/// Throws std::invalid_argument when the total mass is zero.
double merge_groups(const std::vector<GroupMass>& normal_groups,
                    const std::vector<GroupMass>& manip_groups);

}  // namespace overton
