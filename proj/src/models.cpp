#include "overton/models.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace overton {

namespace {

// Weighted updates are mathematically confined to [-1, 1]; the clamp only
// absorbs floating-point slack and anything beyond 1e-12 is a model bug.
constexpr double kClampSlack = 1e-12;

double clamp_opinion(double v) {
    if (v < kOpinionMin) {
        if (v < kOpinionMin - kClampSlack) {
            throw std::logic_error("weighted step left the opinion space: " +
                                   std::to_string(v));
        }
        return kOpinionMin;
    }
    if (v > kOpinionMax) {
        if (v > kOpinionMax + kClampSlack) {
            throw std::logic_error("weighted step left the opinion space: " +
                                   std::to_string(v));
        }
        return kOpinionMax;
    }
    return v;
}

// Partner index over the other n_total - 1 extended agents (j != i).
std::size_t draw_partner(std::size_t i, std::size_t n_total, SplitMix64& rng) {
    const auto idx = static_cast<std::size_t>(rng.next_below(n_total - 1));
    return idx < i ? idx : idx + 1;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Shared body of the three weighted rules; the flags pick which branches
// move the agent.
OpinionState weighted_step(const OpinionState& state,
                           const ManipulatorGroup& group, double epsilon,
                           const WeightMatrix& weights, std::int64_t t,
                           SplitMix64& rng, bool attract_inside,
                           bool repel_outside) {
    assert(state.time == t);
    const auto& x = state.opinions;
    const std::size_t n = x.size();
    const std::size_t total = n + group.k;
    const double f = schedule_opinion(group, t);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (total <= 1) {
            out[i] = x[i];
            continue;
        }
        const std::size_t j = draw_partner(i, total, rng);
        const double z = j < n ? x[j] : f;
        double v = x[i];
        const bool inside = std::abs(x[i] - z) <= epsilon;
        if ((inside && attract_inside) || (!inside && repel_outside)) {
            const double s = sign_of(x[i] - z);
            const double move = 0.5 * std::abs(x[i] + weights.at(i, j) * z) *
                                (1.0 - std::abs(x[i]));
            v = inside ? x[i] - s * move : x[i] + s * move;
        }
        out[i] = clamp_opinion(v);
    }
    return {std::move(out), t + 1};
}

bool rounded_partition(const std::vector<double>& x,
                       std::optional<double> manipulator, double epsilon) {
    std::vector<long long> rounded;
    rounded.reserve(x.size() + 1);
    for (double v : x) rounded.push_back(std::llround(v * 1000.0));
    if (manipulator) rounded.push_back(std::llround(*manipulator * 1000.0));
    std::sort(rounded.begin(), rounded.end());
    for (std::size_t i = 1; i < rounded.size(); ++i) {
        if (rounded[i] == rounded[i - 1]) {
            continue;  // same cluster
        }
        const double gap =
            static_cast<double>(rounded[i] - rounded[i - 1]) / 1000.0;
        if (gap <= epsilon) {
            return false;
        }
    }
    return true;
}

}  // namespace

WeightMatrix::WeightMatrix(std::size_t n_rows, std::size_t n_cols,
                           std::vector<double> entries)
    : n_rows_(n_rows), n_cols_(n_cols), entries_(std::move(entries)) {
    if (entries_.size() != n_rows_ * n_cols_) {
        throw std::invalid_argument("WeightMatrix: entry count mismatch");
    }
    for (double w : entries_) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("WeightMatrix: weight outside [0, 1]");
        }
    }
}

WeightMatrix sample_weight_matrix(std::size_t n_normal, std::size_t k_manip,
                                  SplitMix64& rng) {
    if (n_normal == 0) {
        throw std::invalid_argument("sample_weight_matrix: n_normal >= 1");
    }
    std::vector<double> entries(n_normal * (n_normal + k_manip));
    for (double& w : entries) {
        w = rng.next_double();
    }
    return {n_normal, n_normal + k_manip, std::move(entries)};
}

const char* stop_reason_name(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::converged: return "converged";
        case StopReason::horizon: return "horizon";
        case StopReason::oscillating: return "oscillating";
    }
    return "?";
}

StopRule default_stop_rule(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::HK: return {StopRuleKind::max_change, 5e-4};
        case ModelKind::DW: return {StopRuleKind::rounded_clusters, 5e-4};
        default: return {StopRuleKind::fixed_horizon, 5e-4};
    }
}

std::int64_t default_horizon(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::AWHK:
        case ModelKind::ARWHK: return 500;
        case ModelKind::RWHK: return 1000;
        default: return 5000;
    }
}

OpinionState hk_step(const OpinionState& state, const ManipulatorGroup& group,
                     double epsilon, std::int64_t t) {
    assert(state.time == t);
    const auto& x = state.opinions;
    const std::size_t n = x.size();
    const double f = schedule_opinion(group, t);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(x[i] - x[j]) <= epsilon) {
                sum += x[j];
                ++count;
            }
        }
        if (group.k > 0 && std::abs(x[i] - f) <= epsilon) {
            sum += static_cast<double>(group.k) * f;
            count += group.k;
        }
        out[i] = sum / static_cast<double>(count);
    }
    return {std::move(out), t + 1};
}

OpinionState dw_step(const OpinionState& state, const ManipulatorGroup& group,
                     double epsilon, std::int64_t t, SplitMix64& rng) {
    assert(state.time == t);
    const auto& x = state.opinions;
    const std::size_t n = x.size();
    const std::size_t total = n + group.k;
    const double f = schedule_opinion(group, t);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (total <= 1) {
            out[i] = x[i];
            continue;
        }
        const std::size_t j = draw_partner(i, total, rng);
        const double z = j < n ? x[j] : f;
        out[i] = std::abs(x[i] - z) <= epsilon ? 0.5 * (x[i] + z) : x[i];
    }
    return {std::move(out), t + 1};
}

OpinionState awhk_step(const OpinionState& state, const ManipulatorGroup& group,
                       double epsilon, const WeightMatrix& weights,
                       std::int64_t t, SplitMix64& rng) {
    return weighted_step(state, group, epsilon, weights, t, rng, true, false);
}

OpinionState rwhk_step(const OpinionState& state, const ManipulatorGroup& group,
                       double epsilon, const WeightMatrix& weights,
                       std::int64_t t, SplitMix64& rng) {
    return weighted_step(state, group, epsilon, weights, t, rng, false, true);
}

OpinionState arwhk_step(const OpinionState& state,
                        const ManipulatorGroup& group, double epsilon,
                        const WeightMatrix& weights, std::int64_t t,
                        SplitMix64& rng) {
    return weighted_step(state, group, epsilon, weights, t, rng, true, true);
}

Trajectory run_simulation(const ModelSpec& model, const OpinionState& init,
                          const ManipulatorGroup& group, const StopRule& stop,
                          std::int64_t horizon,
                          const std::vector<std::int64_t>& snapshot_times,
                          SplitMix64& rng) {
    if (horizon < init.time) {
        throw std::invalid_argument("run_simulation: horizon before start");
    }
    std::optional<WeightMatrix> sampled;
    const WeightMatrix* weights = nullptr;
    if (model_is_weighted(model.kind)) {
        if (model.weights) {
            weights = &*model.weights;
            if (weights->rows() != init.size() ||
                weights->cols() != init.size() + group.k) {
                throw std::invalid_argument(
                    "run_simulation: weight matrix dimensions do not match "
                    "the population");
            }
        } else {
            sampled = sample_weight_matrix(init.size(), group.k, rng);
            weights = &*sampled;
        }
    }

    std::vector<std::int64_t> wanted = snapshot_times;
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    Trajectory traj;
    auto record = [&](const OpinionState& s) {
        traj.snapshots.push_back(s);
        traj.manipulator_opinions.push_back(schedule_opinion(group, s.time));
    };
    std::size_t next_wanted = 0;
    auto maybe_record = [&](const OpinionState& s) {
        while (next_wanted < wanted.size() && wanted[next_wanted] < s.time) {
            ++next_wanted;
        }
        if (next_wanted < wanted.size() && wanted[next_wanted] == s.time) {
            record(s);
            ++next_wanted;
        }
    };

    OpinionState state = init;
    maybe_record(state);
    StopReason reason = StopReason::horizon;
    bool converged = false;
    double last_max_change = 0.0;

    while (state.time < horizon && !converged) {
        const std::int64_t t = state.time;
        OpinionState next = [&] {
            switch (model.kind) {
                case ModelKind::HK:
                    return hk_step(state, group, model.epsilon, t);
                case ModelKind::DW:
                    return dw_step(state, group, model.epsilon, t, rng);
                case ModelKind::AWHK:
                    return awhk_step(state, group, model.epsilon, *weights, t,
                                     rng);
                case ModelKind::RWHK:
                    return rwhk_step(state, group, model.epsilon, *weights, t,
                                     rng);
                case ModelKind::ARWHK:
                    return arwhk_step(state, group, model.epsilon, *weights, t,
                                      rng);
            }
            throw std::logic_error("unreachable model kind");
        }();

        double max_change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            max_change =
                std::max(max_change, std::abs(next.opinions[i] - state.opinions[i]));
        }
        last_max_change = max_change;
        // The scheduled group's own movement counts: the run has not
        // settled while the ramp is still in flight.
        const double schedule_change =
            group.k > 0 ? std::abs(schedule_opinion(group, t + 1) -
                                   schedule_opinion(group, t))
                        : 0.0;
        state = std::move(next);
        maybe_record(state);

        switch (stop.kind) {
            case StopRuleKind::max_change:
                if (std::max(max_change, schedule_change) <= stop.tolerance) {
                    converged = true;
                    reason = StopReason::converged;
                }
                break;
            case StopRuleKind::rounded_clusters: {
                const bool settled =
                    group.k == 0 || state.time >= group.t_delta;
                if (settled &&
                    rounded_partition(state.opinions,
                                      group.k > 0
                                          ? std::optional<double>(group.f_end)
                                          : std::nullopt,
                                      model.epsilon)) {
                    converged = true;
                    reason = StopReason::converged;
                }
                break;
            }
            case StopRuleKind::fixed_horizon:
                break;
        }
    }

    if (!converged && stop.kind == StopRuleKind::fixed_horizon) {
        reason = last_max_change > stop.tolerance ? StopReason::oscillating
                                                  : StopReason::horizon;
    }
    traj.stop_time = state.time;
    traj.stop_reason = reason;
    if (traj.snapshots.empty() || traj.snapshots.back().time != state.time) {
        record(state);
    }
    return traj;
}

}  // namespace overton
