#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "overton/core.hpp"
#include "overton/rng.hpp"

namespace overton {

/// Trust weights w[i][j] in [0, 1]: one row per normal agent, one column per
/// extended agent (N normals followed by k manipulators). Sampled once at
/// t = 0 and fixed for the run; the diagonal is never read.
class WeightMatrix {
  public:
    WeightMatrix(std::size_t n_rows, std::size_t n_cols,
                 std::vector<double> entries);

    double at(std::size_t i, std::size_t j) const noexcept {
        return entries_[i * n_cols_ + j];
    }
    std::size_t rows() const noexcept { return n_rows_; }
    std::size_t cols() const noexcept { return n_cols_; }
    const std::vector<double>& entries() const noexcept { return entries_; }

  private:
    std::size_t n_rows_;
    std::size_t n_cols_;
    std::vector<double> entries_;
};

/// n_normal x (n_normal + k_manip) entries drawn i.i.d. uniform from [0, 1)
/// in row-major order.
WeightMatrix sample_weight_matrix(std::size_t n_normal, std::size_t k_manip,
                                  SplitMix64& rng);

struct ModelSpec {
    ModelKind kind = ModelKind::HK;
    double epsilon = 0.1;
    std::optional<WeightMatrix> weights;  // weighted models only
};

enum class StopReason { converged, horizon, oscillating };
const char* stop_reason_name(StopReason reason) noexcept;

enum class StopRuleKind {
    max_change,        // max_j |x_j(t) - x_j(t-1)| <= tolerance
    rounded_clusters,  // 3-decimal clusters pairwise separated by > epsilon
    fixed_horizon,     // run to the horizon unconditionally
};

struct StopRule {
    StopRuleKind kind = StopRuleKind::max_change;
    double tolerance = 5e-4;  // max_change threshold; also the movement
                              // threshold that classifies a fixed-horizon
                              // run as oscillating
};

StopRule default_stop_rule(ModelKind kind) noexcept;
std::int64_t default_horizon(ModelKind kind) noexcept;

struct Trajectory {
    std::vector<OpinionState> snapshots;       // requested times + final state
    std::vector<double> manipulator_opinions;  // schedule value per snapshot
    std::int64_t stop_time = 0;
    StopReason stop_reason = StopReason::converged;

    const OpinionState& final_state() const { return snapshots.back(); }
};

// One simultaneous step of each rule: every normal agent updates from the
// frozen time-t state; the scheduled group is never updated by any rule.

OpinionState hk_step(const OpinionState& state, const ManipulatorGroup& group,
                     double epsilon, std::int64_t t);

OpinionState dw_step(const OpinionState& state, const ManipulatorGroup& group,
                     double epsilon, std::int64_t t, SplitMix64& rng);

OpinionState awhk_step(const OpinionState& state, const ManipulatorGroup& group,
                       double epsilon, const WeightMatrix& weights,
                       std::int64_t t, SplitMix64& rng);

OpinionState rwhk_step(const OpinionState& state, const ManipulatorGroup& group,
                       double epsilon, const WeightMatrix& weights,
                       std::int64_t t, SplitMix64& rng);

OpinionState arwhk_step(const OpinionState& state,
                        const ManipulatorGroup& group, double epsilon,
                        const WeightMatrix& weights, std::int64_t t,
                        SplitMix64& rng);

/// Iterate the model from `init` until its stop rule fires or `horizon` is
/// reached, recording the states at `snapshot_times` (times past the stop
/// are dropped) plus the final state. For weighted models without an
/// explicit weight matrix, one is sampled from `rng` before the first step.
Trajectory run_simulation(const ModelSpec& model, const OpinionState& init,
                          const ManipulatorGroup& group, const StopRule& stop,
                          std::int64_t horizon,
                          const std::vector<std::int64_t>& snapshot_times,
                          SplitMix64& rng);

}  // namespace overton
