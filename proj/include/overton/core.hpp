#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "overton/rng.hpp"

namespace overton {

// The opinion space is fixed to [-1, 1].
inline constexpr double kOpinionMin = -1.0;
inline constexpr double kOpinionMax = 1.0;

/// Opinions of the N normal agents at iteration `time`. Construction
/// validates that the vector is nonempty and every entry lies in [-1, 1].
struct OpinionState {
    std::vector<double> opinions;
    std::int64_t time = 0;

    OpinionState() = default;
    OpinionState(std::vector<double> x, std::int64_t t);

    std::size_t size() const noexcept { return opinions.size(); }
};

/// A group of k agents sharing one scheduled opinion: a linear ramp from
/// f_start to f_end over t_delta iterations, constant at f_end afterwards.
/// t_delta == 0 means stubborn at f_end from t = 0; k == 0 disables the
/// group entirely.
struct ManipulatorGroup {
    std::size_t k = 0;
    double f_start = 0.0;
    double f_end = 0.0;
    std::int64_t t_delta = 0;

    double slope() const noexcept {
        return t_delta > 0 ? (f_end - f_start) / static_cast<double>(t_delta)
                           : 0.0;
    }
};

enum class ModelKind { HK, DW, AWHK, RWHK, ARWHK };

bool model_is_weighted(ModelKind kind) noexcept;
bool model_is_stochastic(ModelKind kind) noexcept;
const char* model_name(ModelKind kind) noexcept;
std::optional<ModelKind> model_from_name(std::string_view name) noexcept;

/// Scheduled opinion of the group at iteration t (total in t >= 0).
double schedule_opinion(const ManipulatorGroup& group, std::int64_t t) noexcept;

/// The N normal opinions followed by k copies of the scheduled opinion.
std::vector<double> extended_opinions(const OpinionState& state,
                                      const ManipulatorGroup& group,
                                      std::int64_t t);

/// Indices j (0-based) with |z[i] - z[j]| <= epsilon over the extended
/// opinion vector z. Inclusive comparison; always contains i itself.
std::vector<std::size_t> confidence_set(const std::vector<double>& z,
                                        std::size_t i, double epsilon);

/// x_i = low + (high - low) * i / (n + 1) for i = 1..n; endpoints excluded.
std::vector<double> equispaced_opinions(double low, double high, std::size_t n);

/// n i.i.d. uniform draws from [-1, 1] on the stream seeded by `seed`.
std::vector<double> uniform_random_opinions(std::size_t n, std::uint64_t seed);

}  // namespace overton
