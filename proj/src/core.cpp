#include "overton/core.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace overton {

OpinionState::OpinionState(std::vector<double> x, std::int64_t t)
    : opinions(std::move(x)), time(t) {
    if (opinions.empty()) {
        throw std::invalid_argument("OpinionState: opinion vector is empty");
    }
    if (t < 0) {
        throw std::invalid_argument("OpinionState: negative time index");
    }
    for (double v : opinions) {
        if (!(v >= kOpinionMin && v <= kOpinionMax)) {
            throw std::invalid_argument(
                "OpinionState: opinion " + std::to_string(v) +
                " outside the opinion space [-1, 1]");
        }
    }
}

bool model_is_weighted(ModelKind kind) noexcept {
    return kind == ModelKind::AWHK || kind == ModelKind::RWHK ||
           kind == ModelKind::ARWHK;
}

bool model_is_stochastic(ModelKind kind) noexcept {
    return kind != ModelKind::HK;
}

const char* model_name(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::HK: return "hk";
        case ModelKind::DW: return "dw";
        case ModelKind::AWHK: return "awhk";
        case ModelKind::RWHK: return "rwhk";
        case ModelKind::ARWHK: return "arwhk";
    }
    return "?";
}

std::optional<ModelKind> model_from_name(std::string_view name) noexcept {
    if (name == "hk") return ModelKind::HK;
    if (name == "dw") return ModelKind::DW;
    if (name == "awhk") return ModelKind::AWHK;
    if (name == "rwhk") return ModelKind::RWHK;
    if (name == "arwhk") return ModelKind::ARWHK;
    return std::nullopt;
}

double schedule_opinion(const ManipulatorGroup& group, std::int64_t t) noexcept {
    assert(t >= 0);
    if (t >= group.t_delta) {
        return group.f_end;
    }
    return group.f_start + group.slope() * static_cast<double>(t);
}

std::vector<double> extended_opinions(const OpinionState& state,
                                      const ManipulatorGroup& group,
                                      std::int64_t t) {
    std::vector<double> z = state.opinions;
    if (group.k > 0) {
        z.resize(state.size() + group.k, schedule_opinion(group, t));
    }
    return z;
}

std::vector<std::size_t> confidence_set(const std::vector<double>& z,
                                        std::size_t i, double epsilon) {
    assert(i < z.size());
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (std::abs(z[i] - z[j]) <= epsilon) {
            members.push_back(j);
        }
    }
    return members;
}

std::vector<double> equispaced_opinions(double low, double high,
                                        std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("equispaced_opinions: n must be >= 1");
    }
    std::vector<double> x(n);
    const double span = high - low;
    for (std::size_t i = 1; i <= n; ++i) {
        x[i - 1] = low + span * static_cast<double>(i) /
                             static_cast<double>(n + 1);
    }
    return x;
}

std::vector<double> uniform_random_opinions(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("uniform_random_opinions: n must be >= 1");
    }
    SplitMix64 rng(seed);
    std::vector<double> x(n);
    for (double& v : x) {
        v = rng.next_in(kOpinionMin, kOpinionMax);
    }
    return x;
}

}  // namespace overton
