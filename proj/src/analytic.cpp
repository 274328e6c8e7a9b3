#include "overton/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace overton {

namespace {

// Absolute slack on gap-vs-epsilon comparisons. The boundary slope
// |lambda| = K eps / (K+N) drives the gap to exactly eps in the limit;
// accumulated roundoff in the iterated recurrence stays below ~1e-13 while
// genuine detachments overshoot by lambda (K+N)/K - eps, far above this.
constexpr double kGapSlack = 1e-12;

}  // namespace

double influence_bound(std::size_t k, std::size_t n, double epsilon) {
    if (n == 0) {
        throw std::invalid_argument("influence_bound: n must be >= 1");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("influence_bound: epsilon must be > 0");
    }
    return static_cast<double>(k) * epsilon / static_cast<double>(k + n);
}

double gap_closed_form(const TwoGroupSystem& sys, std::int64_t t) {
    if (sys.k_manip == 0) {
        throw std::invalid_argument(
            "gap_closed_form: k_manip must be >= 1 (formula divides by K)");
    }
    const double n = static_cast<double>(sys.n_normal);
    const double k = static_cast<double>(sys.k_manip);
    const double ratio_pow = std::pow(n / (k + n), static_cast<double>(t));
    return ratio_pow * (sys.f0 - sys.x0) +
           sys.lambda * (k + n) / k * (1.0 - ratio_pow);
}

bool holds_forever(const TwoGroupSystem& sys) {
    return std::abs(sys.f0 - sys.x0) <= sys.epsilon &&
           std::abs(sys.lambda) <=
               influence_bound(sys.k_manip, sys.n_normal, sys.epsilon);
}

std::optional<std::int64_t> detachment_time(const TwoGroupSystem& sys,
                                            std::int64_t horizon) {
    const double n = static_cast<double>(sys.n_normal);
    const double k = static_cast<double>(sys.k_manip);
    const double shrink = n / (k + n);
    // Gap form of x(t+1) = (K f(t) + N x(t)) / (K+N); iterating the gap
    // directly avoids cancellation once f(t) grows large.
    double gap = sys.f0 - sys.x0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        gap = shrink * gap + sys.lambda;
        if (std::abs(gap) > sys.epsilon + kGapSlack) {
            return t;
        }
    }
    return std::nullopt;
}

double merge_groups(const std::vector<GroupMass>& normal_groups,
                    const std::vector<GroupMass>& manip_groups) {
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& [count, opinion] : manip_groups) {
        weighted += static_cast<double>(count) * opinion;
        total += static_cast<double>(count);
    }
    for (const auto& [count, opinion] : normal_groups) {
        weighted += static_cast<double>(count) * opinion;
        total += static_cast<double>(count);
    }
    if (total == 0.0) {
        throw std::invalid_argument("merge_groups: no agents to merge");
    }
    return weighted / total;
}

}  // namespace overton
