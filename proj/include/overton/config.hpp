#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "overton/sweep.hpp"

namespace overton {

/// Configuration or schema problem; the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PopulationSpec {
    enum class Kind { equispaced, explicit_list, uniform_random };
    Kind kind = Kind::equispaced;
    double low = -1.0;   // equispaced
    double high = 1.0;   // equispaced
    std::size_t n = 0;   // equispaced / uniform_random
    std::vector<double> opinions;  // explicit_list
    std::uint64_t seed = 1;        // uniform_random

    std::vector<double> build() const;
};

struct ManipulatorSpec {
    std::size_t k = 0;
    double f_start = -1.0;
    double f_end = 1.0;
    std::int64_t t_delta = 0;

    ManipulatorGroup group() const { return {k, f_start, f_end, t_delta}; }
};

struct OracleSpec {
    std::size_t n = 1;
    std::size_t k = 1;
    double x0 = 0.0;
    double f0 = 0.0;
    double lambda = 0.0;
    std::int64_t horizon = 1000;
};

struct OutputSpec {
    std::optional<std::string> trajectory;   // JSONL snapshots
    std::optional<std::string> summary;      // summary JSON
    std::optional<std::string> svg;          // trajectory SVG
    std::optional<std::string> sweep_csv;    // aggregate table
    std::optional<std::string> weights_csv;  // effective-weight histogram
    std::optional<std::string> heatmap_svg;  // one per snapshot label
};

struct RunConfig {
    std::optional<ModelKind> model;
    std::optional<double> epsilon;
    std::optional<PopulationSpec> population;
    ManipulatorSpec manipulators;
    std::optional<StopRule> stop_rule;
    std::optional<std::int64_t> horizon;
    MetricParams metrics;
    std::vector<std::int64_t> snapshot_times;
    bool snapshot_all = false;
    std::uint64_t seed = 1;
    std::optional<SweepGrid> sweep;
    std::optional<OracleSpec> oracle;
    OutputSpec output;

    ModelKind require_model() const;
    double require_epsilon() const;
    const PopulationSpec& require_population() const;
    const SweepGrid& require_sweep() const;
    const OracleSpec& require_oracle() const;
    StopRule resolved_stop() const;
    std::int64_t resolved_horizon() const;
};

/// Parse and schema-validate a config document. Unknown keys are rejected
/// with their full key path.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config(const std::string& path);

}  // namespace overton
