#include "overton/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace overton {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError("config: " + path + ": " + message);
}

void check_object(const json& node, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!node.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(path + "." + key, "unknown key");
        }
    }
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        fail(path + "." + key, "expected a number");
    }
    return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& path,
                         const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        fail(path + "." + key, "expected an integer");
    }
    return v.get<std::int64_t>();
}

std::int64_t get_nonnegative(const json& obj, const std::string& path,
                             const std::string& key) {
    const std::int64_t v = get_integer(obj, path, key);
    if (v < 0) {
        fail(path + "." + key, "must be >= 0");
    }
    return v;
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (!obj.contains(k)) {
            fail(path, std::string("missing required key '") + k + "'");
        }
    }
}

double opinion_value(const json& obj, const std::string& path,
                     const std::string& key) {
    const double v = get_number(obj, path, key);
    if (!(v >= kOpinionMin && v <= kOpinionMax)) {
        fail(path + "." + key, "must lie in [-1, 1]");
    }
    return v;
}

PopulationSpec parse_population(const json& node, const std::string& path) {
    check_object(node, path, {"type", "low", "high", "n", "opinions", "seed"});
    require_keys(node, path, {"type"});
    const std::string type = node.at("type").get<std::string>();
    PopulationSpec spec;
    if (type == "equispaced") {
        spec.kind = PopulationSpec::Kind::equispaced;
        require_keys(node, path, {"low", "high", "n"});
        spec.low = opinion_value(node, path, "low");
        spec.high = opinion_value(node, path, "high");
        spec.n = static_cast<std::size_t>(get_nonnegative(node, path, "n"));
        if (spec.n == 0) fail(path + ".n", "must be >= 1");
        if (!(spec.low < spec.high)) fail(path, "low must be < high");
    } else if (type == "explicit") {
        spec.kind = PopulationSpec::Kind::explicit_list;
        require_keys(node, path, {"opinions"});
        const auto& arr = node.at("opinions");
        if (!arr.is_array() || arr.empty()) {
            fail(path + ".opinions", "expected a nonempty array");
        }
        for (const auto& v : arr) {
            if (!v.is_number()) fail(path + ".opinions", "expected numbers");
            const double x = v.get<double>();
            if (!(x >= kOpinionMin && x <= kOpinionMax)) {
                fail(path + ".opinions", "entries must lie in [-1, 1]");
            }
            spec.opinions.push_back(x);
        }
    } else if (type == "uniform_random") {
        spec.kind = PopulationSpec::Kind::uniform_random;
        require_keys(node, path, {"n", "seed"});
        spec.n = static_cast<std::size_t>(get_nonnegative(node, path, "n"));
        if (spec.n == 0) fail(path + ".n", "must be >= 1");
        spec.seed =
            static_cast<std::uint64_t>(get_nonnegative(node, path, "seed"));
    } else {
        fail(path + ".type",
             "expected one of 'equispaced', 'explicit', 'uniform_random'");
    }
    return spec;
}

ManipulatorSpec parse_manipulators(const json& node, const std::string& path) {
    check_object(node, path, {"k", "f_start", "f_end", "t_delta"});
    require_keys(node, path, {"k", "f_start", "f_end", "t_delta"});
    ManipulatorSpec spec;
    spec.k = static_cast<std::size_t>(get_nonnegative(node, path, "k"));
    spec.f_start = opinion_value(node, path, "f_start");
    spec.f_end = opinion_value(node, path, "f_end");
    spec.t_delta = get_nonnegative(node, path, "t_delta");
    return spec;
}

StopRule parse_stop_rule(const json& node, const std::string& path) {
    StopRule rule;
    const std::string name = node.at("rule").get<std::string>();
    if (name == "max_change") {
        rule.kind = StopRuleKind::max_change;
    } else if (name == "rounded_clusters") {
        rule.kind = StopRuleKind::rounded_clusters;
    } else if (name == "fixed_horizon") {
        rule.kind = StopRuleKind::fixed_horizon;
    } else {
        fail(path + ".rule",
             "expected one of 'max_change', 'rounded_clusters', "
             "'fixed_horizon'");
    }
    if (node.contains("tolerance")) {
        rule.tolerance = get_number(node, path, "tolerance");
        if (!(rule.tolerance > 0.0)) fail(path + ".tolerance", "must be > 0");
    }
    return rule;
}

MetricParams parse_metrics(const json& node, const std::string& path) {
    check_object(node, path, {"delta", "h", "alpha", "gap_tolerance"});
    MetricParams params;
    if (node.contains("delta")) {
        params.delta = get_number(node, path, "delta");
        if (params.delta < 0.0) fail(path + ".delta", "must be >= 0");
    }
    if (node.contains("h")) {
        const std::int64_t h = get_nonnegative(node, path, "h");
        if (h < 2) fail(path + ".h", "must be >= 2");
        params.h = static_cast<std::size_t>(h);
    }
    if (node.contains("alpha")) {
        params.alpha = get_number(node, path, "alpha");
        if (!(params.alpha > 0.0)) fail(path + ".alpha", "must be > 0");
    }
    if (node.contains("gap_tolerance")) {
        params.gap_tolerance = get_number(node, path, "gap_tolerance");
        if (!(params.gap_tolerance > 0.0)) {
            fail(path + ".gap_tolerance", "must be > 0");
        }
    }
    return params;
}

SweepGrid parse_sweep(const json& node, const std::string& path) {
    check_object(node, path,
                 {"k_values", "tdelta_values", "replicates", "base_seed"});
    require_keys(node, path, {"k_values", "tdelta_values"});
    SweepGrid grid;
    const auto read_list = [&](const char* key, auto& out) {
        const auto& arr = node.at(key);
        if (!arr.is_array() || arr.empty()) {
            fail(path + "." + key, "expected a nonempty array of integers");
        }
        for (const auto& v : arr) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                fail(path + "." + key, "entries must be integers >= 0");
            }
            out.push_back(
                static_cast<typename std::decay_t<decltype(out)>::value_type>(
                    v.get<std::int64_t>()));
        }
    };
    read_list("k_values", grid.k_values);
    read_list("tdelta_values", grid.tdelta_values);
    if (node.contains("replicates")) {
        const std::int64_t r = get_nonnegative(node, path, "replicates");
        if (r < 1) fail(path + ".replicates", "must be >= 1");
        grid.replicates = static_cast<std::size_t>(r);
    }
    if (node.contains("base_seed")) {
        grid.base_seed =
            static_cast<std::uint64_t>(get_nonnegative(node, path, "base_seed"));
    }
    return grid;
}

OracleSpec parse_oracle(const json& node, const std::string& path) {
    check_object(node, path, {"n", "k", "x0", "f0", "lambda", "horizon"});
    require_keys(node, path, {"n", "k", "x0", "f0", "lambda"});
    OracleSpec spec;
    spec.n = static_cast<std::size_t>(get_nonnegative(node, path, "n"));
    spec.k = static_cast<std::size_t>(get_nonnegative(node, path, "k"));
    if (spec.n == 0) fail(path + ".n", "must be >= 1");
    if (spec.k == 0) fail(path + ".k", "must be >= 1");
    spec.x0 = opinion_value(node, path, "x0");
    spec.f0 = opinion_value(node, path, "f0");
    spec.lambda = get_number(node, path, "lambda");
    if (node.contains("horizon")) {
        spec.horizon = get_nonnegative(node, path, "horizon");
    }
    return spec;
}

OutputSpec parse_output(const json& node, const std::string& path) {
    check_object(node, path, {"trajectory", "summary", "svg", "sweep_csv",
                              "weights_csv", "heatmap_svg"});
    OutputSpec out;
    const auto read = [&](const char* key, std::optional<std::string>& slot) {
        if (node.contains(key)) {
            if (!node.at(key).is_string()) {
                fail(path + "." + key, "expected a string path");
            }
            slot = node.at(key).get<std::string>();
        }
    };
    read("trajectory", out.trajectory);
    read("summary", out.summary);
    read("svg", out.svg);
    read("sweep_csv", out.sweep_csv);
    read("weights_csv", out.weights_csv);
    read("heatmap_svg", out.heatmap_svg);
    return out;
}

}  // namespace

std::vector<double> PopulationSpec::build() const {
    switch (kind) {
        case Kind::equispaced: return equispaced_opinions(low, high, n);
        case Kind::explicit_list: return opinions;
        case Kind::uniform_random: return uniform_random_opinions(n, seed);
    }
    throw std::logic_error("unreachable population kind");
}

ModelKind RunConfig::require_model() const {
    if (!model) throw ConfigError("config: missing required key 'model'");
    return *model;
}

double RunConfig::require_epsilon() const {
    if (!epsilon) throw ConfigError("config: missing required key 'epsilon'");
    return *epsilon;
}

const PopulationSpec& RunConfig::require_population() const {
    if (!population) {
        throw ConfigError("config: missing required key 'population'");
    }
    return *population;
}

const SweepGrid& RunConfig::require_sweep() const {
    if (!sweep) throw ConfigError("config: missing required key 'sweep'");
    return *sweep;
}

const OracleSpec& RunConfig::require_oracle() const {
    if (!oracle) throw ConfigError("config: missing required key 'oracle'");
    return *oracle;
}

StopRule RunConfig::resolved_stop() const {
    return stop_rule ? *stop_rule : default_stop_rule(require_model());
}

std::int64_t RunConfig::resolved_horizon() const {
    return horizon ? *horizon : default_horizon(require_model());
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    check_object(doc, "$",
                 {"model", "epsilon", "population", "manipulators", "stop",
                  "metrics", "snapshots", "seed", "sweep", "oracle", "output"});
    RunConfig cfg;
    if (doc.contains("model")) {
        if (!doc.at("model").is_string()) {
            fail("$.model", "expected a string");
        }
        const std::string name = doc.at("model").get<std::string>();
        const auto kind = model_from_name(name);
        if (!kind) {
            fail("$.model", "'" + name +
                                "' is not one of 'hk', 'dw', 'awhk', "
                                "'rwhk', 'arwhk'");
        }
        cfg.model = *kind;
    }
    if (doc.contains("epsilon")) {
        const double eps = get_number(doc, "$", "epsilon");
        if (!(eps > 0.0)) fail("$.epsilon", "must be > 0");
        cfg.epsilon = eps;
    }
    if (doc.contains("population")) {
        cfg.population = parse_population(doc.at("population"), "$.population");
    }
    if (doc.contains("manipulators")) {
        cfg.manipulators =
            parse_manipulators(doc.at("manipulators"), "$.manipulators");
    }
    if (doc.contains("stop")) {
        const auto& node = doc.at("stop");
        check_object(node, "$.stop", {"rule", "horizon", "tolerance"});
        if (node.contains("rule")) {
            cfg.stop_rule = parse_stop_rule(node, "$.stop");
        } else if (node.contains("tolerance")) {
            fail("$.stop.tolerance", "requires an explicit 'rule'");
        }
        if (node.contains("horizon")) {
            cfg.horizon = get_nonnegative(node, "$.stop", "horizon");
        }
    }
    if (doc.contains("metrics")) {
        cfg.metrics = parse_metrics(doc.at("metrics"), "$.metrics");
    }
    if (doc.contains("snapshots")) {
        const auto& node = doc.at("snapshots");
        if (node.is_string() && node.get<std::string>() == "all") {
            cfg.snapshot_all = true;
        } else if (node.is_array()) {
            for (const auto& v : node) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                    fail("$.snapshots", "entries must be integers >= 0");
                }
                cfg.snapshot_times.push_back(v.get<std::int64_t>());
            }
        } else {
            fail("$.snapshots", "expected an array of times or \"all\"");
        }
    }
    if (doc.contains("seed")) {
        cfg.seed = static_cast<std::uint64_t>(get_nonnegative(doc, "$", "seed"));
    }
    if (doc.contains("sweep")) {
        cfg.sweep = parse_sweep(doc.at("sweep"), "$.sweep");
    }
    if (doc.contains("oracle")) {
        cfg.oracle = parse_oracle(doc.at("oracle"), "$.oracle");
    }
    if (doc.contains("output")) {
        cfg.output = parse_output(doc.at("output"), "$.output");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace overton
