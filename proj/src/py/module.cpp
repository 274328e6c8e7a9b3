#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "overton/analytic.hpp"
#include "overton/core.hpp"
#include "overton/metrics.hpp"
#include "overton/models.hpp"
#include "overton/sweep.hpp"

namespace py = pybind11;
using namespace overton;

namespace {

// Flat, list-friendly view of a Trajectory for the bindings.
struct PyTrajectory {
    std::vector<std::int64_t> times;
    std::vector<std::vector<double>> snapshots;
    std::vector<double> manipulator_opinions;
    std::int64_t stop_time;
    std::string stop_reason;

    const std::vector<double>& final_opinions() const {
        return snapshots.back();
    }
};

PyTrajectory to_py(const Trajectory& traj) {
    PyTrajectory out;
    for (const auto& s : traj.snapshots) {
        out.times.push_back(s.time);
        out.snapshots.push_back(s.opinions);
    }
    out.manipulator_opinions = traj.manipulator_opinions;
    out.stop_time = traj.stop_time;
    out.stop_reason = stop_reason_name(traj.stop_reason);
    return out;
}

ModelKind kind_from(const std::string& name) {
    const auto kind = model_from_name(name);
    if (!kind) {
        throw py::value_error("unknown model '" + name +
                              "'; expected hk, dw, awhk, rwhk or arwhk");
    }
    return *kind;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bounded-confidence opinion dynamics with a scheduled "
              "manipulative group";

    py::class_<SplitMix64>(m, "SplitMix64")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &SplitMix64::next_u64)
        .def("next_double", &SplitMix64::next_double)
        .def("next_below", &SplitMix64::next_below, py::arg("n"));

    m.def("derive_seed", &derive_seed, py::arg("base_seed"), py::arg("k"),
          py::arg("t_delta"), py::arg("replicate"),
          "Deterministic stream seed for a sweep coordinate");

    py::class_<ManipulatorGroup>(m, "ManipulatorGroup")
        .def(py::init([](std::size_t k, double f_start, double f_end,
                         std::int64_t t_delta) {
                 return ManipulatorGroup{k, f_start, f_end, t_delta};
             }),
             py::arg("k"), py::arg("f_start"), py::arg("f_end"),
             py::arg("t_delta"))
        .def_readonly("k", &ManipulatorGroup::k)
        .def_readonly("f_start", &ManipulatorGroup::f_start)
        .def_readonly("f_end", &ManipulatorGroup::f_end)
        .def_readonly("t_delta", &ManipulatorGroup::t_delta)
        .def("slope", &ManipulatorGroup::slope);

    m.def(
        "schedule_opinion",
        [](const ManipulatorGroup& group, std::int64_t t) {
            if (t < 0) throw py::value_error("t must be >= 0");
            return schedule_opinion(group, t);
        },
        py::arg("group"), py::arg("t"));
    m.def(
        "extended_opinions",
        [](const std::vector<double>& x, const ManipulatorGroup& group,
           std::int64_t t) {
            if (t < 0) throw py::value_error("t must be >= 0");
            return extended_opinions(OpinionState(x, t), group, t);
        },
        py::arg("opinions"), py::arg("group"), py::arg("t"));
    m.def(
        "confidence_set",
        [](const std::vector<double>& z, std::size_t i, double epsilon) {
            if (i >= z.size()) throw py::index_error("agent index out of range");
            return confidence_set(z, i, epsilon);
        },
        py::arg("z"), py::arg("i"), py::arg("epsilon"));
    m.def("equispaced_opinions", &equispaced_opinions, py::arg("low"),
          py::arg("high"), py::arg("n"));
    m.def("uniform_random_opinions", &uniform_random_opinions, py::arg("n"),
          py::arg("seed"));

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def(py::init<std::size_t, std::size_t, std::vector<double>>(),
             py::arg("rows"), py::arg("cols"), py::arg("entries"))
        .def(
            "at",
            [](const WeightMatrix& w, std::size_t i, std::size_t j) {
                if (i >= w.rows() || j >= w.cols()) {
                    throw py::index_error("weight index out of range");
                }
                return w.at(i, j);
            },
            py::arg("i"), py::arg("j"))
        .def_property_readonly("rows", &WeightMatrix::rows)
        .def_property_readonly("cols", &WeightMatrix::cols);

    m.def(
        "sample_weight_matrix",
        [](std::size_t n_normal, std::size_t k_manip, std::uint64_t seed) {
            SplitMix64 rng(seed);
            return sample_weight_matrix(n_normal, k_manip, rng);
        },
        py::arg("n_normal"), py::arg("k_manip"), py::arg("seed"));

    m.def(
        "hk_step",
        [](const std::vector<double>& x, const ManipulatorGroup& group,
           double epsilon, std::int64_t t) {
            return hk_step(OpinionState(x, t), group, epsilon, t).opinions;
        },
        py::arg("opinions"), py::arg("group"), py::arg("epsilon"),
        py::arg("t"));
    m.def(
        "dw_step",
        [](const std::vector<double>& x, const ManipulatorGroup& group,
           double epsilon, std::int64_t t, SplitMix64& rng) {
            return dw_step(OpinionState(x, t), group, epsilon, t, rng).opinions;
        },
        py::arg("opinions"), py::arg("group"), py::arg("epsilon"), py::arg("t"),
        py::arg("rng"));
    const auto bind_weighted = [&m](const char* name, auto step) {
        m.def(
            name,
            [step](const std::vector<double>& x, const ManipulatorGroup& group,
                   double epsilon, const WeightMatrix& weights, std::int64_t t,
                   SplitMix64& rng) {
                return step(OpinionState(x, t), group, epsilon, weights, t, rng)
                    .opinions;
            },
            py::arg("opinions"), py::arg("group"), py::arg("epsilon"),
            py::arg("weights"), py::arg("t"), py::arg("rng"));
    };
    bind_weighted("awhk_step", &awhk_step);
    bind_weighted("rwhk_step", &rwhk_step);
    bind_weighted("arwhk_step", &arwhk_step);

    py::class_<PyTrajectory>(m, "Trajectory")
        .def_readonly("times", &PyTrajectory::times)
        .def_readonly("snapshots", &PyTrajectory::snapshots)
        .def_readonly("manipulator_opinions",
                      &PyTrajectory::manipulator_opinions)
        .def_readonly("stop_time", &PyTrajectory::stop_time)
        .def_readonly("stop_reason", &PyTrajectory::stop_reason)
        .def_property_readonly("final_opinions",
                               &PyTrajectory::final_opinions);

    m.def(
        "run_simulation",
        [](const std::string& model, double epsilon,
           const std::vector<double>& opinions, const ManipulatorGroup& group,
           std::uint64_t seed, std::optional<std::int64_t> horizon,
           const std::vector<std::int64_t>& snapshots) {
            const ModelKind kind = kind_from(model);
            const ModelSpec spec{kind, epsilon, std::nullopt};
            SplitMix64 rng(seed);
            const Trajectory traj = run_simulation(
                spec, OpinionState(opinions, 0), group,
                default_stop_rule(kind),
                horizon ? *horizon : default_horizon(kind), snapshots, rng);
            return to_py(traj);
        },
        py::arg("model"), py::arg("epsilon"), py::arg("opinions"),
        py::arg("group"), py::arg("seed"), py::arg("horizon") = std::nullopt,
        py::arg("snapshots") = std::vector<std::int64_t>{},
        "Run one simulation with the model's default stop rule");

    m.def(
        "run_sweep",
        [](const std::string& model, double epsilon,
           const std::vector<double>& opinions, double f_start, double f_end,
           const std::vector<std::size_t>& k_values,
           const std::vector<std::int64_t>& tdelta_values,
           std::size_t replicates, std::uint64_t base_seed,
           std::optional<std::int64_t> horizon, std::size_t workers,
           double delta, std::size_t h, double alpha, double gap_tolerance) {
            RunSetup setup;
            setup.kind = kind_from(model);
            setup.epsilon = epsilon;
            setup.initial_opinions = opinions;
            setup.f_start = f_start;
            setup.f_end = f_end;
            setup.stop = default_stop_rule(setup.kind);
            setup.horizon = horizon ? *horizon : default_horizon(setup.kind);
            setup.metrics = MetricParams{delta, h, alpha, gap_tolerance};
            SweepGrid grid{k_values, tdelta_values, replicates, base_seed};
            py::list out;
            for (const auto& cell : run_sweep(setup, grid, workers)) {
                py::dict d;
                d["k"] = cell.k;
                d["t_delta"] = cell.t_delta;
                py::list snaps;
                for (const auto& snap : cell.snapshots) {
                    py::dict s;
                    s["snapshot"] = snap.label;
                    s["mean_of_means"] = snap.mean_of_means;
                    s["mean_of_stds"] = snap.mean_of_stds;
                    s["mean_n_clusters"] = snap.mean_n_clusters;
                    s["mean_center"] = snap.mean_center;
                    s["mean_amplitude"] = snap.mean_amplitude;
                    s["mean_n_primary"] = snap.mean_n_primary;
                    snaps.append(s);
                }
                d["snapshots"] = snaps;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("epsilon"), py::arg("opinions"),
        py::arg("f_start"), py::arg("f_end"), py::arg("k_values"),
        py::arg("tdelta_values"), py::arg("replicates") = 1,
        py::arg("base_seed") = 1, py::arg("horizon") = std::nullopt,
        py::arg("workers") = 1, py::arg("delta") = 0.5, py::arg("h") = 200,
        py::arg("alpha") = 0.1, py::arg("gap_tolerance") = 1e-3,
        "Replicated (K, t_delta) grid with both metrics aggregated per "
        "snapshot label");

    py::class_<TwoGroupSystem>(m, "TwoGroupSystem")
        .def(py::init([](std::size_t n, std::size_t k, double x0, double f0,
                         double lam, double epsilon) {
                 return TwoGroupSystem{n, k, x0, f0, lam, epsilon};
             }),
             py::arg("n"), py::arg("k"), py::arg("x0"), py::arg("f0"),
             py::arg("lam"), py::arg("epsilon"))
        .def_readonly("n", &TwoGroupSystem::n_normal)
        .def_readonly("k", &TwoGroupSystem::k_manip)
        .def_readonly("x0", &TwoGroupSystem::x0)
        .def_readonly("f0", &TwoGroupSystem::f0)
        .def_readonly("lam", &TwoGroupSystem::lambda)
        .def_readonly("epsilon", &TwoGroupSystem::epsilon);

    m.def("influence_bound", &influence_bound, py::arg("k"), py::arg("n"),
          py::arg("epsilon"));
    m.def("gap_closed_form", &gap_closed_form, py::arg("system"), py::arg("t"));
    m.def("holds_forever", &holds_forever, py::arg("system"));
    m.def("detachment_time", &detachment_time, py::arg("system"),
          py::arg("horizon"));
    m.def("merge_groups", &merge_groups, py::arg("normal_groups"),
          py::arg("manip_groups"));

    py::class_<Cluster>(m, "Cluster")
        .def_readonly("center", &Cluster::center)
        .def_readonly("size", &Cluster::size);

    py::class_<SmoothedDensity>(m, "SmoothedDensity")
        .def_readonly("h", &SmoothedDensity::h)
        .def_readonly("alpha", &SmoothedDensity::alpha)
        .def_readonly("epsilon", &SmoothedDensity::epsilon)
        .def_readonly("grid", &SmoothedDensity::grid)
        .def_readonly("values", &SmoothedDensity::values);

    py::class_<PrimaryClusterReport>(m, "PrimaryClusterReport")
        .def_readonly("maxima", &PrimaryClusterReport::maxima)
        .def_readonly("raw_weights", &PrimaryClusterReport::raw_weights)
        .def_readonly("effective_weights",
                      &PrimaryClusterReport::effective_weights)
        .def_readonly("surviving", &PrimaryClusterReport::surviving)
        .def_readonly("delta", &PrimaryClusterReport::delta)
        .def_readonly("center", &PrimaryClusterReport::center)
        .def_readonly("amplitude", &PrimaryClusterReport::amplitude);

    m.def("mean_std", &mean_std, py::arg("opinions"));
    m.def(
        "detect_clusters",
        [](std::vector<double> x, double gap_tolerance) {
            std::vector<std::pair<double, std::size_t>> out;
            for (const auto& c :
                 detect_clusters(std::move(x), gap_tolerance).clusters) {
                out.emplace_back(c.center, c.size);
            }
            return out;
        },
        py::arg("opinions"), py::arg("gap_tolerance") = 1e-3);
    m.def("smooth_density", &smooth_density, py::arg("opinions"),
          py::arg("epsilon"), py::arg("h") = 200, py::arg("alpha") = 0.1);
    m.def("find_local_maxima", &find_local_maxima, py::arg("density"));
    m.def("effective_weights", &effective_weights, py::arg("density"),
          py::arg("maxima"));
    m.def("primary_interval", &primary_interval, py::arg("opinions"),
          py::arg("epsilon"), py::arg("delta"), py::arg("h") = 200,
          py::arg("alpha") = 0.1);
}
