#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macesim/estimators.hpp"
#include "macesim/geometry.hpp"
#include "macesim/harness.hpp"
#include "macesim/metrics.hpp"
#include "macesim/pilot.hpp"
#include "macesim/tracker.hpp"

namespace py = pybind11;
using namespace macesim;

namespace {

py::dict row_to_dict(const ResultRow& r) {
    py::dict d;
    d["scheme"] = r.scheme;
    d["param"] = r.param;
    d["value"] = r.value;
    d["nmse"] = r.nmse;
    d["nmse_db"] = r.nmse_db;
    d["nmse_theory"] = r.nmse_theory;
    d["fronthaul"] = r.fronthaul;
    d["inv_dim"] = r.inv_dim;
    d["realizations"] = r.realizations;
    d["blocks"] = r.blocks;
    d["seed"] = r.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cell-free massive MIMO pilot-phase channel estimation simulator";

    py::enum_<ChannelMode>(m, "ChannelMode")
        .value("rician", ChannelMode::rician)
        .value("pure_los", ChannelMode::pure_los)
        .value("pure_nlos", ChannelMode::pure_nlos);

    py::enum_<LosMode>(m, "LosMode")
        .value("running", LosMode::running)
        .value("frozen", LosMode::frozen);

    py::enum_<StatsSource>(m, "StatsSource")
        .value("true_stats", StatsSource::true_stats)
        .value("tracked", StatsSource::tracked);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("L", &SimConfig::L)
        .def_readwrite("N", &SimConfig::N)
        .def_readwrite("K", &SimConfig::K)
        .def_readwrite("tau_p", &SimConfig::tau_p)
        .def_readwrite("p", &SimConfig::p)
        .def_readwrite("sigma2", &SimConfig::sigma2)
        .def_readwrite("eta", &SimConfig::eta)
        .def_readwrite("B", &SimConfig::B)
        .def_readwrite("area_m", &SimConfig::area_m)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("blocks", &SimConfig::blocks)
        .def_readwrite("warmup", &SimConfig::warmup)
        .def_readwrite("channel_mode", &SimConfig::channel_mode)
        .def_readwrite("los_mode", &SimConfig::los_mode)
        .def_readwrite("normalize_fusion", &SimConfig::normalize_fusion)
        .def("validate", &SimConfig::validate);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("base", &ExperimentSpec::base)
        .def_readwrite("sweep_param", &ExperimentSpec::sweep_param)
        .def_readwrite("sweep_values", &ExperimentSpec::sweep_values)
        .def_readwrite("realizations", &ExperimentSpec::realizations)
        .def_readwrite("stats_source", &ExperimentSpec::stats_source)
        .def_readwrite("out_prefix", &ExperimentSpec::out_prefix);

    m.def("apply_preset", &apply_preset, py::arg("spec"), py::arg("name"),
          "Load the fig1 or fig2 experiment preset into a spec");

    m.def(
        "run",
        [](const ExperimentSpec& spec) {
            const RunResult result = run(spec);
            py::list rows;
            for (const auto& r : result.rows) rows.append(row_to_dict(r));
            return rows;
        },
        py::arg("spec"), "Run the sweep and return the result rows as dicts");

    m.def(
        "run_to_files",
        [](const ExperimentSpec& spec) {
            const RunResult result = run(spec);
            emit_csv(result.rows, spec.out_prefix + ".csv");
            emit_plot_data(result.rows, spec.out_prefix);
            return spec.out_prefix + ".csv";
        },
        py::arg("spec"), "Run the sweep and write <prefix>.csv plus plot data");

    m.def(
        "make_pilot_book",
        [](int tau_p) { return make_pilot_book(tau_p).phi; }, py::arg("tau_p"),
        "Rows are mutually orthogonal pilots with squared norm tau_p");

    m.def("psd_project", &psd_project, py::arg("H"),
          "Clip negative eigenvalues to obtain the nearest Hermitian PSD matrix");

    m.def(
        "fronthaul",
        [](const std::string& scheme, int L, int N, int tau_p) {
            return fronthaul(scheme_from_string(scheme), L, N, tau_p);
        },
        py::arg("scheme"), py::arg("L"), py::arg("N"), py::arg("tau_p"),
        "Complex scalars exchanged per coherence block");

    m.def(
        "inversion_dim",
        [](const std::string& scheme, int L, int N) {
            return inversion_dim(scheme_from_string(scheme), L, N);
        },
        py::arg("scheme"), py::arg("L"), py::arg("N"),
        "Side of the matrix solved per channel estimate");

    m.def("theoretical_nmse", &theoretical_nmse, py::arg("rbreve"), py::arg("r"),
          py::arg("q_tk"), py::arg("p_k"), py::arg("tau_p"), py::arg("offset"),
          py::arg("length"),
          "Closed-form NMSE of the LMMSE estimate over the selected block");
}
