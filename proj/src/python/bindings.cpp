// Thin Python surface over the C++ core. Matrices cross as complex numpy
// arrays; results come back as plain dicts.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddbst/average_study.hpp"
#include "ddbst/channel.hpp"
#include "ddbst/ensemble.hpp"
#include "ddbst/estimator.hpp"
#include "ddbst/io.hpp"
#include "ddbst/stabilizer.hpp"
#include "ddbst/variance.hpp"

namespace py = pybind11;
using namespace ddbst;

namespace {

py::object from_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict estimate_py(const ComplexMatrix& rho, const ComplexMatrix& o, std::uint64_t shots,
                     std::uint64_t seed, const std::string& strategy, std::uint64_t batches,
                     unsigned workers) {
    const DensityMatrix state(rho);
    const HermitianObservable obs(o);
    EstimationConfig cfg;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.strategy = parse_strategy(strategy);
    cfg.batches = batches;
    cfg.workers = workers;
    cfg.validate();
    EstimationReport rep;
    {
        py::gil_scoped_release release;
        rep = estimate(state, ObservableEntryAccessor::from_dense(obs), build_ensemble(state.dim()), cfg);
    }
    return from_json(estimation_report_to_json(rep));
}

py::dict variance_py(const ComplexMatrix& sigma, const ComplexMatrix& o) {
    const VarianceReport v = variance_exact(DensityMatrix(sigma), HermitianObservable(o));
    py::dict out;
    out["variance_exact"] = v.variance_exact;
    out["v_diag"] = v.v_diag;
    out["diag_term"] = v.diag_term;
    out["worst_bound"] = v.worst_bound;
    out["avg_bound"] = v.avg_bound;
    out["centered_variance"] = v.centered_variance();
    return out;
}

py::list proportion_py(const std::vector<int>& qubits, std::uint64_t trials,
                       const std::vector<std::string>& thresholds, std::uint64_t seed,
                       const std::string& family, unsigned workers) {
    AverageStudyConfig cfg;
    cfg.qubit_range = qubits;
    cfg.trials_per_dim = trials;
    for (const auto& t : thresholds) cfg.thresholds.push_back(ThresholdExpr::parse(t));
    cfg.seed = seed;
    cfg.state_family = parse_family(family);
    cfg.workers = workers;
    ProportionTable table;
    {
        py::gil_scoped_release release;
        table = run_proportion_study(cfg);
    }
    py::list rows;
    for (const auto& r : table.rows) {
        py::dict row;
        row["n"] = r.n;
        row["d"] = r.d;
        row["threshold"] = r.threshold_label;
        row["s"] = r.s;
        row["fraction"] = r.fraction;
        row["trials"] = r.trials;
        rows.append(row);
    }
    return rows;
}

py::dict stabilizer_py(int n, int r, const ComplexMatrix& o, double epsilon, double sigma,
                       const std::string& l2_mode, int direct_max_rank, std::uint64_t seed) {
    RandomStream rng(seed, derive_stream_id(0x5354, 1));
    const AffineStabilizerState psi = random_affine_stabilizer(n, r, rng);
    const HermitianObservable obs(o);
    if (obs.dim() != (Index{1} << n)) throw DimensionError("observable dimension is not 2^n");
    EstimationConfig cfg;
    cfg.seed = seed;
    cfg.epsilon = epsilon;
    cfg.sigma = sigma;
    Theorem3Config t3;
    t3.direct_max_rank = direct_max_rank;
    const auto rep = theorem3_estimate(psi, ObservableEntryAccessor::from_dense(obs), obs.hs_norm_sq(), cfg,
                                       parse_l2_mode(l2_mode), t3);
    json j = rep.to_json();
    j["state"] = stabilizer_to_json(psi);
    py::dict out = from_json(j);
    out["amplitudes"] = amplitudes(psi);
    return out;
}

} // namespace

PYBIND11_MODULE(_ddbst, m) {
    m.doc() = "Dense dual basis shadow tomography";
    m.attr("__version__") = DDBST_VERSION;

    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    m.def("num_snapshots", [](Index d) { return enumerate_snapshots(d).size(); }, py::arg("d"));
    m.def("ensemble_summary", [](Index d) { return from_json(ensemble_summary_json(build_ensemble(d))); },
          py::arg("d"));
    m.def("channel_apply", py::overload_cast<const ComplexMatrix&>(&channel_apply), py::arg("x"));
    m.def("inverse_channel_apply", &inverse_channel_apply, py::arg("x"));
    m.def("estimate", &estimate_py, py::arg("rho"), py::arg("observable"), py::arg("shots") = 1000,
          py::arg("seed") = 0, py::arg("strategy") = "mean", py::arg("batches") = 1, py::arg("workers") = 1);
    m.def("variance_exact", &variance_py, py::arg("sigma"), py::arg("observable"));
    m.def("max_deviation", [](const ComplexMatrix& rho) { return max_deviation(DensityMatrix(rho)); },
          py::arg("rho"));
    m.def("proportion_study", &proportion_py, py::arg("qubits"), py::arg("trials"),
          py::arg("thresholds"), py::arg("seed") = 0, py::arg("family") = "haar", py::arg("workers") = 1);
    m.def("stabilizer_estimate", &stabilizer_py, py::arg("n"), py::arg("r"), py::arg("observable"),
          py::arg("epsilon") = 0.1, py::arg("sigma") = 0.05, py::arg("l2_mode") = "exact",
          py::arg("direct_max_rank") = 10, py::arg("seed") = 0);
}
