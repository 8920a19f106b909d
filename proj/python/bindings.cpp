#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tgflock/analysis.hpp"
#include "tgflock/error.hpp"
#include "tgflock/experiment.hpp"
#include "tgflock/generators.hpp"
#include "tgflock/io.hpp"

namespace py = pybind11;
using namespace tgflock;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_dense(const Array& a) {
    if (a.ndim() == 1) {
        DenseMatrix m(static_cast<std::size_t>(a.shape(0)), 1);
        std::copy(a.data(), a.data() + a.size(), m.data().begin());
        return m;
    }
    if (a.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 1-D or 2-D array");
    DenseMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data().begin());
    return m;
}

Array to_numpy(const DenseMatrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

Array stack(const std::vector<DenseMatrix>& frames) {
    if (frames.empty()) return Array(std::vector<py::ssize_t>{0, 0, 0});
    const std::size_t r = frames.front().rows(), c = frames.front().cols();
    Array out({frames.size(), r, c});
    double* p = out.mutable_data();
    for (const auto& f : frames) p = std::copy(f.data().begin(), f.data().end(), p);
    return out;
}

WeightedDigraph graph_of(const Array& weights) { return WeightedDigraph(to_dense(weights)); }

py::dict certificate(const ConnectivityCertificate& c) {
    py::dict d;
    d["kind"] = to_string(c.kind);
    d["holds"] = c.holds;
    if (c.witness) {
        py::dict w;
        w["first"] = c.witness->first;
        w["second"] = c.witness->second ? py::cast(*c.witness->second) : py::none();
        w["reason"] = c.witness->reason;
        d["witness"] = w;
    } else {
        d["witness"] = py::none();
    }
    d["derived_rate"] = c.derived_rate ? py::cast(*c.derived_rate) : py::none();
    d["measured_min_neighbors"] = c.measured_min_neighbors ? py::cast(*c.measured_min_neighbors) : py::none();
    d["measured_max_neighbors"] = c.measured_max_neighbors ? py::cast(*c.measured_max_neighbors) : py::none();
    return d;
}

py::dict trajectory(const TrajectoryRecord& t) {
    py::dict d;
    d["model"] = to_string(t.model);
    Array times(std::vector<py::ssize_t>{static_cast<py::ssize_t>(t.times.size())});
    std::copy(t.times.begin(), t.times.end(), times.mutable_data());
    d["times"] = times;
    d["positions"] = stack(t.positions);
    d["velocities"] = stack(t.velocities);
    d["couplings"] = stack(t.couplings);
    return d;
}

IntegrationOptions options(double horizon, double dt, std::size_t sample_every, bool record_coupling) {
    IntegrationOptions o;
    o.horizon = horizon;
    o.dt = dt;
    o.sample_every = sample_every;
    o.record_coupling = record_coupling;
    return o;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core: graphs, generators, particle and Laplacian dynamics, analysis, scenarios";

    static py::exception<Error> error_type(m, "TgflockError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            exc.attr("time") = e.time() ? py::cast(*e.time()) : py::none();
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    m.attr("__version__") = toolkit_version();

    // graphs
    m.def("laplacian", [](const Array& w) { return to_numpy(laplacian(graph_of(w)).entries()); }, py::arg("weights"));
    m.def("spectrum", [](const Array& w) { return symmetric_spectrum(laplacian(graph_of(w))); }, py::arg("weights"));
    m.def("fiedler_value", [](const Array& w) { return fiedler_value(graph_of(w)); }, py::arg("weights"));
    m.def("is_neighbor_connected", [](const Array& w) { return certificate(is_neighbor_connected(graph_of(w))); },
          py::arg("weights"));
    m.def("is_strongly_connected", [](const Array& w) { return certificate(is_strongly_connected(graph_of(w))); },
          py::arg("weights"));
    m.def("check_assumption_b",
          [](const Array& w, double gamma_m, double epsilon, double n) {
              return certificate(check_assumption_b(graph_of(w), gamma_m, epsilon, n));
          },
          py::arg("weights"), py::arg("gamma_m"), py::arg("epsilon"), py::arg("n"));

    // generators
    m.def("one_leader", [](std::size_t n, double w) { return to_numpy(one_leader(n, w).weights()); }, py::arg("n"),
          py::arg("weight") = 1.0);
    m.def("two_leaders", [](std::size_t n, double w) { return to_numpy(two_leaders(n, w).weights()); }, py::arg("n"),
          py::arg("weight") = 1.0);
    m.def("three_group",
          [](std::array<std::size_t, 3> sizes, double w) { return to_numpy(three_group_directed(sizes, w).weights()); },
          py::arg("sizes"), py::arg("weight") = 1.0);
    m.def("circulant", [](std::size_t n, std::size_t k, double w) { return to_numpy(circulant_regular(n, k, w).weights()); },
          py::arg("n"), py::arg("k"), py::arg("weight") = 1.0);
    m.def("overlapping_cliques",
          [](std::size_t n, std::size_t n_min, std::size_t n_max, double w) {
              return to_numpy(overlapping_cliques(n, n_min, n_max, w).weights());
          },
          py::arg("n"), py::arg("n_min"), py::arg("n_max"), py::arg("weight") = 1.0);
    m.def("perturb_weights",
          [](const Array& w, double gamma_m, double epsilon, std::uint64_t seed) {
              return to_numpy(perturb_weights(graph_of(w), gamma_m, epsilon, seed).weights());
          },
          py::arg("weights"), py::arg("gamma_m"), py::arg("epsilon"), py::arg("seed"));
    m.def("assumption_b_margin",
          [](std::size_t n, std::size_t n_min, std::size_t n_max, double ratio) {
              const auto r = assumption_b_margin(n, n_min, n_max, ratio);
              return py::make_tuple(r.delta, r.argmin_s);
          },
          py::arg("n_vertices"), py::arg("n_min"), py::arg("n_max"), py::arg("n_ratio"));
    m.def("corollary3_ratio", &corollary3_ratio, py::arg("a_m"), py::arg("n_min"), py::arg("n_max"));

    // dynamics
    m.def("similarity",
          [](const std::vector<double>& a, const std::vector<double>& b) { return similarity(a, b); });
    m.def("integrate",
          [](const std::string& model, const Array& x, const Array& v, std::optional<Array> kappa, double horizon,
             double dt, std::size_t sample_every, double kappa_global, double epsilon, double radius_d,
             bool record_coupling) {
              ModelParams p{model_kind_from_string(model), kappa_global, epsilon, radius_d};
              std::optional<CouplingMatrix> k;
              if (kappa) k = to_dense(*kappa);
              const ParticleEnsemble e{to_dense(x), to_dense(v)};
              TrajectoryRecord t;
              {
                  py::gil_scoped_release release;
                  t = integrate(p, e, k, options(horizon, dt, sample_every, record_coupling));
              }
              return trajectory(t);
          },
          py::arg("model"), py::arg("positions"), py::arg("velocities"), py::arg("kappa") = py::none(),
          py::arg("horizon") = 1.0, py::arg("dt") = 1e-3, py::arg("sample_every") = 1, py::arg("kappa_global") = 1.0,
          py::arg("epsilon") = 1.0, py::arg("radius_d") = 1.0, py::arg("record_coupling") = false);
    m.def("integrate_laplacian",
          [](const Array& weights, const Array& x0, double horizon, double dt, std::size_t sample_every) {
              const auto g = TemporalGraph::constant(graph_of(weights));
              const DenseMatrix x = to_dense(x0);
              TrajectoryRecord t;
              {
                  py::gil_scoped_release release;
                  t = integrate_laplacian(g, x, options(horizon, dt, sample_every, false));
              }
              return trajectory(t);
          },
          py::arg("weights"), py::arg("x0"), py::arg("horizon") = 1.0, py::arg("dt") = 1e-3,
          py::arg("sample_every") = 1);

    // analysis
    m.def("diameter", [](const Array& x) { return diameter(to_dense(x)); });
    m.def("fluctuation_norm", [](const Array& x) { return fluctuation_norm(to_dense(x)); });
    m.def("velocity_deviation", [](const Array& v) { return velocity_deviation(to_dense(v)); });
    m.def("cluster_count",
          [](const Array& x, double d) {
              const auto c = cluster_count(to_dense(x), d);
              return py::make_tuple(c.count, c.labels);
          },
          py::arg("positions"), py::arg("radius_d"));
    m.def("two_body_classify",
          [](const std::vector<double>& x1, const std::vector<double>& x2, const std::vector<double>& v1,
             const std::vector<double>& v2, double kappa, double d) {
              const auto r = two_body_classify(x1, x2, v1, v2, kappa, d);
              py::dict out;
              out["verdict"] = to_string(r.verdict);
              out["lhs_value"] = r.lhs_value;
              out["threshold"] = r.threshold;
              out["reason"] = r.reason;
              return out;
          },
          py::arg("x1"), py::arg("x2"), py::arg("v1"), py::arg("v2"), py::arg("kappa_global"), py::arg("radius_d"));
    m.def("e_matrix", [](const Array& w) { return to_numpy(e_matrix(graph_of(w))); });
    m.def("row_dominance_margin", [](const Array& w) {
        const auto g = graph_of(w);
        return row_dominance_margin(e_matrix(g), g);
    });

    // scenarios; configs cross the boundary as JSON text
    m.def("list_presets", [] {
        std::vector<py::dict> out;
        for (const auto& p : list_presets()) {
            py::dict d;
            d["name"] = p.name;
            d["description"] = p.description;
            d["anchor"] = p.anchor;
            out.push_back(d);
        }
        return out;
    });
    m.def("preset_config_json", [](const std::string& name) { return preset_config(name).dump(); });
    m.def("run_scenario_json", [](const std::string& config) {
        const auto c = ScenarioConfig::from_json(parse_json(config));
        RunManifest r;
        {
            py::gil_scoped_release release;
            r = run_scenario(c);
        }
        Json j = r.to_json();
        j["run_dir"] = r.run_dir.string();
        j["summary"] = r.summary;
        return j.dump();
    });
    m.def("graph_to_json", [](const Array& w) { return graph_to_json(graph_of(w)); });
    m.def("graph_from_json", [](const std::string& text) { return to_numpy(graph_from_json(text).weights()); });
}
