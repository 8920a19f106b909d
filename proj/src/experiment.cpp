#include "tgflock/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tgflock/error.hpp"
#include "tgflock/generators.hpp"
#include "tgflock/io.hpp"
#include "tgflock/rng.hpp"

#ifndef TGFLOCK_VERSION
#define TGFLOCK_VERSION "0.0.0"
#endif

namespace tgflock {

namespace {

constexpr std::uint64_t kPositionStream = 1;
constexpr std::uint64_t kVelocityStream = 2;
constexpr std::uint64_t kCouplingStream = 3;
constexpr std::uint64_t kTwoBodyStream = 4;

const std::vector<std::string> kExperiments = {"laplacian_family", "cs_ensemble", "radius_sweep", "two_body"};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        config_error(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) config_error(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        config_error(std::string("field '") + key + "' has the wrong type");
    }
}

std::string label_number(double x) { return format_double(x); }

std::string matrix_csv(const DenseMatrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

double polar_angle_deg(double x, double y) {
    double a = std::atan2(y, x) * 180.0 / std::numbers::pi;
    if (a < 0.0) a += 360.0;
    if (a >= 360.0) a -= 360.0;
    return a;
}

// Collects output files of one run and their digests.
class RunWriter {
public:
    explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_file_atomic(dir_ / name, content);
        files_.push_back({name, sha256_hex(content), content.size()});
    }

    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
    [[nodiscard]] const std::vector<OutputFile>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputFile> files_;
};

Json series_summary(const MetricSeries& s, std::optional<double> envelope_rate, std::optional<bool> satisfied) {
    Json j;
    j["name"] = s.name;
    j["final_value"] = s.values.empty() ? Json(nullptr) : Json(s.values.back());
    const auto slope = log_slope(s);
    j["log_slope"] = slope ? Json(*slope) : Json(nullptr);
    j["envelope_rate"] = envelope_rate ? Json(*envelope_rate) : Json(nullptr);
    j["envelope_satisfied"] = satisfied ? Json(*satisfied) : Json(nullptr);
    return j;
}

IntegrationOptions options_for(const ScenarioConfig& c) {
    IntegrationOptions o;
    o.horizon = c.horizon;
    o.dt = c.dt;
    o.sample_every = c.sample_every;
    return o;
}

ModelParams model_from_json(const Json& j, const ModelParams& base) {
    ModelParams m = base;
    if (!j.is_object()) config_error("model must be an object");
    if (j.contains("kind")) {
        try {
            m.model = model_kind_from_string(j.at("kind").get<std::string>());
        } catch (const Error& e) {
            config_error(e.what());
        }
    }
    m.kappa_global = get_or(j, "kappa", m.kappa_global);
    m.epsilon = get_or(j, "epsilon", m.epsilon);
    m.radius_d = get_or(j, "radius_d", m.radius_d);
    if (!(m.radius_d > 0.0)) config_error("model.radius_d must be positive");
    if (!(m.kappa_global >= 0.0) || !(m.epsilon >= 0.0)) config_error("model.kappa and model.epsilon must be nonnegative");
    return m;
}

Json model_to_json(const ModelParams& m) {
    return Json{{"kind", to_string(m.model)}, {"kappa", m.kappa_global}, {"epsilon", m.epsilon}, {"radius_d", m.radius_d}};
}

// ---------------------------------------------------------------- laplacian

Json run_laplacian_family(const ScenarioConfig& c, RunWriter& out) {
    const std::string metric = get_or<std::string>(c.params, "metric", "diameter");
    const Json series_list = get_or(c.params, "series", Json::array());
    if (!series_list.is_array() || series_list.empty()) config_error("params.series must be a nonempty array");
    const Json envelope = get_or(c.params, "envelope", Json::object());
    const InitialState init = make_initial_state(c.initial_data, c.seed);

    Json results = Json::array();
    for (const Json& entry : series_list) {
        const std::string name = require<std::string>(entry, "name");
        const Json gspec = require<Json>(entry, "graph");
        const TemporalGraph graph = make_graph(gspec, c.seed, c.dt, c.horizon);
        if (graph.size() != init.ensemble.agents()) config_error("series '" + name + "': graph size differs from N");

        const TrajectoryRecord traj = integrate_laplacian(graph, init.ensemble.positions, options_for(c));
        MetricSeries s = metric_series(traj, metric);
        s.name = name + "_" + metric;
        out.write(s.name + ".csv", metric_series_csv(s));

        std::optional<double> rate;
        Json extra = Json::object();
        if (envelope.contains("kind")) {
            const EnvelopeKind kind = envelope_kind_from_string(envelope.at("kind").get<std::string>());
            EnvelopeParams p;
            p.n_vertices = graph.size();
            p.alpha_m = get_or(envelope, "alpha_m", 0.0);
            p.w_m = get_or(envelope, "w_m", 0.0);
            p.gamma_m = get_or(envelope, "gamma_m", 0.0);
            if (kind == EnvelopeKind::AssumptionB) {
                p.n_ratio = require<double>(entry, "n_ratio");
                const double eps = get_or(entry, "epsilon", p.gamma_m / p.n_ratio);
                const auto cert = check_assumption_b(graph.graph_for_piece(0), p.gamma_m, eps, p.n_ratio);
                if (!cert.holds) {
                    throw Error(ErrorKind::PreconditionViolated,
                                "series '" + name + "' fails the neighbor-count/weight conditions: " + cert.witness->reason);
                }
                const auto margin = assumption_b_margin(graph.size(), *cert.measured_min_neighbors,
                                                        *cert.measured_max_neighbors, p.n_ratio);
                p.delta = margin.delta;
                extra["measured_min_neighbors"] = *cert.measured_min_neighbors;
                extra["measured_max_neighbors"] = *cert.measured_max_neighbors;
                extra["delta"] = margin.delta;
                extra["argmin_s"] = margin.argmin_s;
                extra["statement_rate"] = p.delta > 0.0 ? Json(envelope_rate(kind, p)) : Json(nullptr);
                if (p.delta > 0.0) rate = assumption_b_proof_rate(p);
            } else {
                rate = envelope_rate(kind, p);
            }
        }
        std::optional<bool> satisfied;
        if (rate) {
            const double c0 = s.values.front();
            MetricSeries env{name + "_envelope", s.times, {}};
            bool ok = true;
            for (std::size_t k = 0; k < s.times.size(); ++k) {
                env.values.push_back(c0 * std::exp(-*rate * s.times[k]));
                ok = ok && s.values[k] <= env.values.back() * (1.0 + 1e-6);
            }
            satisfied = ok;
            out.write(env.name + ".csv", metric_series_csv(env));
        }
        Json j = series_summary(s, rate, satisfied);
        j.update(extra);
        results.push_back(std::move(j));
    }
    return Json{{"series", results}, {"envelope_constant", "initial metric value"}};
}

// ---------------------------------------------------------------- particles

Json cluster_json(const std::vector<ClusterSummary>& clusters, std::size_t major_min) {
    Json list = Json::array();
    std::size_t major = 0;
    for (const auto& cl : clusters) {
        list.push_back({{"size", cl.size}, {"angle_deg", cl.angle_deg}});
        major += cl.size >= major_min ? 1 : 0;
    }
    return Json{{"clusters", list}, {"major_clusters", major}};
}

std::string angle_csv(const DenseMatrix& v) {
    std::string out = "agent,angle_deg\n";
    for (std::size_t i = 0; i < v.rows(); ++i) {
        out += std::to_string(i) + ',' + format_double(polar_angle_deg(v(i, 0), v(i, 1))) + '\n';
    }
    return out;
}

DenseMatrix distance_matrix(const DenseMatrix& x) {
    DenseMatrix d(x.rows(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.rows(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) s += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
            d(i, j) = std::sqrt(s);
        }
    }
    return d;
}

Json run_cs_ensemble(const ScenarioConfig& c, RunWriter& out) {
    Json variants = get_or(c.params, "variants", Json::array());
    if (variants.empty()) variants.push_back(Json{{"label", to_string(c.model.model)}});
    const std::size_t runs = get_or<std::size_t>(c.params, "runs", 1);
    const std::size_t major_min = get_or<std::size_t>(c.params, "major_cluster_min", 2);
    const bool write_trajectory = get_or(c.params, "write_trajectory", false);
    std::vector<std::string> metrics = c.outputs;
    if (metrics.empty()) metrics = {"velocity_deviation"};

    Json results = Json::array();
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t seed = c.seed + r;
        const InitialState init = make_initial_state(c.initial_data, seed);
        for (const Json& variant : variants) {
            const ModelParams model = model_from_json(get_or(variant, "model", Json::object()), c.model);
            if (model.model == ModelKind::Laplacian) config_error("cs_ensemble needs a particle model");
            const std::string label = get_or<std::string>(variant, "label", to_string(model.model)) + "_s" + std::to_string(seed);
            const auto angle_times = get_or(variant, "snapshot_times", std::vector<double>{});
            const auto kappa_times = get_or(variant, "kappa_times", std::vector<double>{});
            const auto distance_times = get_or(variant, "distance_times", std::vector<double>{});

            IntegrationOptions opts = options_for(c);
            opts.record_coupling = model.model == ModelKind::AdaptiveCS && !kappa_times.empty();
            double kappa_lo = std::numeric_limits<double>::infinity();
            double kappa_hi = -std::numeric_limits<double>::infinity();
            if (model.model == ModelKind::AdaptiveCS) {
                opts.observer = [&](double, std::span<const double> y, const StateLayout& layout) {
                    const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(layout.coupling_offset()), y.end());
                    kappa_lo = std::min(kappa_lo, *lo);
                    kappa_hi = std::max(kappa_hi, *hi);
                };
            }
            const TrajectoryRecord traj = integrate(model, init.ensemble, init.coupling, opts);

            Json run{{"label", label}, {"seed", seed}, {"model", model_to_json(model)}};
            Json metric_list = Json::array();
            for (const auto& name : metrics) {
                MetricSeries s = metric_series(traj, name, model.radius_d);
                s.name = label + "_" + name;
                out.write(s.name + ".csv", metric_series_csv(s));
                metric_list.push_back(series_summary(s, std::nullopt, std::nullopt));
            }
            run["metrics"] = metric_list;
            if (init.ensemble.dim() == 2) {
                run["final"] = cluster_json(cluster_report(traj, c.horizon, model.radius_d), major_min);
                for (const double t : angle_times) {
                    out.write(label + "_angles_t" + label_number(t) + ".csv", angle_csv(traj.velocities[nearest_sample(traj, t)]));
                }
            }
            for (const double t : kappa_times) {
                if (traj.couplings.empty()) break;
                out.write(label + "_kappa_t" + label_number(t) + ".csv", matrix_csv(traj.couplings[nearest_sample(traj, t)]));
            }
            for (const double t : distance_times) {
                out.write(label + "_distance_t" + label_number(t) + ".csv",
                          matrix_csv(distance_matrix(traj.positions[nearest_sample(traj, t)])));
            }
            if (model.model == ModelKind::AdaptiveCS) {
                run["kappa_min"] = kappa_lo;
                run["kappa_max"] = kappa_hi;
            }
            if (write_trajectory) {
                std::ostringstream ss;
                traj.write_csv(ss);
                out.write(label + "_trajectory.csv", ss.str());
            }
            results.push_back(std::move(run));
        }
    }
    return Json{{"runs", results}};
}

// ------------------------------------------------------------- radius sweep

Json run_radius_sweep(const ScenarioConfig& c, RunWriter& out) {
    const auto radii = require<std::vector<double>>(c.params, "radii");
    if (radii.empty()) config_error("params.radii must be nonempty");
    const double cluster_time = get_or(c.params, "cluster_time", c.horizon);
    const double deviation_time = get_or(c.params, "deviation_time", c.horizon);
    const auto heatmap_radii = get_or(c.params, "heatmap_radii", std::vector<double>{});
    const std::size_t major_min = get_or<std::size_t>(c.params, "major_cluster_min", 2);
    if (cluster_time > c.horizon || deviation_time > c.horizon) config_error("sweep times exceed the horizon");
    const InitialState init = make_initial_state(c.initial_data, c.seed);

    std::string table = "d,cluster_count,major_clusters,singletons,velocity_deviation\n";
    Json rows = Json::array();
    for (const double d : radii) {
        ModelParams model = c.model;
        model.radius_d = d;
        if (!(d > 0.0)) config_error("radii must be positive");
        const TrajectoryRecord traj = integrate(model, init.ensemble, init.coupling, options_for(c));
        const std::size_t kc = nearest_sample(traj, cluster_time);
        const Clustering cl = cluster_count(traj.positions[kc], d);
        const std::size_t major = static_cast<std::size_t>(
            std::count_if(cl.sizes.begin(), cl.sizes.end(), [&](std::size_t s) { return s >= major_min; }));
        const std::size_t singletons =
            static_cast<std::size_t>(std::count(cl.sizes.begin(), cl.sizes.end(), std::size_t{1}));
        const double dev = velocity_deviation(traj.velocities[nearest_sample(traj, deviation_time)]);

        MetricSeries s = metric_series(traj, "velocity_deviation", d);
        s.name = "d" + label_number(d) + "_velocity_deviation";
        out.write(s.name + ".csv", metric_series_csv(s));
        table += label_number(d) + ',' + std::to_string(cl.count) + ',' + std::to_string(major) + ',' +
                 std::to_string(singletons) + ',' + format_double(dev) + '\n';
        rows.push_back({{"d", d}, {"cluster_count", cl.count}, {"major_clusters", major}, {"singletons", singletons},
                        {"velocity_deviation", dev}, {"cluster_sizes", cl.sizes}});

        const bool heatmap = std::any_of(heatmap_radii.begin(), heatmap_radii.end(),
                                         [&](double h) { return std::abs(h - d) < 1e-9; });
        if (heatmap) {
            const DenseMatrix& x = traj.positions[kc];
            const DenseMatrix& v = traj.velocities[kc];
            const Neighborhood nb = neighborhood(x, d);
            DenseMatrix psi_a(x.rows(), x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i) {
                for (std::size_t j = 0; j < x.rows(); ++j) {
                    psi_a(i, j) = nb.connected(i, j) ? similarity(v.row(i), v.row(j)) : 0.0;
                }
            }
            out.write("d" + label_number(d) + "_psi_a.csv", matrix_csv(psi_a));
        }
    }
    out.write("sweep.csv", table);
    return Json{{"sweep", rows}, {"cluster_time", cluster_time}, {"deviation_time", deviation_time}};
}

// ----------------------------------------------------------------- two-body

Json run_two_body(const ScenarioConfig& c, RunWriter& out) {
    const std::size_t instances = get_or<std::size_t>(c.params, "instances", 100);
    const double d = c.model.radius_d;
    const auto kappa_range = get_or(c.params, "kappa_range", std::vector<double>{0.5, 2.0});
    const double min_similarity = get_or(c.params, "min_similarity", 0.3);
    const auto speed_range = get_or(c.params, "speed_range", std::vector<double>{0.05, 1.0});
    if (kappa_range.size() != 2 || speed_range.size() != 2) config_error("ranges need two entries");
    if (!(min_similarity > 0.0) || min_similarity > 1.0) config_error("min_similarity must lie in (0, 1]");

    CounterRng rng(c.seed, kTwoBodyStream);
    const double max_turn = std::acos(min_similarity);
    std::string table = "instance,kappa,verdict,lhs,threshold,max_distance,crossed,final_velocity_gap,agree\n";
    std::size_t definite = 0;
    std::size_t agree = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const double kappa = rng.uniform(kappa_range[0], kappa_range[1]);
        const double r = rng.uniform(0.0, 0.95 * d);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double turn = rng.uniform(-max_turn, max_turn);
        const double s1 = rng.uniform(speed_range[0], speed_range[1]);
        const double s2 = rng.uniform(speed_range[0], speed_range[1]);
        const std::vector<double> x1{0.0, 0.0};
        const std::vector<double> x2{r * std::cos(phi), r * std::sin(phi)};
        const std::vector<double> v1{s1 * std::cos(heading), s1 * std::sin(heading)};
        const std::vector<double> v2{s2 * std::cos(heading + turn), s2 * std::sin(heading + turn)};

        const TwoBodyVerdict verdict = two_body_classify(x1, x2, v1, v2, kappa, d);
        const TwoBodySimulation sim = simulate_two_body(x1, x2, v1, v2, kappa, d, c.horizon, c.dt);
        bool ok = true;
        if (verdict.verdict == TwoBodyOutcome::Flocking) {
            ok = !sim.crossed && sim.final_velocity_gap < 1e-4;
        } else if (verdict.verdict == TwoBodyOutcome::Dispersion) {
            ok = sim.crossed && sim.constant_after_crossing;
        }
        if (verdict.verdict != TwoBodyOutcome::Indeterminate) {
            ++definite;
            agree += ok ? 1 : 0;
        }
        table += std::to_string(k) + ',' + format_double(kappa) + ',' + to_string(verdict.verdict) + ',' +
                 format_double(verdict.lhs_value) + ',' + format_double(verdict.threshold) + ',' +
                 format_double(sim.max_distance) + ',' + (sim.crossed ? "1" : "0") + ',' +
                 format_double(sim.final_velocity_gap) + ',' + (ok ? "1" : "0") + '\n';
    }
    out.write("twobody.csv", table);
    return Json{{"instances", instances}, {"definite", definite}, {"agree", agree}};
}

}  // namespace

std::string toolkit_version() { return TGFLOCK_VERSION; }

// ------------------------------------------------------------------ config

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
    if (!j.is_object()) config_error("config must be a JSON object");
    ScenarioConfig c;
    c.name = require<std::string>(j, "name");
    if (c.name.empty() || c.name.find('/') != std::string::npos) config_error("name must be a nonempty path segment");
    c.experiment = require<std::string>(j, "experiment");
    if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
        config_error("unknown experiment '" + c.experiment + "'");
    }
    c.model = model_from_json(get_or(j, "model", Json::object()), ModelParams{});
    c.initial_data = get_or(j, "initial_data", Json::object());
    c.horizon = require<double>(j, "horizon");
    c.dt = get_or(j, "dt", 1e-3);
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) config_error("horizon must be positive");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) config_error("dt must be positive");
    const Json& every = j.contains("sample_every") ? j.at("sample_every") : Json(1);
    if (!every.is_number_integer() || every.get<long long>() < 1) config_error("sample_every must be a positive integer");
    c.sample_every = every.get<std::size_t>();
    if (!j.contains("seed") || !j.at("seed").is_number_integer() || (j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned() && j.at("seed").get<long long>() < 0)) {
        config_error("seed must be a nonnegative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
    c.outputs = get_or(j, "outputs", std::vector<std::string>{});
    c.out_dir = get_or<std::string>(j, "out_dir", "runs");
    c.params = get_or(j, "params", Json::object());
    if (!c.params.is_object()) config_error("params must be an object");
    return c;
}

Json ScenarioConfig::to_json() const {
    return Json{{"name", name},       {"experiment", experiment},     {"model", model_to_json(model)},
                {"initial_data", initial_data}, {"horizon", horizon}, {"dt", dt},
                {"sample_every", sample_every}, {"seed", seed},       {"outputs", outputs},
                {"out_dir", out_dir},  {"params", params}};
}

void merge_config(Json& base, const Json& overlay) {
    if (!base.is_object() || !overlay.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
            merge_config(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

void apply_override(Json& config, const std::string& dotted_path, const std::string& value) {
    if (dotted_path.empty()) config_error("empty override key");
    Json parsed;
    try {
        parsed = Json::parse(value);
    } catch (const Json::exception&) {
        parsed = value;
    }
    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted_path.find('.', start);
        const std::string key = dotted_path.substr(start, dot - start);
        if (key.empty()) config_error("malformed override key '" + dotted_path + "'");
        if (!node->is_object()) config_error("override '" + dotted_path + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            return;
        }
        if (!node->contains(key)) (*node)[key] = Json::object();
        node = &(*node)[key];
        start = dot + 1;
    }
}

// ----------------------------------------------------------------- presets

namespace {

Json uniform_laplacian_initial() {
    return Json{{"kind", "uniform_positions"}, {"n", 60}, {"dim", 1}, {"low", 0.0}, {"high", 100.0}};
}

Json random_velocity_initial() {
    return Json{{"kind", "uniform_velocities"}, {"n", 60},           {"dim", 2},
                {"position", 0.0},              {"velocity_low", -0.01}, {"velocity_high", 0.01},
                {"kappa_low", -0.5},            {"kappa_high", 0.5}};
}

Json semicircle_initial() { return Json{{"kind", "semicircle"}, {"n", 50}, {"speed", -1.0 / 3.0}}; }

Json preset_table() {
    Json presets = Json::object();

    Json leaders = Json::array();
    for (const char* mode : {"fixed_one", "fixed_two", "switching_one", "switching_two", "mixed_one_two"}) {
        leaders.push_back({{"name", mode}, {"graph", {{"kind", "leader_temporal"}, {"n", 60}, {"weight", 1.0}, {"mode", mode}}}});
    }
    presets["fig3a_leaders"] = {
        {"description", "Diameter decay of Laplacian dynamics on fixed and switching leader graphs"},
        {"anchor", "leader graphs: fixed one/two leaders, switching one/two leaders, mixed"},
        {"experiment", "laplacian_family"},
        {"model", {{"kind", "laplacian"}}},
        {"initial_data", uniform_laplacian_initial()},
        {"horizon", 20.0},
        {"sample_every", 10},
        {"seed", 1},
        {"outputs", {"diameter"}},
        {"params", {{"metric", "diameter"}, {"series", leaders}, {"envelope", {{"kind", "neighbor_conn"}, {"w_m", 1.0}}}}}};

    presets["fig3b_threegroup"] = {
        {"description", "Diameter decay on the fixed and re-partitioned three-group directed graphs"},
        {"anchor", "three-group directed graph V1->V2->V3->V1"},
        {"experiment", "laplacian_family"},
        {"model", {{"kind", "laplacian"}}},
        {"initial_data", uniform_laplacian_initial()},
        {"horizon", 1.0},
        {"sample_every", 1},
        {"seed", 1},
        {"outputs", {"diameter"}},
        {"params",
         {{"metric", "diameter"},
          {"series",
           {{{"name", "fixed"}, {"graph", {{"kind", "three_group"}, {"sizes", {20, 20, 20}}, {"weight", 1.0}}}},
            {{"name", "temporal"}, {"graph", {{"kind", "three_group_temporal"}, {"n", 60}, {"weight", 1.0}}}}}},
          {"envelope", {{"kind", "neighbor_conn"}, {"w_m", 1.0}}}}}};

    Json b_series = Json::array();
    struct Row {
        const char* name;
        const char* kind;
        int n_min, n_max;
        double n_ratio;
    };
    for (const Row& r : {Row{"nm30_nM30", "circulant", 30, 30, 326.0}, Row{"nm30_nM45", "overlapping_cliques", 30, 45, 365.0},
                         Row{"nm30_nM58", "overlapping_cliques", 30, 58, 396.0}, Row{"nm38_nM38", "circulant", 38, 38, 101.0}}) {
        Json g = std::string(r.kind) == "circulant"
                     ? Json{{"kind", "circulant"}, {"n", 60}, {"k", r.n_min}, {"weight", 1.0}}
                     : Json{{"kind", "overlapping_cliques"}, {"n", 60}, {"n_min", r.n_min}, {"n_max", r.n_max}, {"weight", 1.0}};
        g["perturb"] = {{"gamma_m", 1.0}, {"epsilon", 1.0 / r.n_ratio}};
        b_series.push_back({{"name", r.name}, {"graph", g}, {"n_ratio", r.n_ratio}, {"epsilon", 1.0 / r.n_ratio}});
    }
    presets["fig3c_assumptionB"] = {
        {"description", "Fluctuation decay on perturbed-weight graphs with bounded neighbor counts"},
        {"anchor", "(N_m, N_M) in {(30,30), (30,45), (30,58), (38,38)} with their (delta, n)"},
        {"experiment", "laplacian_family"},
        {"model", {{"kind", "laplacian"}}},
        {"initial_data", uniform_laplacian_initial()},
        {"horizon", 100.0},
        {"sample_every", 100},
        {"seed", 1},
        {"outputs", {"fluctuation_norm"}},
        {"params", {{"metric", "fluctuation_norm"}, {"series", b_series}, {"envelope", {{"kind", "assumption_b"}, {"gamma_m", 1.0}}}}}};

    presets["tab_adaptive_cs"] = {
        {"description", "Adaptive CS multi-clustering from near-rest random velocities, d = 1"},
        {"anchor", "largest clusters and their polar angles at t = 300"},
        {"experiment", "cs_ensemble"},
        {"model", {{"kind", "adaptive_cs"}, {"kappa", 1.0}, {"epsilon", 1.0}, {"radius_d", 1.0}}},
        {"initial_data", random_velocity_initial()},
        {"horizon", 300.0},
        {"sample_every", 100},
        {"seed", 1},
        {"outputs", {"velocity_deviation", "cluster_count"}},
        {"params", {{"runs", 1}, {"major_cluster_min", 2}}}};

    Json classical_variants = Json::array();
    for (const double d : {0.009, 0.01, 0.012}) {
        classical_variants.push_back({{"label", "d" + label_number(d)}, {"model", {{"radius_d", d}}}});
    }
    presets["tab_classical_cs"] = {
        {"description", "Classical CS from the same initial data at three detection radii"},
        {"anchor", "d in {0.009, 0.01, 0.012}, 60 agents, t = 300"},
        {"experiment", "cs_ensemble"},
        {"model", {{"kind", "classical_cs"}, {"radius_d", 0.012}}},
        {"initial_data", random_velocity_initial()},
        {"horizon", 300.0},
        {"sample_every", 100},
        {"seed", 1},
        {"outputs", {"velocity_deviation", "cluster_count"}},
        {"params", {{"runs", 1}, {"variants", classical_variants}}}};

    presets["fig_snapshots"] = {
        {"description", "Velocity-angle snapshots, coupling and distance matrices for one seed"},
        {"anchor", "adaptive stamps 0,5,10,30,50,80,300; classical stamps 0,2,5,10,20,80,300 at d = 0.009"},
        {"experiment", "cs_ensemble"},
        {"model", {{"kind", "adaptive_cs"}, {"kappa", 1.0}, {"epsilon", 1.0}, {"radius_d", 1.0}}},
        {"initial_data", random_velocity_initial()},
        {"horizon", 300.0},
        {"sample_every", 100},
        {"seed", 6},
        {"outputs", {"velocity_deviation"}},
        {"params",
         {{"runs", 1},
          {"variants",
           {{{"label", "adaptive"},
             {"snapshot_times", {0, 5, 10, 30, 50, 80, 300}},
             {"kappa_times", {30, 300}}},
            {{"label", "classical"},
             {"model", {{"kind", "classical_cs"}, {"radius_d", 0.009}}},
             {"snapshot_times", {0, 2, 5, 10, 20, 80, 300}},
             {"distance_times", {10, 300}}}}}}}};

    Json radii = Json::array();
    for (int k = 50; k <= 65; ++k) radii.push_back(k / 100.0);
    presets["sec53_radius_sweep"] = {
        {"description", "Singular model from a half-circle with inward velocities; cluster count vs radius"},
        {"anchor", "mono-cluster threshold in d, velocity deviation at t = 30"},
        {"experiment", "radius_sweep"},
        {"model", {{"kind", "singular_cs"}, {"kappa", 1.0}}},
        {"initial_data", semicircle_initial()},
        {"horizon", 100.0},
        {"sample_every", 100},
        {"seed", 0},
        {"outputs", {"cluster_count", "velocity_deviation"}},
        {"params", {{"radii", radii}, {"cluster_time", 100.0}, {"deviation_time", 30.0}}}};

    presets["sec53_asymptotic_graphs"] = {
        {"description", "psi * a matrices at t = 100 for four radii"},
        {"anchor", "d in {0.56, 0.58, 0.60, 0.65}"},
        {"experiment", "radius_sweep"},
        {"model", {{"kind", "singular_cs"}, {"kappa", 1.0}}},
        {"initial_data", semicircle_initial()},
        {"horizon", 100.0},
        {"sample_every", 100},
        {"seed", 0},
        {"outputs", {"cluster_count"}},
        {"params",
         {{"radii", {0.56, 0.58, 0.60, 0.65}},
          {"heatmap_radii", {0.56, 0.58, 0.60, 0.65}},
          {"cluster_time", 100.0},
          {"deviation_time", 30.0}}}};

    presets["twobody_validation"] = {
        {"description", "Random two-agent instances: analytic verdict against simulation"},
        {"anchor", "two-body flocking/dispersion sufficient conditions"},
        {"experiment", "two_body"},
        {"model", {{"kind", "singular_cs"}, {"radius_d", 1.0}}},
        {"horizon", 200.0},
        {"sample_every", 1000},
        {"seed", 1},
        {"params", {{"instances", 120}, {"kappa_range", {0.5, 2.0}}, {"min_similarity", 0.3}, {"speed_range", {0.05, 1.0}}}}};
    return presets;
}

const Json& presets() {
    static const Json table = preset_table();
    return table;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (auto it = presets().begin(); it != presets().end(); ++it) {
        out.push_back({it.key(), it.value().at("description").get<std::string>(), it.value().at("anchor").get<std::string>()});
    }
    return out;
}

bool is_preset(const std::string& name) { return presets().contains(name); }

Json preset_config(const std::string& name) {
    if (!is_preset(name)) config_error("unknown preset '" + name + "'");
    Json j = presets().at(name);
    j.erase("description");
    j.erase("anchor");
    j["name"] = name;
    if (!j.contains("out_dir")) j["out_dir"] = "runs";
    if (!j.contains("dt")) j["dt"] = 1e-3;
    return j;
}

// ------------------------------------------------------------ construction

InitialState make_initial_state(const Json& spec, std::uint64_t seed) {
    const std::string kind = require<std::string>(spec, "kind");
    InitialState s;
    if (kind == "explicit") {
        try {
            s.ensemble.positions = DenseMatrix::from_rows(spec.at("positions").get<std::vector<std::vector<double>>>());
            if (spec.contains("velocities")) {
                s.ensemble.velocities = DenseMatrix::from_rows(spec.at("velocities").get<std::vector<std::vector<double>>>());
            } else {
                s.ensemble.velocities = DenseMatrix(s.ensemble.agents(), s.ensemble.dim());
            }
            if (spec.contains("kappa")) s.coupling = DenseMatrix::from_rows(spec.at("kappa").get<std::vector<std::vector<double>>>());
        } catch (const Json::exception& e) {
            config_error(std::string("explicit initial data: ") + e.what());
        }
        if (s.ensemble.agents() == 0) config_error("explicit initial data needs at least one agent");
        return s;
    }
    const std::size_t n = require<std::size_t>(spec, "n");
    if (n == 0) config_error("initial_data.n must be positive");
    if (kind == "uniform_positions") {
        const std::size_t dim = get_or<std::size_t>(spec, "dim", 1);
        const double lo = get_or(spec, "low", 0.0);
        const double hi = get_or(spec, "high", 1.0);
        CounterRng rng(seed, kPositionStream);
        s.ensemble.positions = DenseMatrix(n, dim);
        for (double& x : s.ensemble.positions.data()) x = rng.uniform(lo, hi);
        s.ensemble.velocities = DenseMatrix(n, dim);
        return s;
    }
    if (kind == "uniform_velocities") {
        const std::size_t dim = get_or<std::size_t>(spec, "dim", 2);
        s.ensemble.positions = DenseMatrix(n, dim, get_or(spec, "position", 0.0));
        CounterRng vr(seed, kVelocityStream);
        const double vlo = get_or(spec, "velocity_low", -0.01);
        const double vhi = get_or(spec, "velocity_high", 0.01);
        s.ensemble.velocities = DenseMatrix(n, dim);
        for (double& v : s.ensemble.velocities.data()) v = vr.uniform(vlo, vhi);
        CounterRng kr(seed, kCouplingStream);
        const double klo = get_or(spec, "kappa_low", -0.5);
        const double khi = get_or(spec, "kappa_high", 0.5);
        DenseMatrix kappa(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            kappa(i, i) = 1.0;  // self-similarity; the self term never enters the velocity equation
            for (std::size_t j = i + 1; j < n; ++j) kappa(i, j) = kappa(j, i) = kr.uniform(klo, khi);
        }
        s.coupling = std::move(kappa);
        return s;
    }
    if (kind == "semicircle") {
        const double speed = get_or(spec, "speed", -1.0 / 3.0);
        s.ensemble.positions = DenseMatrix(n, 2);
        s.ensemble.velocities = DenseMatrix(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = n > 1 ? static_cast<double>(i) * std::numbers::pi / static_cast<double>(n - 1) : 0.0;
            s.ensemble.positions(i, 0) = std::cos(theta);
            s.ensemble.positions(i, 1) = std::sin(theta);
            s.ensemble.velocities(i, 0) = speed * std::cos(theta);
            s.ensemble.velocities(i, 1) = speed * std::sin(theta);
        }
        return s;
    }
    config_error("unknown initial_data kind '" + kind + "'");
}

TemporalGraph make_graph(const Json& spec, std::uint64_t seed, double dt, double horizon) {
    const std::string kind = require<std::string>(spec, "kind");
    const double weight = get_or(spec, "weight", 1.0);
    const std::uint64_t gseed = get_or<std::uint64_t>(spec, "seed", seed);
    const double period = get_or(spec, "period", 10.0 * dt);

    auto finish = [&](WeightedDigraph g) {
        if (spec.contains("perturb")) {
            const Json& p = spec.at("perturb");
            g = perturb_weights(g, get_or(p, "gamma_m", weight), require<double>(p, "epsilon"),
                                get_or<std::uint64_t>(p, "seed", gseed));
        }
        return TemporalGraph::constant(std::move(g));
    };

    if (kind == "complete") {
        const std::size_t n = require<std::size_t>(spec, "n");
        WeightedDigraph g(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) g.set_undirected(i, j, weight);
        }
        return finish(std::move(g));
    }
    if (kind == "one_leader") return finish(one_leader(require<std::size_t>(spec, "n"), weight));
    if (kind == "two_leaders") return finish(two_leaders(require<std::size_t>(spec, "n"), weight));
    if (kind == "leader_temporal") {
        LeaderSchedule schedule;
        try {
            schedule.mode = leader_mode_from_string(require<std::string>(spec, "mode"));
        } catch (const Error& e) {
            config_error(e.what());
        }
        schedule.period = period;
        schedule.seed = gseed;
        return leader_temporal(require<std::size_t>(spec, "n"), weight, schedule, horizon);
    }
    if (kind == "three_group") {
        const auto sizes = require<std::array<std::size_t, 3>>(spec, "sizes");
        return finish(three_group_directed(sizes, weight));
    }
    if (kind == "three_group_temporal") return three_group_temporal(require<std::size_t>(spec, "n"), weight, period, gseed);
    if (kind == "circulant") {
        return finish(circulant_regular(require<std::size_t>(spec, "n"), require<std::size_t>(spec, "k"), weight));
    }
    if (kind == "overlapping_cliques") {
        return finish(overlapping_cliques(require<std::size_t>(spec, "n"), require<std::size_t>(spec, "n_min"),
                                          require<std::size_t>(spec, "n_max"), weight));
    }
    if (kind == "explicit") {
        try {
            return finish(WeightedDigraph(DenseMatrix::from_rows(spec.at("weights").get<std::vector<std::vector<double>>>())));
        } catch (const Json::exception& e) {
            config_error(std::string("explicit graph: ") + e.what());
        }
    }
    config_error("unknown graph kind '" + kind + "'");
}

// ---------------------------------------------------------------- reports

std::size_t nearest_sample(const TrajectoryRecord& traj, double t) {
    if (traj.samples() == 0) throw Error(ErrorKind::InvalidSize, "empty trajectory");
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    if (it == traj.times.end()) return traj.samples() - 1;
    const std::size_t k = static_cast<std::size_t>(std::distance(traj.times.begin(), it));
    if (k > 0 && t - traj.times[k - 1] < traj.times[k] - t) return k - 1;
    return k;
}

std::vector<ClusterSummary> cluster_report(const TrajectoryRecord& traj, double at_time, double radius_d) {
    if (traj.velocities.empty() || traj.velocities.front().cols() != 2) {
        throw Error(ErrorKind::Requires2D, "cluster report needs planar velocities");
    }
    const std::size_t k = nearest_sample(traj, at_time);
    const Clustering cl = cluster_count(traj.positions[k], radius_d);
    const DenseMatrix& v = traj.velocities[k];
    std::vector<double> sx(cl.count, 0.0);
    std::vector<double> sy(cl.count, 0.0);
    for (std::size_t i = 0; i < v.rows(); ++i) {
        sx[cl.labels[i]] += v(i, 0);
        sy[cl.labels[i]] += v(i, 1);
    }
    std::vector<ClusterSummary> out;
    for (std::size_t c = 0; c < cl.count; ++c) out.push_back({cl.sizes[c], polar_angle_deg(sx[c], sy[c])});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size > b.size; });
    return out;
}

TwoBodySimulation simulate_two_body(const std::vector<double>& x1, const std::vector<double>& x2,
                                    const std::vector<double>& v1, const std::vector<double>& v2, double kappa_global,
                                    double radius_d, double horizon, double dt) {
    ParticleEnsemble e{DenseMatrix::from_rows({x1, x2}), DenseMatrix::from_rows({v1, v2})};
    ModelParams p{ModelKind::SingularCS, kappa_global, 0.0, radius_d};
    TwoBodySimulation sim;
    std::vector<double> v_at_cross;
    std::size_t steps_since_cross = 0;
    bool constant = true;
    IntegrationOptions o;
    o.horizon = horizon;
    o.dt = dt;
    o.sample_every = 1000;
    o.observer = [&](double t, std::span<const double> y, const StateLayout& layout) {
        const std::size_t dim = layout.dim;
        double r2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) r2 += (y[k] - y[dim + k]) * (y[k] - y[dim + k]);
        const double r = std::sqrt(r2);
        sim.max_distance = std::max(sim.max_distance, r);
        const auto v = y.subspan(layout.velocity_offset(), 2 * dim);
        if (!sim.crossed && !(r < radius_d)) {
            sim.crossed = true;
            sim.crossing_time = t;
        }
        if (sim.crossed) {
            // One step after the crossing every RK4 stage sees the pair apart.
            if (steps_since_cross == 1) v_at_cross.assign(v.begin(), v.end());
            if (steps_since_cross > 1 && !std::equal(v.begin(), v.end(), v_at_cross.begin())) constant = false;
            ++steps_since_cross;
        }
    };
    const TrajectoryRecord traj = integrate(p, e, std::nullopt, o);
    const DenseMatrix& vf = traj.velocities.back();
    double gap = 0.0;
    for (std::size_t k = 0; k < vf.cols(); ++k) gap += (vf(0, k) - vf(1, k)) * (vf(0, k) - vf(1, k));
    sim.final_velocity_gap = std::sqrt(gap);
    sim.constant_after_crossing = sim.crossed && constant && steps_since_cross > 1;
    return sim;
}

Json RunManifest::to_json() const {
    Json files_json = Json::array();
    for (const auto& f : files) files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return Json{{"config", config},
                {"version", version},
                {"seed", seed},
                {"duration_seconds", duration_seconds},
                {"files", files_json}};
}

RunManifest run_scenario(const ScenarioConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunWriter writer(std::filesystem::path(config.out_dir) / config.name);

    Json results;
    if (config.experiment == "laplacian_family") {
        results = run_laplacian_family(config, writer);
    } else if (config.experiment == "cs_ensemble") {
        results = run_cs_ensemble(config, writer);
    } else if (config.experiment == "radius_sweep") {
        results = run_radius_sweep(config, writer);
    } else if (config.experiment == "two_body") {
        results = run_two_body(config, writer);
    } else {
        config_error("unknown experiment '" + config.experiment + "'");
    }

    RunManifest m;
    m.config = config.to_json();
    m.version = toolkit_version();
    m.seed = config.seed;
    m.run_dir = writer.dir();
    m.summary = Json{{"scenario", config.name}, {"experiment", config.experiment}, {"results", results}};
    writer.write("summary.json", m.summary.dump(2) + "\n");
    m.files = writer.files();
    m.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file_atomic(writer.dir() / "manifest.json", m.to_json().dump(2) + "\n");
    return m;
}

}  // namespace tgflock
