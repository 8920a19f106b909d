#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgflock/analysis.hpp"
#include "tgflock/dynamics.hpp"
#include "tgflock/temporal_graph.hpp"

namespace tgflock {

using Json = nlohmann::json;

[[nodiscard]] std::string toolkit_version();

/// Common fields are typed; experiment-specific settings stay in `params`.
struct ScenarioConfig {
    std::string name;
    std::string experiment;  ///< laplacian_family | cs_ensemble | radius_sweep | two_body
    ModelParams model;
    Json initial_data = Json::object();
    double horizon = 1.0;
    double dt = 1e-3;
    std::size_t sample_every = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::string out_dir = "runs";
    Json params = Json::object();

    /// Throws ConfigInvalid with the offending field.
    [[nodiscard]] static ScenarioConfig from_json(const Json& j);
    [[nodiscard]] Json to_json() const;
};

struct PresetInfo {
    std::string name;
    std::string description;
    std::string anchor;  ///< the result the preset reproduces
};

[[nodiscard]] std::vector<PresetInfo> list_presets();
[[nodiscard]] bool is_preset(const std::string& name);
/// Full config of a preset. Throws ConfigInvalid for unknown names.
[[nodiscard]] Json preset_config(const std::string& name);

/// Sets a dotted path ("params.radii", "model.radius_d") to `value`. The value
/// is parsed as JSON when possible and kept as a string otherwise.
void apply_override(Json& config, const std::string& dotted_path, const std::string& value);
/// Recursive merge; objects merge key by key, anything else is replaced.
void merge_config(Json& base, const Json& overlay);

struct InitialState {
    ParticleEnsemble ensemble;
    std::optional<CouplingMatrix> coupling;
};

/// kinds: explicit, uniform_positions, uniform_velocities, semicircle.
[[nodiscard]] InitialState make_initial_state(const Json& spec, std::uint64_t seed);
/// kinds: complete, one_leader, two_leaders, leader_temporal, three_group,
/// three_group_temporal, circulant, overlapping_cliques, explicit; an optional
/// "perturb" object applies weight perturbation.
[[nodiscard]] TemporalGraph make_graph(const Json& spec, std::uint64_t seed, double dt, double horizon);

struct ClusterSummary {
    std::size_t size = 0;
    double angle_deg = 0.0;  ///< polar angle of the mean velocity, in [0, 360)
};

/// Clusters at the sample nearest `at_time`, largest first.
[[nodiscard]] std::vector<ClusterSummary> cluster_report(const TrajectoryRecord& traj, double at_time,
                                                         double radius_d);
/// Index of the sample closest to t.
[[nodiscard]] std::size_t nearest_sample(const TrajectoryRecord& traj, double t);

struct TwoBodySimulation {
    double max_distance = 0.0;
    bool crossed = false;            ///< distance reached d at some step
    double crossing_time = 0.0;
    double final_velocity_gap = 0.0;
    bool constant_after_crossing = false;
};

/// Integrates the two-agent singular model and tracks the pair distance at
/// every step.
[[nodiscard]] TwoBodySimulation simulate_two_body(const std::vector<double>& x1, const std::vector<double>& x2,
                                                  const std::vector<double>& v1, const std::vector<double>& v2,
                                                  double kappa_global, double radius_d, double horizon, double dt);

struct OutputFile {
    std::string path;  ///< relative to the run directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunManifest {
    Json config;
    std::string version;
    std::uint64_t seed = 0;
    double duration_seconds = 0.0;
    std::vector<OutputFile> files;
    std::filesystem::path run_dir;
    Json summary;  ///< contents of summary.json

    [[nodiscard]] Json to_json() const;
};

/// Runs one scenario into out_dir/name and writes CSVs, summary.json and
/// manifest.json (last, atomically).
[[nodiscard]] RunManifest run_scenario(const ScenarioConfig& config);

}  // namespace tgflock
