#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tgflock/graph.hpp"
#include "tgflock/temporal_graph.hpp"

namespace tgflock {

/// Star on n vertices centred at vertex 0, symmetric, every edge `weight`.
[[nodiscard]] WeightedDigraph one_leader(std::size_t n, double weight);
/// Vertices 0 and n-1 are joined to every other vertex but not to each other.
[[nodiscard]] WeightedDigraph two_leaders(std::size_t n, double weight);
/// Leaders are joined to every non-leader; leaders are not joined to each other.
[[nodiscard]] WeightedDigraph leader_graph(std::size_t n, double weight, const std::vector<std::size_t>& leaders);

enum class LeaderMode { FixedOne, FixedTwo, SwitchingOne, SwitchingTwo, MixedOneTwo };

[[nodiscard]] std::string to_string(LeaderMode mode);
[[nodiscard]] LeaderMode leader_mode_from_string(const std::string& name);

struct LeaderSchedule {
    LeaderMode mode = LeaderMode::FixedOne;
    double period = 1e-2;
    std::uint64_t seed = 0;
};

/// Fixed modes give a single piece. Switching modes redraw the leader set
/// uniformly at every piece from (seed, piece); MixedOneTwo uses one leader on
/// even pieces and two on odd pieces.
[[nodiscard]] TemporalGraph leader_temporal(std::size_t n, double weight, const LeaderSchedule& schedule,
                                            double horizon);

/// Groups are contiguous blocks 0..n1-1, n1..n1+n2-1, rest. Each group is
/// complete in both directions; between groups only V1->V2, V2->V3, V3->V1.
[[nodiscard]] WeightedDigraph three_group_directed(const std::array<std::size_t, 3>& sizes, double weight);
/// Three-group graph over an explicit vertex order (order[k] is the vertex
/// placed at block position k).
[[nodiscard]] WeightedDigraph three_group_directed(const std::array<std::size_t, 3>& sizes, double weight,
                                                   const std::vector<std::size_t>& order);
/// Balanced group sizes with a fresh random vertex assignment on every piece.
[[nodiscard]] TemporalGraph three_group_temporal(std::size_t n, double weight, double period, std::uint64_t seed);
[[nodiscard]] std::array<std::size_t, 3> balanced_groups(std::size_t n);

/// Vertex i joined to i +- 1..k/2 (mod n).
[[nodiscard]] WeightedDigraph circulant_regular(std::size_t n, std::size_t k, double weight);

/// Clique on vertices 0..n_big, clique on the last n_small+1 vertices, with
/// edges lying in both cliques removed.
[[nodiscard]] WeightedDigraph overlapping_cliques(std::size_t n, std::size_t n_small, std::size_t n_big, double weight);

/// Per undirected edge draws 0 <= d1 <= d2 <= epsilon with a common random
/// sign and sets (w_ij, w_ji) = (gamma_m - d1, gamma_m + d2) for i < j.
[[nodiscard]] WeightedDigraph perturb_weights(const WeightedDigraph& g, double gamma_m, double epsilon,
                                              std::uint64_t seed);

struct AssumptionBParams {
    std::size_t n_vertices = 0;
    std::size_t n_min = 0;
    std::size_t n_max = 0;
    double gamma_m = 1.0;
    double epsilon = 0.0;
    double n_ratio = 3.0;
    double delta = 0.0;
};

struct MarginResult {
    double delta = 0.0;
    std::size_t argmin_s = 1;
};

/// min over integer s in [1, floor(N/2)] of
///   (n-2)/(s(n-1)) (N_m - s + 1) - 2/(n+1)^2 (3s^2 - (N_M + 2N_m + 1)s + N N_M).
[[nodiscard]] MarginResult assumption_b_margin(std::size_t n_vertices, std::size_t n_min, std::size_t n_max,
                                               double n_ratio);
/// Margin function at one s; exposed for brute-force checks.
[[nodiscard]] double assumption_b_margin_at(std::size_t n_vertices, std::size_t n_min, std::size_t n_max,
                                            double n_ratio, std::size_t s);

/// 2 a_m (N_m + 1) / (N_M + 1 - a_m (N_m + 1)).
[[nodiscard]] double corollary3_ratio(double a_m, std::size_t n_min, std::size_t n_max);

}  // namespace tgflock
