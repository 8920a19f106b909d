#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgflock/dense.hpp"
#include "tgflock/dynamics.hpp"
#include "tgflock/graph.hpp"

namespace tgflock {

/// Largest pairwise Euclidean distance between rows; 0 for a single row.
[[nodiscard]] double diameter(const DenseMatrix& points);
/// Frobenius norm of the row-mean-centred matrix.
[[nodiscard]] double fluctuation_norm(const DenseMatrix& state);
/// (1/N) sum_i |v_i - v_mean|.
[[nodiscard]] double velocity_deviation(const DenseMatrix& velocities);
/// max_{i,j} |v_i - v_j|.
[[nodiscard]] double max_velocity_difference(const DenseMatrix& velocities);

enum class EnvelopeKind { CompleteSym, NeighborConn, AssumptionB };

[[nodiscard]] std::string to_string(EnvelopeKind kind);
[[nodiscard]] EnvelopeKind envelope_kind_from_string(const std::string& name);

struct EnvelopeParams {
    double alpha_m = 0.0;    ///< complete graphs: weight floor
    double w_m = 0.0;        ///< neighbor-connected graphs: weight floor
    double gamma_m = 0.0;    ///< assumption-B graphs: symmetric-mean floor
    double delta = 0.0;
    double n_ratio = 0.0;
    std::size_t n_vertices = 0;
};

/// Exponent r in initial * exp(-r t):
///   CompleteSym   alpha_m N
///   NeighborConn  w_m
///   AssumptionB   gamma_m delta / N
[[nodiscard]] double envelope_rate(EnvelopeKind kind, const EnvelopeParams& p);
/// gamma_m delta / (n N), the exponent the assumption-B argument actually delivers.
[[nodiscard]] double assumption_b_proof_rate(const EnvelopeParams& p);
[[nodiscard]] double decay_envelope(EnvelopeKind kind, const EnvelopeParams& p, double t, double initial_value);

/// Index of the unordered pair (i, j), i < j, in lexicographic order.
[[nodiscard]] std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n);

/// Linear comparison system for squared pairwise distances. Rows and columns
/// are pairs (i<j) in lexicographic order.
[[nodiscard]] DenseMatrix e_matrix(const WeightedDigraph& g);
/// min over rows of |e_rr| - sum_{c != r} |e_rc|.
[[nodiscard]] double row_dominance_margin(const DenseMatrix& e, const WeightedDigraph& g);

/// -(1/2) sum over directed edges of
///   (g_ij + g_ji)/2 (y_i - y_j)^2 + (g_ij - g_ji)/2 (y_i^2 - y_j^2)
/// with y the mean-centred state. Throws EdgeAsymmetry.
[[nodiscard]] double assumption_b_dissipation(std::span<const double> x, const WeightedDigraph& g);

struct Clustering {
    std::size_t count = 0;
    std::vector<std::size_t> labels;  ///< component ids ordered by smallest member
    std::vector<std::size_t> sizes;   ///< size of each component id
};

/// Components of the graph with an edge iff |x_i - x_j| < d.
[[nodiscard]] Clustering cluster_count(const DenseMatrix& positions, double radius_d);

enum class TwoBodyOutcome { Flocking, Dispersion, Indeterminate };

[[nodiscard]] std::string to_string(TwoBodyOutcome outcome);

struct TwoBodyVerdict {
    TwoBodyOutcome verdict = TwoBodyOutcome::Indeterminate;
    double lhs_value = 0.0;
    double threshold = 0.0;  ///< d^2
    std::string reason;
};

/// Sufficient conditions for the two-agent singular model. With
/// u0 = dx.dv, a_m = cos(v1, v2) and J the integrated contraction factor
/// (1/kappa <= J <= 1/(kappa a_m)), the final squared distance is
/// |dx|^2 + 2 u0 J + |dv|^2 J^2; the verdict bounds it from both sides.
[[nodiscard]] TwoBodyVerdict two_body_classify(std::span<const double> x1, std::span<const double> x2,
                                               std::span<const double> v1, std::span<const double> v2,
                                               double kappa_global, double radius_d);

/// sup_t diameter(x) <= dist_bound and final max |v_i - v_j| <= vel_tol.
/// Laplacian trajectories use positions for both checks.
[[nodiscard]] bool flocking_detector(const TrajectoryRecord& traj, double dist_bound, double vel_tol);

/// Least-squares slope of log(value) against t over the last half of the
/// samples, keeping only values above 1e-12. Empty when fewer than two remain.
[[nodiscard]] std::optional<double> log_slope(const MetricSeries& series);

/// Metric of every sample: "diameter", "fluctuation_norm", "velocity_diameter",
/// "velocity_deviation", "velocity_fluctuation", "cluster_count".
[[nodiscard]] MetricSeries metric_series(const TrajectoryRecord& traj, const std::string& name,
                                         double radius_d = 1.0);

}  // namespace tgflock
