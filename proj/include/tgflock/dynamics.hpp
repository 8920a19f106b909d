#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgflock/dense.hpp"
#include "tgflock/graph.hpp"
#include "tgflock/temporal_graph.hpp"

namespace tgflock {

enum class ModelKind { AdaptiveCS, SingularCS, ClassicalCS, Laplacian };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string& name);

struct ModelParams {
    ModelKind model = ModelKind::SingularCS;
    double kappa_global = 1.0;
    double epsilon = 1.0;
    double radius_d = 1.0;
};

/// Rows are agents, columns are coordinates. Laplacian runs use positions only.
struct ParticleEnsemble {
    DenseMatrix positions;
    DenseMatrix velocities;

    [[nodiscard]] std::size_t agents() const noexcept { return positions.rows(); }
    [[nodiscard]] std::size_t dim() const noexcept { return positions.cols(); }
};

/// kappa(i, j) is the adaptive coupling of i to j.
using CouplingMatrix = DenseMatrix;

inline constexpr double kMinVelocityNorm = 1e-12;

/// Cosine of the angle between a and b, clamped to [-1, 1].
/// Throws DegenerateVelocity when either norm is below kMinVelocityNorm.
[[nodiscard]] double similarity(std::span<const double> a, std::span<const double> b);

struct Neighborhood {
    std::size_t n = 0;
    std::vector<unsigned char> psi;  ///< row-major n x n
    std::vector<std::size_t> count;  ///< I_i, including i itself

    [[nodiscard]] bool connected(std::size_t i, std::size_t j) const noexcept { return psi[i * n + j] != 0; }
};

/// psi_ij = 1 iff |x_i - x_j| < d (strict), so psi_ii = 1.
[[nodiscard]] Neighborhood neighborhood(const DenseMatrix& positions, double radius_d);

struct Derivatives {
    DenseMatrix dx;
    DenseMatrix dv;
    DenseMatrix dkappa;  ///< empty unless adaptive
};

[[nodiscard]] Derivatives rhs_adaptive_cs(const ParticleEnsemble& state, const CouplingMatrix& coupling,
                                          const ModelParams& params);
[[nodiscard]] Derivatives rhs_singular_cs(const ParticleEnsemble& state, const ModelParams& params);
[[nodiscard]] Derivatives rhs_classical_cs(const ParticleEnsemble& state, const ModelParams& params);
/// dx_i = sum_j A_ij (x_j - x_i), column by column.
[[nodiscard]] DenseMatrix rhs_laplacian(const DenseMatrix& x, const WeightedDigraph& g);

/// Where each block lives in the flat integration state.
struct StateLayout {
    std::size_t agents = 0;
    std::size_t dim = 0;
    bool has_velocity = false;
    bool has_coupling = false;

    [[nodiscard]] std::size_t position_offset() const noexcept { return 0; }
    [[nodiscard]] std::size_t velocity_offset() const noexcept { return agents * dim; }
    [[nodiscard]] std::size_t coupling_offset() const noexcept { return (has_velocity ? 2 : 1) * agents * dim; }
    [[nodiscard]] std::size_t total() const noexcept {
        return coupling_offset() + (has_coupling ? agents * agents : 0);
    }
};

using StepObserver = std::function<void(double t, std::span<const double> state, const StateLayout& layout)>;

struct IntegrationOptions {
    double horizon = 1.0;
    double dt = 1e-3;
    std::size_t sample_every = 1;
    bool record_coupling = false;
    /// Called after every accepted step (and once at t = 0).
    StepObserver observer;
};

struct MetricSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
};

struct TrajectoryRecord {
    ModelKind model = ModelKind::SingularCS;
    std::vector<double> times;
    std::vector<DenseMatrix> positions;
    std::vector<DenseMatrix> velocities;  ///< empty for Laplacian runs
    std::vector<DenseMatrix> couplings;   ///< only when recorded
    std::vector<MetricSeries> derived;

    [[nodiscard]] std::size_t samples() const noexcept { return times.size(); }
    [[nodiscard]] ParticleEnsemble ensemble(std::size_t k) const;
    /// Header t, x_{i,k}, v_{i,k}, kappa_{i,j}; one row per sample.
    void write_csv(std::ostream& out) const;
};

/// Fixed-step classical RK4 for the three particle models. `coupling` is
/// required for AdaptiveCS and ignored otherwise.
[[nodiscard]] TrajectoryRecord integrate(const ModelParams& params, const ParticleEnsemble& initial,
                                         const std::optional<CouplingMatrix>& coupling,
                                         const IntegrationOptions& options);

/// dX/dt = -L(t) X for the schedule `graph`; the active piece is looked up at
/// every RK4 stage time.
[[nodiscard]] TrajectoryRecord integrate_laplacian(const TemporalGraph& graph, const DenseMatrix& initial,
                                                   const IntegrationOptions& options);

}  // namespace tgflock
