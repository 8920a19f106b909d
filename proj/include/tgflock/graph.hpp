#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgflock/dense.hpp"

namespace tgflock {

/// Dense weighted digraph. weights(i, j) is the weight of the edge i -> j;
/// an edge is present iff its weight is nonzero. The diagonal is always zero.
class WeightedDigraph {
public:
    /// Edgeless graph on n >= 1 vertices.
    explicit WeightedDigraph(std::size_t n);
    /// Takes a square matrix with zero diagonal.
    explicit WeightedDigraph(DenseMatrix weights);

    [[nodiscard]] std::size_t size() const noexcept { return weights_.rows(); }
    [[nodiscard]] double weight(std::size_t i, std::size_t j) const noexcept { return weights_(i, j); }
    void set_weight(std::size_t i, std::size_t j, double w);
    /// Sets both i -> j and j -> i.
    void set_undirected(std::size_t i, std::size_t j, double w);

    [[nodiscard]] bool has_edge(std::size_t i, std::size_t j) const noexcept { return weights_(i, j) != 0.0; }
    /// Number of j != i with an edge i -> j.
    [[nodiscard]] std::size_t out_neighbor_count(std::size_t i) const noexcept;
    [[nodiscard]] bool is_symmetric(double tol = 0.0) const;
    [[nodiscard]] bool has_symmetric_edge_set() const noexcept;
    /// Smallest weight among present edges (0 for an edgeless graph).
    [[nodiscard]] double min_edge_weight() const noexcept;

    [[nodiscard]] const DenseMatrix& weights() const noexcept { return weights_; }

    friend bool operator==(const WeightedDigraph&, const WeightedDigraph&) = default;

private:
    DenseMatrix weights_;
};

/// L = D - A with D the out-degree matrix; rows sum to zero.
class LaplacianMatrix {
public:
    explicit LaplacianMatrix(DenseMatrix entries) : entries_(std::move(entries)) {}

    [[nodiscard]] std::size_t size() const noexcept { return entries_.rows(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
    [[nodiscard]] const DenseMatrix& entries() const noexcept { return entries_; }
    [[nodiscard]] double max_row_sum_magnitude() const noexcept;

private:
    DenseMatrix entries_;
};

enum class CertificateKind { Complete, NeighborConnected, StronglyConnected, AssumptionB };

[[nodiscard]] std::string to_string(CertificateKind kind);

struct CertificateWitness {
    std::size_t first = 0;
    std::optional<std::size_t> second;  ///< present for pair/edge witnesses
    std::string reason;
};

struct ConnectivityCertificate {
    CertificateKind kind = CertificateKind::Complete;
    bool holds = false;
    std::optional<CertificateWitness> witness;
    /// Guaranteed decay exponent, when the certificate implies one.
    std::optional<double> derived_rate;
    /// Measured neighbor-count range (assumption-B certificates).
    std::optional<std::size_t> measured_min_neighbors;
    std::optional<std::size_t> measured_max_neighbors;
};

/// Tolerances fixed by the library contract.
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kZeroEigenvalueRelative = 1e-8;
inline constexpr double kComparisonSlack = 1e-9;

[[nodiscard]] LaplacianMatrix laplacian(const WeightedDigraph& g);

/// Full ascending spectrum of a symmetric matrix by cyclic Jacobi rotations.
/// Throws NonSymmetric when |m_ij - m_ji| exceeds kSymmetryTolerance.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(const DenseMatrix& m);
[[nodiscard]] std::vector<double> symmetric_spectrum(const LaplacianMatrix& l);

/// Number of eigenvalues with |lambda| <= kZeroEigenvalueRelative * max|lambda|.
[[nodiscard]] std::size_t zero_eigenvalue_multiplicity(std::span<const double> spectrum);

[[nodiscard]] double fiedler_value(const WeightedDigraph& g);

/// x^T L x. Throws DimensionMismatch.
[[nodiscard]] double quadratic_form(const LaplacianMatrix& l, std::span<const double> x);

struct SpectrumComparison {
    bool holds = false;
    std::vector<double> spectrum_p;
    std::vector<double> spectrum_q;
    std::optional<std::size_t> offending_index;
};

/// Checks lambda_k(P) <= lambda_k(Q) + kComparisonSlack for graphs with
/// 0 <= p_ij <= q_ij. Throws PreconditionViolated if the entrywise ordering
/// fails and NonSymmetric for directed inputs.
[[nodiscard]] SpectrumComparison eigenvalue_comparison_check(const WeightedDigraph& p, const WeightedDigraph& q);

/// Every pair is bidirectionally adjacent or shares a bidirectionally adjacent
/// common neighbor. The witness is the first failing pair in lexicographic order.
[[nodiscard]] ConnectivityCertificate is_neighbor_connected(const WeightedDigraph& g);

[[nodiscard]] ConnectivityCertificate is_strongly_connected(const WeightedDigraph& g);

/// Number of connected components of the undirected graph underlying g.
[[nodiscard]] std::size_t undirected_component_count(const WeightedDigraph& g);

/// Neighbor-count bounds (min >= floor(N/2)), symmetric edge set, and the
/// symmetric/antisymmetric weight bounds. When the measured counts give a
/// positive margin for `n`, derived_rate carries gamma_m * delta / (n N).
[[nodiscard]] ConnectivityCertificate check_assumption_b(const WeightedDigraph& g, double gamma_m,
                                                         double epsilon, double n);

}  // namespace tgflock
