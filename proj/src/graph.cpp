#include "tgflock/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgflock/error.hpp"
#include "tgflock/generators.hpp"

namespace tgflock {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiOffDiagonalTarget = 1e-12;
constexpr double kAssumptionBWeightSlack = 1e-12;

void require_symmetric(const DenseMatrix& m, const char* what) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not square");
    if (m.asymmetry() > kSymmetryTolerance) {
        throw Error(ErrorKind::NonSymmetric, std::string(what) + " is not symmetric");
    }
}

double off_diagonal_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    }
    return std::sqrt(2.0 * s);
}

void rotate(DenseMatrix& a, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    const double app = a(p, p);
    const double aqq = a(q, q);
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    for (std::size_t k = 0; k < a.rows(); ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = a(p, k) = c * akp - s * akq;
        a(k, q) = a(q, k) = s * akp + c * akq;
    }
    a(p, p) = app - t * apq;
    a(q, q) = aqq + t * apq;
    a(p, q) = a(q, p) = 0.0;
}

// Union-find over vertex indices.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::vector<bool> reachable_from(const WeightedDigraph& g, std::size_t source, bool reverse) {
    const std::size_t n = g.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v) {
            const bool edge = reverse ? g.has_edge(v, u) : g.has_edge(u, v);
            if (edge && !seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

WeightedDigraph::WeightedDigraph(std::size_t n) : weights_(n, n) {
    if (n == 0) throw Error(ErrorKind::InvalidSize, "a graph needs at least one vertex");
}

WeightedDigraph::WeightedDigraph(DenseMatrix weights) : weights_(std::move(weights)) {
    if (!weights_.is_square()) throw Error(ErrorKind::DimensionMismatch, "weight matrix must be square");
    if (weights_.rows() == 0) throw Error(ErrorKind::InvalidSize, "a graph needs at least one vertex");
    for (std::size_t i = 0; i < weights_.rows(); ++i) {
        if (weights_(i, i) != 0.0) throw Error(ErrorKind::PreconditionViolated, "self-loop weight must be zero");
    }
    if (!weights_.all_finite()) throw Error(ErrorKind::NonFinite, "weights must be finite");
}

void WeightedDigraph::set_weight(std::size_t i, std::size_t j, double w) {
    if (i >= size() || j >= size()) throw Error(ErrorKind::DimensionMismatch, "vertex index out of range");
    if (i == j && w != 0.0) throw Error(ErrorKind::PreconditionViolated, "self-loop weight must be zero");
    weights_(i, j) = w;
}

void WeightedDigraph::set_undirected(std::size_t i, std::size_t j, double w) {
    set_weight(i, j, w);
    set_weight(j, i, w);
}

std::size_t WeightedDigraph::out_neighbor_count(std::size_t i) const noexcept {
    std::size_t count = 0;
    for (std::size_t j = 0; j < size(); ++j) count += (j != i && has_edge(i, j)) ? 1 : 0;
    return count;
}

bool WeightedDigraph::is_symmetric(double tol) const { return weights_.asymmetry() <= tol; }

bool WeightedDigraph::has_symmetric_edge_set() const noexcept {
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            if (has_edge(i, j) != has_edge(j, i)) return false;
        }
    }
    return true;
}

double WeightedDigraph::min_edge_weight() const noexcept {
    double best = 0.0;
    bool any = false;
    for (const double w : weights_.data()) {
        if (w == 0.0) continue;
        best = any ? std::min(best, w) : w;
        any = true;
    }
    return best;
}

double LaplacianMatrix::max_row_sum_magnitude() const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = entries_.row(i);
        worst = std::max(worst, std::abs(std::accumulate(r.begin(), r.end(), 0.0)));
    }
    return worst;
}

std::string to_string(CertificateKind kind) {
    switch (kind) {
        case CertificateKind::Complete: return "Complete";
        case CertificateKind::NeighborConnected: return "NeighborConnected";
        case CertificateKind::StronglyConnected: return "StronglyConnected";
        case CertificateKind::AssumptionB: return "AssumptionB";
    }
    return "Unknown";
}

LaplacianMatrix laplacian(const WeightedDigraph& g) {
    const std::size_t n = g.size();
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = g.weight(i, j);
            l(i, j) = -w;
            degree += w;
        }
        l(i, i) = degree;
    }
    return LaplacianMatrix(std::move(l));
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& m) {
    require_symmetric(m, "eigenvalue input");
    DenseMatrix a = m;
    const std::size_t n = a.rows();
    // Symmetrize exactly so rotations see one value per pair.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    }

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= kJacobiOffDiagonalTarget) break;
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Below rounding relative to the diagonal: drop instead of rotating.
                const double scale = std::abs(a(p, p)) + std::abs(a(q, q));
                if (std::abs(apq) <= 1e-18 * scale) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotate(a, p, q);
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> symmetric_spectrum(const LaplacianMatrix& l) { return symmetric_eigenvalues(l.entries()); }

std::size_t zero_eigenvalue_multiplicity(std::span<const double> spectrum) {
    double largest = 0.0;
    for (const double x : spectrum) largest = std::max(largest, std::abs(x));
    // An all-zero spectrum (edgeless graph) is entirely kernel.
    const double threshold = kZeroEigenvalueRelative * largest;
    return static_cast<std::size_t>(
        std::count_if(spectrum.begin(), spectrum.end(), [&](double x) { return std::abs(x) <= threshold; }));
}

double fiedler_value(const WeightedDigraph& g) {
    if (!g.is_symmetric(kSymmetryTolerance)) throw Error(ErrorKind::NonSymmetric, "Fiedler value needs a symmetric graph");
    if (g.size() < 2) return 0.0;
    return symmetric_spectrum(laplacian(g))[1];
}

double quadratic_form(const LaplacianMatrix& l, std::span<const double> x) {
    const std::size_t n = l.size();
    if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length differs from Laplacian size");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += l(i, j) * x[j];
        total += x[i] * row;
    }
    return total;
}

SpectrumComparison eigenvalue_comparison_check(const WeightedDigraph& p, const WeightedDigraph& q) {
    if (p.size() != q.size()) throw Error(ErrorKind::DimensionMismatch, "graphs differ in vertex count");
    if (!p.is_symmetric(kSymmetryTolerance) || !q.is_symmetric(kSymmetryTolerance)) {
        throw Error(ErrorKind::NonSymmetric, "spectral comparison needs symmetric graphs");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p.weight(i, j) < 0.0 || p.weight(i, j) > q.weight(i, j)) {
                throw Error(ErrorKind::PreconditionViolated,
                            "entrywise 0 <= p_ij <= q_ij fails at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    SpectrumComparison out;
    out.spectrum_p = symmetric_spectrum(laplacian(p));
    out.spectrum_q = symmetric_spectrum(laplacian(q));
    out.holds = true;
    for (std::size_t k = 0; k < out.spectrum_p.size(); ++k) {
        if (out.spectrum_p[k] > out.spectrum_q[k] + kComparisonSlack) {
            out.holds = false;
            out.offending_index = k;
            break;
        }
    }
    return out;
}

ConnectivityCertificate is_neighbor_connected(const WeightedDigraph& g) {
    const std::size_t n = g.size();
    ConnectivityCertificate cert;
    cert.kind = CertificateKind::NeighborConnected;
    auto mutual = [&](std::size_t a, std::size_t b) { return g.has_edge(a, b) && g.has_edge(b, a); };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (mutual(i, j)) continue;
            bool shared = false;
            for (std::size_t k = 0; k < n && !shared; ++k) {
                shared = k != i && k != j && mutual(i, k) && mutual(j, k);
            }
            if (!shared) {
                cert.witness = CertificateWitness{i, j, "no mutual edge and no mutual common neighbor"};
                return cert;
            }
        }
    }
    cert.holds = true;
    if (n >= 2) cert.derived_rate = g.min_edge_weight();
    return cert;
}

ConnectivityCertificate is_strongly_connected(const WeightedDigraph& g) {
    ConnectivityCertificate cert;
    cert.kind = CertificateKind::StronglyConnected;
    const auto forward = reachable_from(g, 0, false);
    const auto backward = reachable_from(g, 0, true);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!forward[v]) {
            cert.witness = CertificateWitness{0, v, "vertex not reachable from 0"};
            return cert;
        }
        if (!backward[v]) {
            cert.witness = CertificateWitness{v, 0, "vertex 0 not reachable from vertex"};
            return cert;
        }
    }
    cert.holds = true;
    return cert;
}

std::size_t undirected_component_count(const WeightedDigraph& g) {
    DisjointSets sets(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g.has_edge(i, j)) sets.unite(i, j);
        }
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < g.size(); ++i) roots += sets.find(i) == i ? 1 : 0;
    return roots;
}

ConnectivityCertificate check_assumption_b(const WeightedDigraph& g, double gamma_m, double epsilon, double n) {
    if (!(gamma_m > 0.0) || !(epsilon >= 0.0) || !(n > 2.0) || n * epsilon > gamma_m * (1.0 + 1e-12)) {
        throw Error(ErrorKind::PreconditionViolated, "need gamma_m > 0, epsilon >= 0, n > 2 and n*epsilon <= gamma_m");
    }
    const std::size_t size = g.size();
    ConnectivityCertificate cert;
    cert.kind = CertificateKind::AssumptionB;

    std::size_t lo = size;
    std::size_t hi = 0;
    std::size_t lo_vertex = 0;
    for (std::size_t i = 0; i < size; ++i) {
        const std::size_t c = g.out_neighbor_count(i);
        if (c < lo) {
            lo = c;
            lo_vertex = i;
        }
        hi = std::max(hi, c);
    }
    cert.measured_min_neighbors = lo;
    cert.measured_max_neighbors = hi;

    if (lo < size / 2) {
        cert.witness = CertificateWitness{lo_vertex, std::nullopt, "fewer than floor(N/2) neighbors"};
        return cert;
    }
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = i + 1; j < size; ++j) {
            if (g.has_edge(i, j) != g.has_edge(j, i)) {
                cert.witness = CertificateWitness{i, j, "edge set is not symmetric"};
                return cert;
            }
            if (!g.has_edge(i, j)) continue;
            const double mean = 0.5 * (g.weight(i, j) + g.weight(j, i));
            const double skew = 0.5 * (g.weight(i, j) - g.weight(j, i));
            if (mean < gamma_m - kAssumptionBWeightSlack) {
                cert.witness = CertificateWitness{i, j, "symmetric mean weight below gamma_m"};
                return cert;
            }
            if (std::abs(skew) > epsilon + kAssumptionBWeightSlack) {
                cert.witness = CertificateWitness{i, j, "antisymmetric weight part exceeds epsilon"};
                return cert;
            }
        }
    }
    cert.holds = true;
    if (hi < size) {
        const auto margin = assumption_b_margin(size, lo, hi, n);
        if (margin.delta > 0.0) {
            cert.derived_rate = gamma_m * margin.delta / (n * static_cast<double>(size));
        }
    }
    return cert;
}

}  // namespace tgflock
