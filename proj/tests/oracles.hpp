#pragma once
// Reference evaluations written independently of the library code paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tgflock/dense.hpp"
#include "tgflock/graph.hpp"
#include "tgflock/rng.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const tgflock::DenseMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline Eigen::MatrixXd laplacian(const tgflock::WeightedDigraph& g) {
    const Eigen::MatrixXd a = to_eigen(g.weights());
    Eigen::MatrixXd l = -a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
    return l;
}

inline std::vector<double> spectrum(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

/// exp(-L t) x0 for symmetric L by eigendecomposition.
inline Eigen::VectorXd heat_flow(const Eigen::MatrixXd& l, const Eigen::VectorXd& x0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    const Eigen::VectorXd decay = (-t * es.eigenvalues().array()).exp();
    return es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose() * x0;
}

/// Literal pair-by-pair reading of the neighbor-connectivity definition.
inline bool neighbor_connected(const tgflock::WeightedDigraph& g) {
    const std::size_t n = g.size();
    auto e = [&](std::size_t a, std::size_t b) { return g.weight(a, b) != 0.0; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            bool ok = e(i, j) && e(j, i);
            for (std::size_t k = 0; k < n && !ok; ++k) {
                if (k == i || k == j) continue;
                ok = e(i, k) && e(k, i) && e(j, k) && e(k, j);
            }
            if (!ok) return false;
        }
    }
    return true;
}

/// Case table of the pair comparison matrix, evaluated per (row pair, column pair).
inline double e_entry(const tgflock::WeightedDigraph& g, std::size_t i, std::size_t j, std::size_t l, std::size_t k) {
    const std::size_t n = g.size();
    auto a = [&](std::size_t p, std::size_t q) { return g.weight(p, q); };
    auto eta = [](double x) { return std::max(x, 0.0); };
    if (l == i && k == j) {
        double s = -2.0 * (a(i, j) + a(j, i));
        for (std::size_t m = 0; m < n; ++m)
            if (m != i && m != j) s -= a(i, m) + a(j, m);
        return s;
    }
    if (l == i) return eta(a(j, k) - a(i, k));
    if (k == i) return eta(a(j, l) - a(i, l));
    if (l == j) return eta(a(i, k) - a(j, k));
    if (k == j) return eta(a(i, l) - a(j, l));
    return 0.0;
}

inline tgflock::WeightedDigraph random_symmetric(std::size_t n, double p_edge, double w_lo, double w_hi,
                                                 tgflock::CounterRng& rng) {
    tgflock::WeightedDigraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform01() < p_edge) g.set_undirected(i, j, rng.uniform(w_lo, w_hi));
    return g;
}

inline tgflock::WeightedDigraph random_digraph(std::size_t n, double p_edge, double w_lo, double w_hi,
                                               tgflock::CounterRng& rng) {
    tgflock::WeightedDigraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.uniform01() < p_edge) g.set_weight(i, j, rng.uniform(w_lo, w_hi));
    return g;
}

}  // namespace oracle
