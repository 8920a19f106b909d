#include "tgflock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tgflock/error.hpp"

namespace tgflock {

namespace {

constexpr double kLogFloor = 1e-12;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

double row_distance(const DenseMatrix& m, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const double d = m(i, k) - m(j, k);
        s += d * d;
    }
    return std::sqrt(s);
}

// Averaged relative to the first row so identical rows give an exact mean.
std::vector<double> column_means(const DenseMatrix& m) {
    std::vector<double> mean(m.cols(), 0.0);
    if (m.rows() == 0) return mean;
    for (std::size_t i = 1; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) mean[k] += m(i, k) - m(0, k);
    }
    for (std::size_t k = 0; k < m.cols(); ++k) mean[k] = m(0, k) + mean[k] / static_cast<double>(m.rows());
    return mean;
}

}  // namespace

double diameter(const DenseMatrix& points) {
    double best = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        for (std::size_t j = i + 1; j < points.rows(); ++j) best = std::max(best, row_distance(points, i, j));
    }
    return best;
}

double fluctuation_norm(const DenseMatrix& state) {
    const auto mean = column_means(state);
    double s = 0.0;
    for (std::size_t i = 0; i < state.rows(); ++i) {
        for (std::size_t k = 0; k < state.cols(); ++k) {
            const double d = state(i, k) - mean[k];
            s += d * d;
        }
    }
    return std::sqrt(s);
}

double velocity_deviation(const DenseMatrix& velocities) {
    if (velocities.rows() == 0) return 0.0;
    const auto mean = column_means(velocities);
    double total = 0.0;
    for (std::size_t i = 0; i < velocities.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < velocities.cols(); ++k) {
            const double d = velocities(i, k) - mean[k];
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return total / static_cast<double>(velocities.rows());
}

double max_velocity_difference(const DenseMatrix& velocities) { return diameter(velocities); }

std::string to_string(EnvelopeKind kind) {
    switch (kind) {
        case EnvelopeKind::CompleteSym: return "complete_sym";
        case EnvelopeKind::NeighborConn: return "neighbor_conn";
        case EnvelopeKind::AssumptionB: return "assumption_b";
    }
    return "unknown";
}

EnvelopeKind envelope_kind_from_string(const std::string& name) {
    for (const auto k : {EnvelopeKind::CompleteSym, EnvelopeKind::NeighborConn, EnvelopeKind::AssumptionB}) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorKind::UnknownKind, "unknown envelope kind '" + name + "'");
}

double envelope_rate(EnvelopeKind kind, const EnvelopeParams& p) {
    const double n = static_cast<double>(p.n_vertices);
    switch (kind) {
        case EnvelopeKind::CompleteSym:
            if (!(p.alpha_m > 0.0) || p.n_vertices == 0) throw Error(ErrorKind::PreconditionViolated, "need alpha_m > 0 and N >= 1");
            return p.alpha_m * n;
        case EnvelopeKind::NeighborConn:
            if (!(p.w_m > 0.0)) throw Error(ErrorKind::PreconditionViolated, "need w_m > 0");
            return p.w_m;
        case EnvelopeKind::AssumptionB:
            if (!(p.gamma_m > 0.0) || !(p.delta > 0.0) || p.n_vertices == 0) {
                throw Error(ErrorKind::PreconditionViolated, "need gamma_m > 0, delta > 0 and N >= 1");
            }
            return p.gamma_m * p.delta / n;
    }
    throw Error(ErrorKind::UnknownKind, "unknown envelope kind");
}

double assumption_b_proof_rate(const EnvelopeParams& p) {
    if (!(p.n_ratio > 2.0)) throw Error(ErrorKind::PreconditionViolated, "need n > 2");
    return envelope_rate(EnvelopeKind::AssumptionB, p) / p.n_ratio;
}

double decay_envelope(EnvelopeKind kind, const EnvelopeParams& p, double t, double initial_value) {
    return initial_value * std::exp(-envelope_rate(kind, p) * t);
}

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    if (i == j || j >= n) throw Error(ErrorKind::DimensionMismatch, "pair index needs i != j < N");
    // Pairs (0,1..n-1), (1,2..n-1), ...
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

DenseMatrix e_matrix(const WeightedDigraph& g) {
    const std::size_t n = g.size();
    if (n < 2) throw Error(ErrorKind::InvalidSize, "pair matrix needs N >= 2");
    const std::size_t m = n * (n - 1) / 2;
    DenseMatrix e(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t r = pair_index(i, j, n);
            double diag = -2.0 * (g.weight(i, j) + g.weight(j, i));
            for (std::size_t l = 0; l < n; ++l) {
                if (l == i || l == j) continue;
                const double ail = g.weight(i, l);
                const double ajl = g.weight(j, l);
                diag -= ail + ajl;
                e(r, pair_index(i, l, n)) = positive_part(ajl - ail);
                e(r, pair_index(j, l, n)) = positive_part(ail - ajl);
            }
            e(r, r) = diag;
        }
    }
    return e;
}

double row_dominance_margin(const DenseMatrix& e, const WeightedDigraph& g) {
    const std::size_t n = g.size();
    if (!e.is_square() || e.rows() != n * (n - 1) / 2) {
        throw Error(ErrorKind::DimensionMismatch, "pair matrix does not match the graph");
    }
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < e.rows(); ++r) {
        double off = 0.0;
        for (std::size_t c = 0; c < e.cols(); ++c) {
            if (c != r) off += std::abs(e(r, c));
        }
        margin = std::min(margin, std::abs(e(r, r)) - off);
    }
    return margin;
}

double assumption_b_dissipation(std::span<const double> x, const WeightedDigraph& g) {
    const std::size_t n = g.size();
    if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "state length differs from N");
    if (!g.has_symmetric_edge_set()) throw Error(ErrorKind::EdgeAsymmetry, "edge set is not symmetric");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !g.has_edge(i, j)) continue;
            const double yi = x[i] - mean;
            const double yj = x[j] - mean;
            const double sym = 0.5 * (g.weight(i, j) + g.weight(j, i));
            const double skew = 0.5 * (g.weight(i, j) - g.weight(j, i));
            total += sym * (yi - yj) * (yi - yj) + skew * (yi * yi - yj * yj);
        }
    }
    return -0.5 * total;
}

Clustering cluster_count(const DenseMatrix& positions, double radius_d) {
    if (!(radius_d > 0.0)) throw Error(ErrorKind::PreconditionViolated, "radius d must be positive");
    const std::size_t n = positions.rows();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    const double d2 = radius_d * radius_d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < positions.cols(); ++k) {
                const double d = positions(i, k) - positions(j, k);
                r2 += d * d;
            }
            if (r2 < d2) {
                const std::size_t a = find(i);
                const std::size_t b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    // Roots are the smallest members, so scanning in index order numbers
    // components by their smallest member.
    Clustering out;
    out.labels.assign(n, 0);
    std::vector<std::size_t> id_of_root(n, n);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t root = find(v);
        if (id_of_root[root] == n) {
            id_of_root[root] = out.count++;
            out.sizes.push_back(0);
        }
        out.labels[v] = id_of_root[root];
        ++out.sizes[out.labels[v]];
    }
    return out;
}

std::string to_string(TwoBodyOutcome outcome) {
    switch (outcome) {
        case TwoBodyOutcome::Flocking: return "Flocking";
        case TwoBodyOutcome::Dispersion: return "Dispersion";
        case TwoBodyOutcome::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

TwoBodyVerdict two_body_classify(std::span<const double> x1, std::span<const double> x2, std::span<const double> v1,
                                 std::span<const double> v2, double kappa_global, double radius_d) {
    const std::size_t dim = x1.size();
    if (x2.size() != dim || v1.size() != dim || v2.size() != dim || dim == 0) {
        throw Error(ErrorKind::DimensionMismatch, "two-body vectors differ in dimension");
    }
    if (!(kappa_global > 0.0) || !(radius_d > 0.0)) {
        throw Error(ErrorKind::PreconditionViolated, "need kappa > 0 and d > 0");
    }
    double dx2 = 0.0;
    double dv2 = 0.0;
    double u0 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double dx = x1[k] - x2[k];
        const double dv = v1[k] - v2[k];
        dx2 += dx * dx;
        dv2 += dv * dv;
        u0 += dx * dv;
    }
    TwoBodyVerdict out;
    out.threshold = radius_d * radius_d;
    out.lhs_value = dx2;
    if (!(dx2 < out.threshold)) {
        out.reason = "agents start outside the detection radius";
        return out;
    }
    const double a_m = similarity(v1, v2);
    if (!(a_m > 0.0)) {
        out.reason = "initial velocity similarity is not positive";
        return out;
    }
    // Bounds on J, the integral of exp(-kappa int a): the exact limit is
    // |dx|^2 + 2 u0 J + |dv|^2 J^2 with 1/kappa <= J <= 1/(kappa a_m).
    const double j_lo = 1.0 / kappa_global;
    const double j_hi = 1.0 / (kappa_global * a_m);
    const double u_lower = u0 >= 0.0 ? j_lo : j_hi;
    const double u_upper = u0 >= 0.0 ? j_hi : j_lo;

    const double dispersion_lhs = dx2 + 2.0 * u0 * u_lower + dv2 * j_lo * j_lo;
    if (dispersion_lhs > out.threshold) {
        out.verdict = TwoBodyOutcome::Dispersion;
        out.lhs_value = dispersion_lhs;
        return out;
    }
    const double flocking_lhs = dx2 + 2.0 * u0 * u_upper + dv2 * j_hi * j_hi;
    out.lhs_value = flocking_lhs;
    if (flocking_lhs < out.threshold) {
        out.verdict = TwoBodyOutcome::Flocking;
        return out;
    }
    out.reason = "between the sufficient conditions";
    return out;
}

bool flocking_detector(const TrajectoryRecord& traj, double dist_bound, double vel_tol) {
    if (traj.samples() == 0) throw Error(ErrorKind::InvalidSize, "empty trajectory");
    for (const auto& x : traj.positions) {
        if (diameter(x) > dist_bound) return false;
    }
    const DenseMatrix& last = traj.velocities.empty() ? traj.positions.back() : traj.velocities.back();
    return max_velocity_difference(last) <= vel_tol;
}

std::optional<double> log_slope(const MetricSeries& series) {
    const std::size_t n = std::min(series.times.size(), series.values.size());
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t k = n / 2; k < n; ++k) {
        if (series.values[k] > kLogFloor) {
            ts.push_back(series.times[k]);
            ys.push_back(std::log(series.values[k]));
        }
    }
    if (ts.size() < 2) return std::nullopt;
    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        sxy += (ts[k] - mt) * (ys[k] - my);
        sxx += (ts[k] - mt) * (ts[k] - mt);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

MetricSeries metric_series(const TrajectoryRecord& traj, const std::string& name, double radius_d) {
    MetricSeries s{name, traj.times, {}};
    s.values.reserve(traj.samples());
    const bool needs_velocity = name.rfind("velocity", 0) == 0;
    if (needs_velocity && traj.velocities.empty()) {
        throw Error(ErrorKind::PreconditionViolated, "metric '" + name + "' needs velocities");
    }
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        if (name == "diameter") {
            s.values.push_back(diameter(traj.positions[k]));
        } else if (name == "fluctuation_norm") {
            s.values.push_back(fluctuation_norm(traj.positions[k]));
        } else if (name == "velocity_diameter") {
            s.values.push_back(diameter(traj.velocities[k]));
        } else if (name == "velocity_deviation") {
            s.values.push_back(velocity_deviation(traj.velocities[k]));
        } else if (name == "velocity_fluctuation") {
            s.values.push_back(fluctuation_norm(traj.velocities[k]));
        } else if (name == "cluster_count") {
            s.values.push_back(static_cast<double>(cluster_count(traj.positions[k], radius_d).count));
        } else {
            throw Error(ErrorKind::UnknownKind, "unknown metric '" + name + "'");
        }
    }
    return s;
}

}  // namespace tgflock
