#include "tgflock/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tgflock/error.hpp"
#include "tgflock/io.hpp"

namespace tgflock {

namespace {

void require_ensemble(const ParticleEnsemble& s) {
    if (s.agents() == 0 || s.dim() == 0) throw Error(ErrorKind::InvalidSize, "ensemble needs N >= 1 and n >= 1");
    if (s.velocities.rows() != s.agents() || s.velocities.cols() != s.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "positions and velocities differ in shape");
    }
    if (!s.positions.all_finite() || !s.velocities.all_finite()) {
        throw Error(ErrorKind::NonFinite, "ensemble has non-finite entries");
    }
}

void require_radius(double d) {
    if (!(d > 0.0)) throw Error(ErrorKind::PreconditionViolated, "radius d must be positive");
}

// Right-hand side of the particle models over the flat state [x, v, kappa].
class ParticleField {
public:
    ParticleField(const ModelParams& p, std::size_t agents, std::size_t dim)
        : p_(p), n_(agents), dim_(dim), d2_(p.radius_d * p.radius_d), inv_norm_(agents), sum_(agents * dim), count_(agents) {}

    void operator()(double t, double /*step_start*/, const double* y, double* dy) {
        switch (p_.model) {
            case ModelKind::AdaptiveCS: evaluate<ModelKind::AdaptiveCS>(t, y, dy); break;
            case ModelKind::SingularCS: evaluate<ModelKind::SingularCS>(t, y, dy); break;
            default: evaluate<ModelKind::ClassicalCS>(t, y, dy); break;
        }
    }

private:
    template <ModelKind M>
    void evaluate(double t, const double* y, double* dy) {
        constexpr bool cosine = M != ModelKind::ClassicalCS;
        const double* x = y;
        const double* v = y + n_ * dim_;
        const double* kappa = y + 2 * n_ * dim_;
        double* dx = dy;
        double* dv = dy + n_ * dim_;
        double* dkappa = dy + 2 * n_ * dim_;

        std::copy(v, v + n_ * dim_, dx);
        std::fill(sum_.begin(), sum_.end(), 0.0);
        std::fill(count_.begin(), count_.end(), 1.0);

        if constexpr (cosine) {
            for (std::size_t i = 0; i < n_; ++i) {
                double s = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) s += v[i * dim_ + k] * v[i * dim_ + k];
                const double norm = std::sqrt(s);
                if (norm < kMinVelocityNorm) {
                    throw Error(ErrorKind::DegenerateVelocity,
                                "velocity of agent " + std::to_string(i) + " vanished", t);
                }
                inv_norm_[i] = 1.0 / norm;
            }
        }
        if constexpr (M == ModelKind::AdaptiveCS) {
            for (std::size_t i = 0; i < n_; ++i) dkappa[i * n_ + i] = p_.epsilon * (1.0 - kappa[i * n_ + i]);
        }

        for (std::size_t i = 0; i < n_; ++i) {
            const double* xi = x + i * dim_;
            const double* vi = v + i * dim_;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double* xj = x + j * dim_;
                const double* vj = v + j * dim_;
                double r2 = 0.0;
                double dot = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) {
                    const double dxk = xi[k] - xj[k];
                    r2 += dxk * dxk;
                    dot += vi[k] * vj[k];
                }
                double a = 0.0;
                if constexpr (cosine) a = std::clamp(dot * inv_norm_[i] * inv_norm_[j], -1.0, 1.0);
                if constexpr (M == ModelKind::AdaptiveCS) {
                    dkappa[i * n_ + j] = p_.epsilon * (a - kappa[i * n_ + j]);
                    dkappa[j * n_ + i] = p_.epsilon * (a - kappa[j * n_ + i]);
                }
                if (!(r2 < d2_)) continue;

                double w_ij;
                double w_ji;
                if constexpr (M == ModelKind::AdaptiveCS) {
                    w_ij = kappa[i * n_ + j];
                    w_ji = kappa[j * n_ + i];
                } else if constexpr (M == ModelKind::SingularCS) {
                    w_ij = w_ji = a;
                } else {
                    w_ij = w_ji = 1.0 / std::sqrt(1.0 + r2);
                }
                count_[i] += 1.0;
                count_[j] += 1.0;
                for (std::size_t k = 0; k < dim_; ++k) {
                    const double rel = vj[k] - vi[k];
                    sum_[i * dim_ + k] += w_ij * rel;
                    sum_[j * dim_ + k] -= w_ji * rel;
                }
            }
        }

        const double gain = M == ModelKind::ClassicalCS ? 1.0 : p_.kappa_global;
        for (std::size_t i = 0; i < n_; ++i) {
            const double scale = gain / count_[i];
            for (std::size_t k = 0; k < dim_; ++k) dv[i * dim_ + k] = scale * sum_[i * dim_ + k];
        }
    }

    ModelParams p_;
    std::size_t n_;
    std::size_t dim_;
    double d2_;
    std::vector<double> inv_norm_;
    std::vector<double> sum_;
    std::vector<double> count_;
};

class LaplacianField {
public:
    LaplacianField(const TemporalGraph& g, std::size_t dim) : graph_(g), dim_(dim), current_(g.graph_for_piece(0)) {}

    // Stages after the step start see the piece active just before their
    // time, so a switch that lands on a step boundary takes effect exactly
    // there instead of leaking into the previous step's last stage.
    void operator()(double t, double step_start, const double* y, double* dy) {
        const std::size_t piece = graph_.piece_index(t > step_start ? 0.5 * (t + step_start) : t);
        if (piece != piece_) {
            current_ = graph_.graph_for_piece(piece);
            piece_ = piece;
        }
        const std::size_t n = current_.size();
        const DenseMatrix& a = current_.weights();
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = a.row(i);
            for (std::size_t k = 0; k < dim_; ++k) {
                const double xi = y[i * dim_ + k];
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += row[j] * (y[j * dim_ + k] - xi);
                dy[i * dim_ + k] = acc;
            }
        }
    }

private:
    const TemporalGraph& graph_;
    std::size_t dim_;
    std::size_t piece_ = 0;
    WeightedDigraph current_;
};

struct Schedule {
    std::size_t steps = 0;
    double dt = 0.0;
    double horizon = 0.0;

    [[nodiscard]] double time(std::size_t k) const { return k == steps ? horizon : static_cast<double>(k) * dt; }
};

Schedule make_schedule(const IntegrationOptions& o) {
    if (!(o.horizon > 0.0) || !std::isfinite(o.horizon)) throw Error(ErrorKind::PreconditionViolated, "horizon must be positive");
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw Error(ErrorKind::PreconditionViolated, "dt must be positive");
    if (o.sample_every == 0) throw Error(ErrorKind::PreconditionViolated, "sample_every must be positive");
    Schedule s;
    s.dt = o.dt;
    s.horizon = o.horizon;
    // A final partial step lands exactly on the horizon when dt does not divide it.
    s.steps = static_cast<std::size_t>(std::ceil(o.horizon / o.dt - 1e-9));
    s.steps = std::max<std::size_t>(s.steps, 1);
    return s;
}

template <class Field, class Record>
void run_rk4(Field& field, std::vector<double>& y, const Schedule& sched, const IntegrationOptions& opts,
             const StateLayout& layout, Record&& record) {
    const std::size_t m = y.size();
    std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);

    record(0.0, y);
    if (opts.observer) opts.observer(0.0, y, layout);
    for (std::size_t step = 0; step < sched.steps; ++step) {
        const double t = sched.time(step);
        const double h = sched.time(step + 1) - t;
        field(t, t, y.data(), k1.data());
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        field(t + 0.5 * h, t, tmp.data(), k2.data());
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        field(t + 0.5 * h, t, tmp.data(), k3.data());
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
        field(t + h, t, tmp.data(), k4.data());

        const double w = h / 6.0;
        double probe = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            probe += y[i] * 0.0;  // stays 0 unless some entry is inf or nan
        }
        const double t_next = sched.time(step + 1);
        if (probe != 0.0 || std::isnan(probe)) throw Error(ErrorKind::NonFinite, "state overflowed", t_next);
        if (opts.observer) opts.observer(t_next, y, layout);
        if ((step + 1) % opts.sample_every == 0 || step + 1 == sched.steps) record(t_next, y);
    }
}

DenseMatrix block(const std::vector<double>& y, std::size_t offset, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(offset), rows * cols, m.data().begin());
    return m;
}

Derivatives evaluate_particles(const ParticleEnsemble& state, const CouplingMatrix* coupling, const ModelParams& params) {
    require_ensemble(state);
    require_radius(params.radius_d);
    const std::size_t n = state.agents();
    const std::size_t dim = state.dim();
    StateLayout layout{n, dim, true, coupling != nullptr};
    std::vector<double> y(layout.total());
    std::copy(state.positions.data().begin(), state.positions.data().end(), y.begin());
    std::copy(state.velocities.data().begin(), state.velocities.data().end(), y.begin() + static_cast<std::ptrdiff_t>(layout.velocity_offset()));
    if (coupling) {
        std::copy(coupling->data().begin(), coupling->data().end(), y.begin() + static_cast<std::ptrdiff_t>(layout.coupling_offset()));
    }
    std::vector<double> dy(y.size());
    ParticleField field(params, n, dim);
    field(0.0, 0.0, y.data(), dy.data());
    Derivatives out{block(dy, 0, n, dim), block(dy, layout.velocity_offset(), n, dim), {}};
    if (coupling) out.dkappa = block(dy, layout.coupling_offset(), n, n);
    return out;
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::AdaptiveCS: return "adaptive_cs";
        case ModelKind::SingularCS: return "singular_cs";
        case ModelKind::ClassicalCS: return "classical_cs";
        case ModelKind::Laplacian: return "laplacian";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (const auto k : {ModelKind::AdaptiveCS, ModelKind::SingularCS, ModelKind::ClassicalCS, ModelKind::Laplacian}) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorKind::UnknownKind, "unknown model '" + name + "'");
}

double similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "velocity dimensions differ");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < kMinVelocityNorm || nb < kMinVelocityNorm) {
        throw Error(ErrorKind::DegenerateVelocity, "similarity of a vanishing velocity");
    }
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

Neighborhood neighborhood(const DenseMatrix& positions, double radius_d) {
    require_radius(radius_d);
    const std::size_t n = positions.rows();
    Neighborhood nb{n, std::vector<unsigned char>(n * n, 0), std::vector<std::size_t>(n, 0)};
    const double d2 = radius_d * radius_d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < positions.cols(); ++k) {
                const double diff = positions(i, k) - positions(j, k);
                r2 += diff * diff;
            }
            if (r2 < d2) {
                nb.psi[i * n + j] = 1;
                ++nb.count[i];
            }
        }
    }
    return nb;
}

Derivatives rhs_adaptive_cs(const ParticleEnsemble& state, const CouplingMatrix& coupling, const ModelParams& params) {
    if (coupling.rows() != state.agents() || coupling.cols() != state.agents()) {
        throw Error(ErrorKind::DimensionMismatch, "coupling must be N x N");
    }
    ModelParams p = params;
    p.model = ModelKind::AdaptiveCS;
    return evaluate_particles(state, &coupling, p);
}

Derivatives rhs_singular_cs(const ParticleEnsemble& state, const ModelParams& params) {
    ModelParams p = params;
    p.model = ModelKind::SingularCS;
    return evaluate_particles(state, nullptr, p);
}

Derivatives rhs_classical_cs(const ParticleEnsemble& state, const ModelParams& params) {
    ModelParams p = params;
    p.model = ModelKind::ClassicalCS;
    return evaluate_particles(state, nullptr, p);
}

DenseMatrix rhs_laplacian(const DenseMatrix& x, const WeightedDigraph& g) {
    if (x.rows() != g.size() || x.cols() == 0) throw Error(ErrorKind::DimensionMismatch, "state rows must equal N");
    const TemporalGraph tg = TemporalGraph::constant(g);
    LaplacianField field(tg, x.cols());
    DenseMatrix out(x.rows(), x.cols());
    field(0.0, 0.0, x.data().data(), out.data().data());
    return out;
}

ParticleEnsemble TrajectoryRecord::ensemble(std::size_t k) const {
    ParticleEnsemble e{positions.at(k), {}};
    if (!velocities.empty()) e.velocities = velocities.at(k);
    return e;
}

void TrajectoryRecord::write_csv(std::ostream& out) const {
    if (times.empty()) return;
    const std::size_t n = positions.front().rows();
    const std::size_t dim = positions.front().cols();
    out << "t";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < dim; ++k) out << ",x_" << i << '_' << k;
    }
    if (!velocities.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < dim; ++k) out << ",v_" << i << '_' << k;
        }
    }
    if (!couplings.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) out << ",kappa_" << i << '_' << j;
        }
    }
    out << '\n';
    for (std::size_t s = 0; s < times.size(); ++s) {
        out << format_double(times[s]);
        for (const double value : positions[s].data()) out << ',' << format_double(value);
        if (!velocities.empty()) {
            for (const double value : velocities[s].data()) out << ',' << format_double(value);
        }
        if (!couplings.empty()) {
            for (const double value : couplings[s].data()) out << ',' << format_double(value);
        }
        out << '\n';
    }
}

TrajectoryRecord integrate(const ModelParams& params, const ParticleEnsemble& initial,
                           const std::optional<CouplingMatrix>& coupling, const IntegrationOptions& options) {
    if (params.model == ModelKind::Laplacian) {
        throw Error(ErrorKind::PreconditionViolated, "Laplacian runs go through integrate_laplacian");
    }
    require_ensemble(initial);
    require_radius(params.radius_d);
    const bool adaptive = params.model == ModelKind::AdaptiveCS;
    const std::size_t n = initial.agents();
    const std::size_t dim = initial.dim();
    if (adaptive) {
        if (!coupling) throw Error(ErrorKind::PreconditionViolated, "adaptive model needs an initial coupling");
        if (coupling->rows() != n || coupling->cols() != n) throw Error(ErrorKind::DimensionMismatch, "coupling must be N x N");
        if (!coupling->all_finite()) throw Error(ErrorKind::NonFinite, "coupling has non-finite entries");
    }
    const Schedule sched = make_schedule(options);
    const StateLayout layout{n, dim, true, adaptive};

    std::vector<double> y(layout.total());
    std::copy(initial.positions.data().begin(), initial.positions.data().end(), y.begin());
    std::copy(initial.velocities.data().begin(), initial.velocities.data().end(),
              y.begin() + static_cast<std::ptrdiff_t>(layout.velocity_offset()));
    if (adaptive) {
        std::copy(coupling->data().begin(), coupling->data().end(),
                  y.begin() + static_cast<std::ptrdiff_t>(layout.coupling_offset()));
    }

    TrajectoryRecord rec;
    rec.model = params.model;
    const bool keep_coupling = adaptive && options.record_coupling;
    ParticleField field(params, n, dim);
    run_rk4(field, y, sched, options, layout, [&](double t, const std::vector<double>& state) {
        rec.times.push_back(t);
        rec.positions.push_back(block(state, 0, n, dim));
        rec.velocities.push_back(block(state, layout.velocity_offset(), n, dim));
        if (keep_coupling) rec.couplings.push_back(block(state, layout.coupling_offset(), n, n));
    });
    return rec;
}

TrajectoryRecord integrate_laplacian(const TemporalGraph& graph, const DenseMatrix& initial,
                                     const IntegrationOptions& options) {
    if (initial.rows() != graph.size() || initial.cols() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "initial state rows must equal the vertex count");
    }
    if (!initial.all_finite()) throw Error(ErrorKind::NonFinite, "initial state has non-finite entries");
    const Schedule sched = make_schedule(options);
    const std::size_t n = initial.rows();
    const std::size_t dim = initial.cols();
    const StateLayout layout{n, dim, false, false};

    std::vector<double> y(initial.data().begin(), initial.data().end());
    TrajectoryRecord rec;
    rec.model = ModelKind::Laplacian;
    LaplacianField field(graph, dim);
    run_rk4(field, y, sched, options, layout, [&](double t, const std::vector<double>& state) {
        rec.times.push_back(t);
        rec.positions.push_back(block(state, 0, n, dim));
    });
    return rec;
}

}  // namespace tgflock
