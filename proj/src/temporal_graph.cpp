#include "tgflock/temporal_graph.hpp"

#include <algorithm>
#include <cmath>

#include "tgflock/error.hpp"

namespace tgflock {

namespace {
// Stage times are sums of dt multiples; absorb the rounding at piece boundaries.
constexpr double kPieceBoundarySlack = 1e-9;
}  // namespace

TemporalGraph TemporalGraph::constant(WeightedDigraph g) {
    TemporalGraph tg;
    tg.n_ = g.size();
    tg.schedule_.emplace_back(0.0, std::move(g));
    return tg;
}

TemporalGraph TemporalGraph::from_schedule(std::vector<std::pair<double, WeightedDigraph>> schedule) {
    if (schedule.empty()) throw Error(ErrorKind::InvalidSize, "schedule needs at least one entry");
    if (schedule.front().first != 0.0) throw Error(ErrorKind::PreconditionViolated, "schedule must start at t = 0");
    const std::size_t n = schedule.front().second.size();
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        if (!(schedule[k].first > schedule[k - 1].first)) {
            throw Error(ErrorKind::PreconditionViolated, "switch times must be strictly increasing");
        }
        if (schedule[k].second.size() != n) throw Error(ErrorKind::DimensionMismatch, "schedule graphs differ in size");
    }
    TemporalGraph tg;
    tg.n_ = n;
    tg.schedule_ = std::move(schedule);
    return tg;
}

TemporalGraph TemporalGraph::periodic(double period, Factory factory) {
    if (!(period > 0.0) || !std::isfinite(period)) throw Error(ErrorKind::PreconditionViolated, "period must be positive");
    if (!factory) throw Error(ErrorKind::PreconditionViolated, "periodic schedule needs a factory");
    TemporalGraph tg;
    tg.n_ = factory(0).size();
    tg.period_ = period;
    tg.factory_ = std::move(factory);
    return tg;
}

std::size_t TemporalGraph::piece_index(double t) const {
    if (t < 0.0) t = 0.0;
    if (period_) return static_cast<std::size_t>(std::floor(t / *period_ + kPieceBoundarySlack));
    const auto it = std::upper_bound(schedule_.begin(), schedule_.end(), t + kPieceBoundarySlack,
                                     [](double value, const auto& entry) { return value < entry.first; });
    return static_cast<std::size_t>(std::distance(schedule_.begin(), it)) - 1;
}

double TemporalGraph::piece_start(std::size_t piece) const {
    if (period_) return static_cast<double>(piece) * *period_;
    if (piece >= schedule_.size()) throw Error(ErrorKind::DimensionMismatch, "piece index out of range");
    return schedule_[piece].first;
}

WeightedDigraph TemporalGraph::graph_for_piece(std::size_t piece) const {
    if (period_) {
        WeightedDigraph g = factory_(piece);
        if (g.size() != n_) throw Error(ErrorKind::DimensionMismatch, "factory changed the vertex count");
        return g;
    }
    return schedule_.at(std::min(piece, schedule_.size() - 1)).second;
}

std::size_t TemporalGraph::piece_count(double horizon) const {
    if (!period_) {
        return static_cast<std::size_t>(std::count_if(schedule_.begin(), schedule_.end(),
                                                      [&](const auto& e) { return e.first < horizon; }));
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / *period_ - kPieceBoundarySlack)));
}

std::vector<std::pair<double, WeightedDigraph>> TemporalGraph::expand(double horizon) const {
    std::vector<std::pair<double, WeightedDigraph>> out;
    const std::size_t count = std::max<std::size_t>(1, piece_count(horizon));
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.emplace_back(piece_start(k), graph_for_piece(k));
    return out;
}

}  // namespace tgflock
