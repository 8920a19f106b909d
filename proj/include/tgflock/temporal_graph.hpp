#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tgflock/graph.hpp"

namespace tgflock {

/// Piecewise-constant graph schedule G(t). Either an explicit list of
/// (switch time, graph) entries or a periodic rule whose k-th piece starts at
/// k * period and is produced on demand by a factory.
class TemporalGraph {
public:
    using Factory = std::function<WeightedDigraph(std::size_t piece)>;

    [[nodiscard]] static TemporalGraph constant(WeightedDigraph g);
    /// First entry must start at 0; switch times strictly increasing; equal sizes.
    [[nodiscard]] static TemporalGraph from_schedule(std::vector<std::pair<double, WeightedDigraph>> schedule);
    [[nodiscard]] static TemporalGraph periodic(double period, Factory factory);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] bool is_periodic() const noexcept { return period_.has_value(); }
    [[nodiscard]] std::optional<double> period() const noexcept { return period_; }

    /// Index of the piece active at time t (largest switch time <= t).
    [[nodiscard]] std::size_t piece_index(double t) const;
    [[nodiscard]] double piece_start(std::size_t piece) const;
    [[nodiscard]] WeightedDigraph graph_for_piece(std::size_t piece) const;
    [[nodiscard]] WeightedDigraph at(double t) const { return graph_for_piece(piece_index(t)); }

    /// Number of pieces that start in [0, horizon).
    [[nodiscard]] std::size_t piece_count(double horizon) const;
    [[nodiscard]] std::vector<std::pair<double, WeightedDigraph>> expand(double horizon) const;

private:
    TemporalGraph() = default;

    std::size_t n_ = 0;
    std::vector<std::pair<double, WeightedDigraph>> schedule_;
    std::optional<double> period_;
    Factory factory_;
};

}  // namespace tgflock
