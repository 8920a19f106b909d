#include "tgflock/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tgflock/error.hpp"
#include "tgflock/rng.hpp"

namespace tgflock {

namespace {

void require_positive_weight(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::PreconditionViolated, "edge weight must be positive");
}

std::vector<std::size_t> draw_leaders(std::size_t n, std::size_t count, CounterRng& rng) {
    const std::size_t first = rng.below(n);
    if (count == 1) return {first};
    std::size_t second = rng.below(n - 1);
    if (second >= first) ++second;
    return {first, second};
}

// Streams for the different random consumers in this file.
constexpr std::uint64_t kLeaderStream = 0x1ead;
constexpr std::uint64_t kGroupStream = 0x3972;
constexpr std::uint64_t kPerturbStream = 0x9e27;

}  // namespace

WeightedDigraph leader_graph(std::size_t n, double weight, const std::vector<std::size_t>& leaders) {
    require_positive_weight(weight);
    if (n < 2) throw Error(ErrorKind::InvalidSize, "leader graph needs at least 2 vertices");
    std::vector<bool> is_leader(n, false);
    for (const std::size_t l : leaders) {
        if (l >= n) throw Error(ErrorKind::InvalidSize, "leader index out of range");
        is_leader[l] = true;
    }
    WeightedDigraph g(n);
    for (const std::size_t l : leaders) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!is_leader[j]) g.set_undirected(l, j, weight);
        }
    }
    return g;
}

WeightedDigraph one_leader(std::size_t n, double weight) {
    if (n < 2) throw Error(ErrorKind::InvalidSize, "one-leader graph needs N >= 2");
    return leader_graph(n, weight, {0});
}

WeightedDigraph two_leaders(std::size_t n, double weight) {
    if (n < 3) throw Error(ErrorKind::InvalidSize, "two-leaders graph needs N >= 3");
    return leader_graph(n, weight, {0, n - 1});
}

std::string to_string(LeaderMode mode) {
    switch (mode) {
        case LeaderMode::FixedOne: return "fixed_one";
        case LeaderMode::FixedTwo: return "fixed_two";
        case LeaderMode::SwitchingOne: return "switching_one";
        case LeaderMode::SwitchingTwo: return "switching_two";
        case LeaderMode::MixedOneTwo: return "mixed_one_two";
    }
    return "unknown";
}

LeaderMode leader_mode_from_string(const std::string& name) {
    for (const auto mode : {LeaderMode::FixedOne, LeaderMode::FixedTwo, LeaderMode::SwitchingOne,
                            LeaderMode::SwitchingTwo, LeaderMode::MixedOneTwo}) {
        if (to_string(mode) == name) return mode;
    }
    throw Error(ErrorKind::UnknownKind, "unknown leader mode '" + name + "'");
}

TemporalGraph leader_temporal(std::size_t n, double weight, const LeaderSchedule& schedule, double horizon) {
    if (!(horizon > 0.0)) throw Error(ErrorKind::PreconditionViolated, "horizon must be positive");
    switch (schedule.mode) {
        case LeaderMode::FixedOne: return TemporalGraph::constant(one_leader(n, weight));
        case LeaderMode::FixedTwo: return TemporalGraph::constant(two_leaders(n, weight));
        default: break;
    }
    const bool needs_two = schedule.mode != LeaderMode::SwitchingOne;
    if (n < (needs_two ? 3U : 2U)) throw Error(ErrorKind::InvalidSize, "too few vertices for the leader schedule");
    require_positive_weight(weight);
    const LeaderMode mode = schedule.mode;
    const std::uint64_t seed = schedule.seed;
    return TemporalGraph::periodic(schedule.period, [=](std::size_t piece) {
        CounterRng rng(seed ^ kLeaderStream, piece);
        std::size_t count = mode == LeaderMode::SwitchingOne ? 1 : 2;
        if (mode == LeaderMode::MixedOneTwo) count = piece % 2 == 0 ? 1 : 2;
        return leader_graph(n, weight, draw_leaders(n, count, rng));
    });
}

WeightedDigraph three_group_directed(const std::array<std::size_t, 3>& sizes, double weight,
                                     const std::vector<std::size_t>& order) {
    require_positive_weight(weight);
    if (std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; })) {
        throw Error(ErrorKind::InvalidSize, "every group must be nonempty");
    }
    const std::size_t n = sizes[0] + sizes[1] + sizes[2];
    if (order.size() != n) throw Error(ErrorKind::DimensionMismatch, "vertex order length differs from N");

    std::vector<std::size_t> group(n);
    std::size_t pos = 0;
    for (std::size_t gi = 0; gi < 3; ++gi) {
        for (std::size_t k = 0; k < sizes[gi]; ++k) group[order[pos++]] = gi;
    }
    WeightedDigraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (group[i] == group[j] || group[j] == (group[i] + 1) % 3) g.set_weight(i, j, weight);
        }
    }
    return g;
}

WeightedDigraph three_group_directed(const std::array<std::size_t, 3>& sizes, double weight) {
    std::vector<std::size_t> order(sizes[0] + sizes[1] + sizes[2]);
    std::iota(order.begin(), order.end(), 0);
    return three_group_directed(sizes, weight, order);
}

std::array<std::size_t, 3> balanced_groups(std::size_t n) {
    if (n < 3) throw Error(ErrorKind::InvalidSize, "three groups need N >= 3");
    return {n / 3 + (n % 3 > 0 ? 1 : 0), n / 3 + (n % 3 > 1 ? 1 : 0), n / 3};
}

TemporalGraph three_group_temporal(std::size_t n, double weight, double period, std::uint64_t seed) {
    const auto sizes = balanced_groups(n);
    require_positive_weight(weight);
    return TemporalGraph::periodic(period, [=](std::size_t piece) {
        CounterRng rng(seed ^ kGroupStream, piece);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
        return three_group_directed(sizes, weight, order);
    });
}

WeightedDigraph circulant_regular(std::size_t n, std::size_t k, double weight) {
    require_positive_weight(weight);
    if (n < 3 || k % 2 != 0 || k == 0 || k >= n) {
        throw Error(ErrorKind::InvalidSize, "circulant graph needs N >= 3 and even 0 < k < N");
    }
    WeightedDigraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t off = 1; off <= k / 2; ++off) g.set_undirected(i, (i + off) % n, weight);
    }
    return g;
}

WeightedDigraph overlapping_cliques(std::size_t n, std::size_t n_small, std::size_t n_big, double weight) {
    require_positive_weight(weight);
    if (n < 2 || n_small < n / 2 || n_small > n_big || n_big >= n) {
        throw Error(ErrorKind::PreconditionViolated, "need floor(N/2) <= N_m <= N_M < N");
    }
    const double nm1 = static_cast<double>(n - 1);
    if (2.0 / 3.0 * nm1 < static_cast<double>(n_small) || 2.0 * (nm1 - static_cast<double>(n_small)) < static_cast<double>(n_big)) {
        throw Error(ErrorKind::PreconditionViolated, "clique sizes violate (2/3)(N-1) >= N_m and 2(N-1-N_m) >= N_M");
    }
    const std::size_t first_end = n_big + 1;      // [0, first_end)
    const std::size_t second_begin = n - n_small - 1;  // [second_begin, n)
    auto in_first = [&](std::size_t v) { return v < first_end; };
    auto in_second = [&](std::size_t v) { return v >= second_begin; };

    WeightedDigraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool a = in_first(i) && in_first(j);
            const bool b = in_second(i) && in_second(j);
            if (a != b) g.set_undirected(i, j, weight);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t deg = g.out_neighbor_count(i);
        if (deg < n_small || deg > n_big) {
            throw Error(ErrorKind::PreconditionViolated, "vertex " + std::to_string(i) + " has degree " +
                                                             std::to_string(deg) + " outside [N_m, N_M]");
        }
    }
    return g;
}

WeightedDigraph perturb_weights(const WeightedDigraph& g, double gamma_m, double epsilon, std::uint64_t seed) {
    if (!(epsilon >= 0.0)) throw Error(ErrorKind::PreconditionViolated, "epsilon must be nonnegative");
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = g.weight(i, j);
            if (w != 0.0 && w != gamma_m) {
                throw Error(ErrorKind::PreconditionViolated, "input weights must all equal gamma_m");
            }
            if (g.has_edge(i, j) != g.has_edge(j, i)) {
                throw Error(ErrorKind::PreconditionViolated, "input graph must be symmetric");
            }
        }
    }
    WeightedDigraph out = g;
    CounterRng rng(seed ^ kPerturbStream, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!g.has_edge(i, j)) continue;
            const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            double lo = rng.uniform(0.0, epsilon);
            double hi = rng.uniform(0.0, epsilon);
            if (lo > hi) std::swap(lo, hi);
            // Same sign for both and d1 <= d2 keeps the symmetric mean >= gamma_m.
            const double d1 = sign > 0.0 ? lo : -hi;
            const double d2 = sign > 0.0 ? hi : -lo;
            out.set_weight(i, j, gamma_m - d1);
            out.set_weight(j, i, gamma_m + d2);
        }
    }
    return out;
}

double assumption_b_margin_at(std::size_t n_vertices, std::size_t n_min, std::size_t n_max, double n_ratio,
                              std::size_t s) {
    const double nn = static_cast<double>(n_vertices);
    const double lo = static_cast<double>(n_min);
    const double hi = static_cast<double>(n_max);
    const double x = static_cast<double>(s);
    const double gain = (n_ratio - 2.0) / (x * (n_ratio - 1.0)) * (lo - x + 1.0);
    const double loss = 2.0 / ((n_ratio + 1.0) * (n_ratio + 1.0)) * (3.0 * x * x - (hi + 2.0 * lo + 1.0) * x + nn * hi);
    return gain - loss;
}

MarginResult assumption_b_margin(std::size_t n_vertices, std::size_t n_min, std::size_t n_max, double n_ratio) {
    if (!(n_ratio > 2.0)) throw Error(ErrorKind::PreconditionViolated, "ratio n must exceed 2");
    if (n_min < 1 || n_min > n_max || n_max >= n_vertices) {
        throw Error(ErrorKind::PreconditionViolated, "need 1 <= N_m <= N_M < N");
    }
    MarginResult best{std::numeric_limits<double>::infinity(), 1};
    for (std::size_t s = 1; s <= std::max<std::size_t>(1, n_vertices / 2); ++s) {
        const double f = assumption_b_margin_at(n_vertices, n_min, n_max, n_ratio, s);
        if (f < best.delta) best = {f, s};
    }
    return best;
}

double corollary3_ratio(double a_m, std::size_t n_min, std::size_t n_max) {
    const double lo = static_cast<double>(n_min) + 1.0;
    const double denom = static_cast<double>(n_max) + 1.0 - a_m * lo;
    if (!(denom > 0.0)) throw Error(ErrorKind::DivisionDegenerate, "N_M + 1 - a_m (N_m + 1) must be positive");
    return 2.0 * a_m * lo / denom;
}

}  // namespace tgflock
