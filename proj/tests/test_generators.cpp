#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tgflock/analysis.hpp"
#include "tgflock/error.hpp"
#include "tgflock/generators.hpp"

using namespace tgflock;

TEST_CASE("leader graphs") {
    const auto star = one_leader(5, 1.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            const bool edge = i != j && (i == 0 || j == 0);
            CHECK(star.weight(i, j) == (edge ? 1.0 : 0.0));
        }

    const auto two = two_leaders(5, 1.0);
    CHECK(two.weight(0, 4) == 0.0);
    CHECK(two.weight(4, 0) == 0.0);
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(two.weight(0, k) == 1.0);
        CHECK(two.weight(k, 4) == 1.0);
        for (std::size_t m = 1; m < 4; ++m) CHECK(two.weight(k, m) == 0.0);
    }

    const auto k2 = one_leader(2, 2.0);
    CHECK(k2.weight(0, 1) == 2.0);
    CHECK(k2.weight(1, 0) == 2.0);
    CHECK_THROWS_AS((void)one_leader(0, 1.0), Error);
}

TEST_CASE("leader schedules") {
    const double p = 0.25;
    const auto fixed = leader_temporal(6, 1.0, {LeaderMode::FixedOne, p, 3}, 3 * p);
    CHECK(fixed.expand(3 * p).size() == 1);

    const auto sw = leader_temporal(6, 1.0, {LeaderMode::SwitchingOne, p, 3}, 3 * p);
    const auto pieces = sw.expand(3 * p);
    REQUIRE(pieces.size() == 3);
    CHECK(pieces[0].first == 0.0);
    CHECK(pieces[1].first == doctest::Approx(p));
    CHECK(pieces[2].first == doctest::Approx(2 * p));
    for (const auto& [t, g] : pieces) CHECK(is_neighbor_connected(g).holds);

    const auto mixed = leader_temporal(8, 1.0, {LeaderMode::MixedOneTwo, p, 9}, 40 * p);
    const auto mp = mixed.expand(40 * p);
    int one = 0, two = 0;
    for (const auto& [t, g] : mp) {
        std::size_t hubs = 0;
        for (std::size_t i = 0; i < 8; ++i) hubs += g.out_neighbor_count(i) >= 6 ? 1 : 0;
        if (hubs == 1) ++one;
        if (hubs == 2) ++two;
    }
    CHECK(one == 20);
    CHECK(two == 20);

    // Same seed, same schedule; the leader actually moves between pieces.
    const auto again = leader_temporal(8, 1.0, {LeaderMode::SwitchingOne, p, 4}, 40 * p).expand(40 * p);
    const auto first = leader_temporal(8, 1.0, {LeaderMode::SwitchingOne, p, 4}, 40 * p).expand(40 * p);
    CHECK(again == first);
    std::set<std::size_t> leaders;
    for (const auto& [t, g] : first)
        for (std::size_t i = 0; i < 8; ++i)
            if (g.out_neighbor_count(i) == 7) leaders.insert(i);
    CHECK(leaders.size() > 1);

    CHECK(leader_mode_from_string(to_string(LeaderMode::SwitchingTwo)) == LeaderMode::SwitchingTwo);
    CHECK_THROWS_AS((void)leader_mode_from_string("bogus"), Error);
}

TEST_CASE("three-group graph structure") {
    const auto tiny = three_group_directed({1, 1, 1}, 1.0);
    CHECK(tiny.weight(0, 1) == 1.0);
    CHECK(tiny.weight(1, 2) == 1.0);
    CHECK(tiny.weight(2, 0) == 1.0);
    CHECK(tiny.weight(1, 0) == 0.0);
    CHECK(tiny.weight(2, 1) == 0.0);
    CHECK(tiny.weight(0, 2) == 0.0);

    const std::array<std::size_t, 3> sizes{5, 3, 2};
    const auto g = three_group_directed(sizes, 1.0);
    auto group = [](std::size_t v) { return v < 5 ? 0 : (v < 8 ? 1 : 2); };
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) {
            if (i == j) continue;
            const int gi = group(i), gj = group(j);
            const bool edge = gi == gj || gj == (gi + 1) % 3;
            CHECK(g.has_edge(i, j) == edge);
        }

    CounterRng rng(3, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::array<std::size_t, 3> s{1 + rng.below(6), 1 + rng.below(6), 1 + rng.below(6)};
        CHECK(is_strongly_connected(three_group_directed(s, 0.5)).holds);
        // Row dominance still reaches twice the weight floor.
        const auto tg = three_group_directed(s, 0.5);
        CHECK(row_dominance_margin(e_matrix(tg), tg) >= 2 * 0.5 - 1e-9);
    }

    CHECK(balanced_groups(60) == std::array<std::size_t, 3>{20, 20, 20});
    const auto bg = balanced_groups(10);
    CHECK(bg[0] + bg[1] + bg[2] == 10);
    CHECK(*std::max_element(bg.begin(), bg.end()) - *std::min_element(bg.begin(), bg.end()) <= 1);

    const auto tt = three_group_temporal(12, 1.0, 0.1, 7);
    const auto pieces = tt.expand(0.5);
    CHECK(pieces.size() == 5);
    CHECK(pieces[0].second != pieces[1].second);
    for (const auto& [t, piece] : pieces) CHECK(is_strongly_connected(piece).holds);
}

TEST_CASE("circulant graphs") {
    const auto c4 = circulant_regular(4, 2, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(c4.weight(i, (i + 1) % 4) == 1.0);
        CHECK(c4.weight(i, (i + 3) % 4) == 1.0);
        CHECK(c4.weight(i, (i + 2) % 4) == 0.0);
    }
    for (std::size_t k : {30u, 38u}) {
        const auto g = circulant_regular(60, k, 1.0);
        CHECK(g.is_symmetric());
        for (std::size_t i = 0; i < 60; ++i) CHECK(g.out_neighbor_count(i) == k);
    }
    CHECK_THROWS_AS((void)circulant_regular(10, 3, 1.0), Error);
    CHECK_THROWS_AS((void)circulant_regular(10, 10, 1.0), Error);
}

TEST_CASE("overlapping cliques") {
    for (auto [nm, nM] : {std::pair<std::size_t, std::size_t>{30, 45}, {30, 58}}) {
        const auto g = overlapping_cliques(60, nm, nM, 1.0);
        CHECK(g.is_symmetric());
        std::size_t lo = 60, hi = 0;
        for (std::size_t i = 0; i < 60; ++i) {
            lo = std::min(lo, g.out_neighbor_count(i));
            hi = std::max(hi, g.out_neighbor_count(i));
        }
        CHECK(lo >= nm);
        CHECK(hi <= nM);
        const auto cert = check_assumption_b(g, 1.0, 0.0, 3.0);
        CHECK(cert.holds);
    }
    CHECK_THROWS_AS((void)overlapping_cliques(60, 59, 59, 1.0), Error);
}

TEST_CASE("weight perturbation") {
    const auto base = circulant_regular(20, 10, 1.0);
    CHECK(perturb_weights(base, 1.0, 0.0, 5) == base);

    const double eps = 0.05;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = perturb_weights(base, 1.0, eps, seed);
        CHECK(g.has_symmetric_edge_set());
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = i + 1; j < 20; ++j) {
                if (!g.has_edge(i, j)) continue;
                const double mean = 0.5 * (g.weight(i, j) + g.weight(j, i));
                const double skew = 0.5 * (g.weight(j, i) - g.weight(i, j));
                CHECK(mean >= 1.0 - 1e-12);
                CHECK(std::abs(skew) <= eps + 1e-12);
            }
        CHECK(check_assumption_b(g, 1.0, eps, 1.0 / eps).holds);
    }
    CHECK(perturb_weights(base, 1.0, eps, 1) == perturb_weights(base, 1.0, eps, 1));
    CHECK(perturb_weights(base, 1.0, eps, 1) != perturb_weights(base, 1.0, eps, 2));
}

TEST_CASE("assumption-B margin table") {
    struct Row {
        std::size_t nm, nM;
        double n, expected;
    };
    // Reported margins (argmin at s = 30 for the first three rows).
    const Row rows[] = {{30, 30, 326, 1.2469e-4}, {30, 45, 365, 9.6546e-5}, {30, 58, 396, 1.2901e-4},
                        {38, 38, 101, 0.0029}};
    for (const auto& r : rows) {
        const auto m = assumption_b_margin(60, r.nm, r.nM, r.n);
        CHECK(std::abs(m.delta - r.expected) <= 0.01 * r.expected);
        double brute = assumption_b_margin_at(60, r.nm, r.nM, r.n, 1);
        for (std::size_t s = 2; s <= 30; ++s)
            brute = std::min(brute, assumption_b_margin_at(60, r.nm, r.nM, r.n, s));
        CHECK(m.delta == doctest::Approx(brute).epsilon(1e-14));
        CHECK(m.argmin_s >= 1);
        CHECK(m.argmin_s <= 30);
    }
    // Independent evaluation of the margin function at one point.
    const double n = 326.0, s = 30.0, N = 60.0, nm = 30.0, nM = 30.0;
    const double direct = (n - 2) / (s * (n - 1)) * (nm - s + 1) -
                          2.0 / ((n + 1) * (n + 1)) * (3 * s * s - (nM + 2 * nm + 1) * s + N * nM);
    CHECK(assumption_b_margin_at(60, 30, 30, 326, 30) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("corollary ratio") {
    CHECK(corollary3_ratio(0.8, 10, 10) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(corollary3_ratio(0.5, 7, 7) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(corollary3_ratio(0.9, 38, 38) == doctest::Approx(2 * 0.9 * 39 / (39 - 0.9 * 39)).epsilon(1e-12));
    CHECK(corollary3_ratio(0.9, 38, 38) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)corollary3_ratio(1.0, 10, 10), Error);
}
