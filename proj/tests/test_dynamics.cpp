#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "tgflock/analysis.hpp"
#include "tgflock/dynamics.hpp"
#include "tgflock/error.hpp"
#include "tgflock/generators.hpp"

using namespace tgflock;

namespace {

ParticleEnsemble pair_state(std::vector<double> x1, std::vector<double> x2, std::vector<double> v1,
                            std::vector<double> v2) {
    return {DenseMatrix::from_rows({x1, x2}), DenseMatrix::from_rows({v1, v2})};
}

double max_abs(const DenseMatrix& m) {
    double out = 0.0;
    for (double v : m.data()) out = std::max(out, std::abs(v));
    return out;
}

}  // namespace

TEST_CASE("similarity") {
    const std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0}, m1{-1.0, 0.0}, zero{0.0, 0.0};
    CHECK(similarity(e1, e1) == 1.0);
    CHECK(similarity(e1, e2) == 0.0);
    CHECK(similarity(e1, m1) == -1.0);
    const std::vector<double> big{1e8, 1e8 * (1 + 1e-16)};
    CHECK(similarity(big, big) <= 1.0);
    CHECK_THROWS_AS((void)similarity(e1, zero), Error);
}

TEST_CASE("neighborhood") {
    const auto origin = neighborhood(DenseMatrix(4, 2), 0.5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(origin.count[i] == 4);

    const auto exact = neighborhood(DenseMatrix{{0.0, 0.0}, {0.3, 0.4}}, 0.5);
    CHECK_FALSE(exact.connected(0, 1));
    CHECK(exact.connected(0, 0));

    const double d = 1.0;
    const auto line = neighborhood(DenseMatrix{{0.0}, {0.6 * d}, {1.2 * d}}, d);
    CHECK(line.count == std::vector<std::size_t>{2, 3, 2});
}

TEST_CASE("adaptive right-hand side") {
    ModelParams p{ModelKind::AdaptiveCS, 1.0, 2.0, 1.0};
    const auto aligned = pair_state({0, 0}, {0.1, 0}, {1, 0}, {1, 0});
    const CouplingMatrix k{{1.0, 0.3}, {-0.4, 1.0}};
    const auto d0 = rhs_adaptive_cs(aligned, k, p);
    CHECK(max_abs(d0.dv) == 0.0);
    CHECK(d0.dkappa(0, 1) == doctest::Approx(2.0 * (1 - 0.3)));
    CHECK(d0.dkappa(1, 0) == doctest::Approx(2.0 * (1 + 0.4)));

    const auto far = pair_state({0, 0}, {5, 0}, {1, 0}, {0, 1});
    const auto d1 = rhs_adaptive_cs(far, k, p);
    CHECK(max_abs(d1.dv) == 0.0);
    CHECK(d1.dkappa(0, 1) == doctest::Approx(2.0 * (0 - 0.3)));
    CHECK(d1.dx(0, 0) == 1.0);

    p.epsilon = 1.0;
    const auto near = pair_state({0, 0}, {0.2, 0}, {1, 0}, {0, 1});
    const auto d2 = rhs_adaptive_cs(near, CouplingMatrix{{1.0, 0.5}, {0.5, 1.0}}, p);
    CHECK(d2.dv(0, 0) == doctest::Approx(-0.25));
    CHECK(d2.dv(0, 1) == doctest::Approx(0.25));
    CHECK(d2.dkappa(0, 1) == doctest::Approx(-0.5));
    CHECK(d2.dkappa(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("singular right-hand side") {
    const ModelParams p{ModelKind::SingularCS, 1.0, 1.0, 1.0};
    CHECK(max_abs(rhs_singular_cs(pair_state({0, 0}, {0.2, 0}, {1, 0}, {1, 0}), p).dv) == 0.0);
    CHECK(max_abs(rhs_singular_cs(pair_state({0, 0}, {0.2, 0}, {1, 0}, {0, 1}), p).dv) == 0.0);

    const double th = std::numbers::pi / 3;
    const auto d = rhs_singular_cs(pair_state({0, 0}, {0.2, 0}, {1, 0}, {std::cos(th), std::sin(th)}), p);
    CHECK(d.dv(0, 0) == doctest::Approx(0.25 * (std::cos(th) - 1)));
    CHECK(d.dv(0, 1) == doctest::Approx(0.25 * std::sin(th)));
    CHECK(d.dv(1, 0) == doctest::Approx(-d.dv(0, 0)));

    CHECK_THROWS_AS((void)rhs_singular_cs(pair_state({0, 0}, {0.2, 0}, {1, 0}, {0, 0}), p), Error);
}

TEST_CASE("classical right-hand side") {
    ModelParams p{ModelKind::ClassicalCS, 1.0, 1.0, 2.0};
    CHECK(max_abs(rhs_classical_cs(pair_state({0, 0}, {1, 0}, {1, 1}, {1, 1}), p).dv) == 0.0);

    const auto coincident = rhs_classical_cs(pair_state({0, 0}, {0, 0}, {1, 0}, {-1, 0}), p);
    CHECK(coincident.dv(0, 0) == doctest::Approx(-1.0));
    CHECK(coincident.dv(0, 1) == doctest::Approx(0.0));

    const auto unit = rhs_classical_cs(pair_state({0, 0}, {1, 0}, {1, 0}, {0, 1}), p);
    const double c = 1.0 / (2.0 * std::sqrt(2.0));
    CHECK(unit.dv(0, 0) == doctest::Approx(-c));
    CHECK(unit.dv(0, 1) == doctest::Approx(c));
}

TEST_CASE("laplacian right-hand side") {
    WeightedDigraph k2(2);
    k2.set_undirected(0, 1, 1.5);
    const auto dx = rhs_laplacian(DenseMatrix{{1.0}, {-1.0}}, k2);
    CHECK(dx(0, 0) == -3.0);
    CHECK(dx(1, 0) == 3.0);
    CHECK(max_abs(rhs_laplacian(DenseMatrix{{2.0}, {2.0}}, k2)) == 0.0);
}

TEST_CASE("rk4 one-step factor") {
    WeightedDigraph k2(2);
    k2.set_undirected(0, 1, 0.5);
    // Difference x0 - x1 obeys y' = -y for this graph.
    const double dt = 0.1;
    IntegrationOptions opt;
    opt.horizon = dt;
    opt.dt = dt;
    const auto traj = integrate_laplacian(TemporalGraph::constant(k2), DenseMatrix{{1.0}, {0.0}}, opt);
    const double y = traj.positions.back()(0, 0) - traj.positions.back()(1, 0);
    const double factor = 1 - dt + dt * dt / 2 - dt * dt * dt / 6 + dt * dt * dt * dt / 24;
    CHECK(y == doctest::Approx(factor).epsilon(1e-14));
}

TEST_CASE("rk4 is fourth order on a complete graph") {
    WeightedDigraph k3(3);
    k3.set_undirected(0, 1, 1.0);
    k3.set_undirected(0, 2, 1.0);
    k3.set_undirected(1, 2, 1.0);
    const DenseMatrix x0{{1.0}, {-0.5}, {2.0}};
    Eigen::VectorXd e0(3);
    e0 << 1.0, -0.5, 2.0;
    const auto exact = oracle::heat_flow(oracle::laplacian(k3), e0, 1.0);
    auto err = [&](double dt) {
        IntegrationOptions opt;
        opt.horizon = 1.0;
        opt.dt = dt;
        opt.sample_every = 1000000;
        const auto traj = integrate_laplacian(TemporalGraph::constant(k3), x0, opt);
        double e = 0.0;
        for (std::size_t i = 0; i < 3; ++i) e = std::max(e, std::abs(traj.positions.back()(i, 0) - exact(i)));
        return e;
    };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("sampling and final time") {
    IntegrationOptions opt;
    opt.horizon = 0.105;
    opt.dt = 0.01;
    opt.sample_every = 5;
    const auto traj =
        integrate_laplacian(TemporalGraph::constant(one_leader(3, 1.0)), DenseMatrix{{1.0}, {1.0}, {1.0}}, opt);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(0.105).epsilon(1e-14));
    CHECK(traj.times[1] == doctest::Approx(0.05));
    for (const auto& x : traj.positions) CHECK(x == traj.positions.front());
    CHECK(traj.velocities.empty());
}

TEST_CASE("laplacian mean conservation on symmetric graphs") {
    CounterRng rng(41, 0);
    const auto g = oracle::random_symmetric(12, 0.5, 0.2, 1.0, rng);
    DenseMatrix x0(12, 2);
    for (double& v : x0.data()) v = rng.uniform(-5.0, 5.0);
    IntegrationOptions opt;
    opt.horizon = 10.0;
    opt.dt = 1e-3;
    opt.sample_every = 500;
    const auto traj = integrate_laplacian(TemporalGraph::constant(g), x0, opt);
    for (std::size_t c = 0; c < 2; ++c) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < 12; ++i) {
            m0 += x0(i, c);
            m1 += traj.positions.back()(i, c);
        }
        CHECK(std::abs(m0 - m1) / 12.0 <= 1e-8);
    }
}

TEST_CASE("adaptive couplings stay bounded") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CounterRng rng(seed, 0);
        const std::size_t n = 8;
        ParticleEnsemble s{DenseMatrix(n, 2), DenseMatrix(n, 2)};
        for (double& v : s.positions.data()) v = rng.uniform(0.0, 1.0);
        for (double& v : s.velocities.data()) v = rng.uniform(-1.0, 1.0);
        CouplingMatrix k(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            k(i, i) = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) k(i, j) = k(j, i) = rng.uniform(-1.0, 1.0);
        }
        double lo = 1.0, hi = -1.0;
        IntegrationOptions opt;
        opt.horizon = 20.0;
        opt.dt = 1e-2;
        opt.sample_every = 100;
        opt.observer = [&](double, std::span<const double> y, const StateLayout& layout) {
            for (std::size_t q = layout.coupling_offset(); q < layout.total(); ++q) {
                lo = std::min(lo, y[q]);
                hi = std::max(hi, y[q]);
            }
        };
        (void)integrate({ModelKind::AdaptiveCS, 1.0, 1.0, 0.5}, s, k, opt);
        CHECK(lo >= -1.0 - 1e-9);
        CHECK(hi <= 1.0 + 1e-9);
    }
    const ParticleEnsemble s{DenseMatrix(2, 2), DenseMatrix{{1.0, 0.0}, {0.0, 1.0}}};
    IntegrationOptions opt;
    CHECK_THROWS_AS((void)integrate({ModelKind::AdaptiveCS, 1.0, 1.0, 1.0}, s, std::nullopt, opt), Error);
}

TEST_CASE("singular model keeps the similarity floor and shrinks velocities") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CounterRng rng(seed, 1);
        const std::size_t n = 10;
        ParticleEnsemble s{DenseMatrix(n, 2), DenseMatrix(n, 2)};
        for (double& v : s.positions.data()) v = rng.uniform(0.0, 0.2);
        for (std::size_t i = 0; i < n; ++i) {
            const double th = rng.uniform(-0.6, 0.6);
            const double r = rng.uniform(0.5, 1.5);
            s.velocities(i, 0) = r * std::cos(th);
            s.velocities(i, 1) = r * std::sin(th);
        }
        auto min_sim = [&](std::span<const double> v) {
            double m = 1.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) m = std::min(m, similarity(v.subspan(2 * i, 2), v.subspan(2 * j, 2)));
            return m;
        };
        const double a_m = min_sim(s.velocities.data());
        REQUIRE(a_m > 0.0);
        double floor = 1.0, prev_max = 1e300;
        bool monotone = true;
        IntegrationOptions opt;
        opt.horizon = 5.0;
        opt.dt = 1e-3;
        opt.sample_every = 1000;
        opt.observer = [&](double, std::span<const double> y, const StateLayout& layout) {
            const auto v = y.subspan(layout.velocity_offset(), n * 2);
            floor = std::min(floor, min_sim(v));
            double vmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, std::hypot(v[2 * i], v[2 * i + 1]));
            if (vmax > prev_max + 1e-9) monotone = false;
            prev_max = vmax;
        };
        (void)integrate({ModelKind::SingularCS, 1.0, 1.0, 100.0}, s, std::nullopt, opt);
        CHECK(floor >= a_m - 1e-6);
        CHECK(monotone);
    }
}

TEST_CASE("degenerate velocity carries the time") {
    const ParticleEnsemble s{DenseMatrix(2, 2), DenseMatrix{{1.0, 0.0}, {0.0, 0.0}}};
    IntegrationOptions opt;
    try {
        (void)integrate({ModelKind::SingularCS, 1.0, 1.0, 1.0}, s, std::nullopt, opt);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateVelocity);
        REQUIRE(e.time().has_value());
        CHECK(*e.time() == 0.0);
    }
}

TEST_CASE("overflow is reported") {
    WeightedDigraph g(2);
    g.set_undirected(0, 1, -1e3);
    IntegrationOptions opt;
    opt.horizon = 10.0;
    opt.dt = 0.01;
    try {
        (void)integrate_laplacian(TemporalGraph::constant(g), DenseMatrix{{1.0}, {0.0}}, opt);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFinite);
    }
}

TEST_CASE("temporal graph pieces switch inside a step") {
    WeightedDigraph a(2), b(2);
    a.set_undirected(0, 1, 1.0);
    const auto sched = TemporalGraph::from_schedule({{0.0, a}, {0.5, b}});
    CHECK(sched.piece_index(0.49) == 0);
    CHECK(sched.piece_index(0.5) == 1);
    CHECK(sched.piece_count(1.0) == 2);
    IntegrationOptions opt;
    opt.horizon = 1.0;
    opt.dt = 1e-3;
    const auto traj = integrate_laplacian(sched, DenseMatrix{{1.0}, {0.0}}, opt);
    const double gap = traj.positions.back()(0, 0) - traj.positions.back()(1, 0);
    CHECK(gap == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK_THROWS_AS((void)TemporalGraph::from_schedule({{0.1, a}}), Error);
    CHECK_THROWS_AS((void)TemporalGraph::from_schedule({{0.0, a}, {0.0, b}}), Error);
}

TEST_CASE("trajectory csv layout") {
    const ParticleEnsemble s{DenseMatrix{{0.0, 0.0}, {0.1, 0.0}}, DenseMatrix{{1.0, 0.0}, {0.0, 1.0}}};
    IntegrationOptions opt;
    opt.horizon = 0.01;
    opt.dt = 0.01;
    opt.record_coupling = true;
    const auto traj = integrate({ModelKind::AdaptiveCS, 1.0, 1.0, 1.0}, s, CouplingMatrix{{1, 0}, {0, 1}}, opt);
    std::ostringstream out;
    traj.write_csv(out);
    const std::string text = out.str();
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header ==
          "t,x_0_0,x_0_1,x_1_0,x_1_1,v_0_0,v_0_1,v_1_0,v_1_1,kappa_0_0,kappa_0_1,kappa_1_0,kappa_1_1");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
