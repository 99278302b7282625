#include <cmath>
#include <limits>

#include "doctest.h"
#include "landau/errors.hpp"
#include "landau/remainder_solver.hpp"

using namespace landau;

namespace {

struct Bench {
    CollisionOperator op{MomentumGrid(6.0, 8)};
    LinearizedOperator L{op};
    SpatialGrid sg{8, 2.0 * M_PI};
    EulerSolver eu{sg, std::make_shared<LatticeClosure>(op.grid())};
    HilbertData flat, wave;
    Bench() {
        HilbertBuilder hb(L, eu);
        flat = hb.build(wave_state(sg, 0.0), 0.05, 9);
        wave = hb.build(wave_state(sg, 1e-3), 0.05, 9);
    }
};

const Bench& bench() {
    static const Bench b;
    return b;
}

RemainderOptions only(bool transport, bool collisions) {
    RemainderOptions o;
    o.t_final = 0.2;
    o.transport = transport;
    o.collisions = collisions;
    o.reaction = o.gamma = o.source = false;
    return o;
}

double wnorm(const DistField& f, const MomentumGrid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.cells(); ++i)
        for (std::size_t a = 0; a < f.np(); ++a) s += g.weight(a) * f(i, a) * f(i, a);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("time step resolution") {
    auto a = resolve_time_step(2.0 * M_PI / 8, 0.0, 0.5);
    CHECK(a.steps == 5);
    CHECK(a.dt == doctest::Approx(0.1));
    a = resolve_time_step(0.2, 0.0, 0.5);
    CHECK(a.steps == 7);
    CHECK(a.dt == doctest::Approx(0.5 / 7));
    a = resolve_time_step(0.2, 0.05, 0.5);
    CHECK(a.steps == 10);
    CHECK_THROWS_AS(resolve_time_step(0.2, 0.1, 0.35), ConfigError);
    CHECK_THROWS_AS(resolve_time_step(0.2, 0.0, 0.0), ConfigError);
}

TEST_CASE("log-log slope") {
    CHECK(loglog_slope({0.1, 0.05, 0.025}, {3 * std::pow(0.1, 1.5), 3 * std::pow(0.05, 1.5), 3 * std::pow(0.025, 1.5)}) ==
          doctest::Approx(1.5));
    CHECK(std::isnan(loglog_slope({0.1, 0.05}, {0.0, 1.0})));
    CHECK_THROWS_AS(loglog_slope({0.1}, {1.0}), std::invalid_argument);
}

TEST_CASE("solver setup guards") {
    const auto& b = bench();
    RemainderOptions o;
    o.t_final = 0.2;
    o.dt = 0.07;
    CHECK_THROWS_AS(RemainderSolver(b.L, b.flat, o), ConfigError);
    o.dt = 0.05;
    o.t_final = 1.0;
    CHECK_THROWS_AS(RemainderSolver(b.L, b.flat, o), PrerequisiteMissing);
    o.t_final = 0.2;
    o.imex_order = 2;
    CHECK_THROWS_AS(RemainderSolver(b.L, b.flat, o), ConfigError);  // needs levels at dt/2
    o.dt = 0.1;
    CHECK_NOTHROW(RemainderSolver(b.L, b.flat, o));
}

TEST_CASE("zero is a fixed point on a constant backbone") {
    const auto& b = bench();
    for (int order : {1, 2}) {
        RemainderOptions o;
        o.t_final = 0.2;
        o.imex_order = order;
        const RemainderSolver s(b.L, b.flat, o);
        // the flat backbone carries round-off corrections, so "zero" means far below sqrt(M)
        DistField sq(b.op.grid().size(), 8);
        for (std::size_t q = 0; q < sq.data().size(); ++q) sq.data()[q] = std::sqrt(b.flat.levels[0].F[0].data()[q]);
        const double floor = 1e-14 * wnorm(sq, b.op.grid());
        auto f = s.initial_field();
        CHECK(wnorm(f.f, b.op.grid()) <= floor);
        for (int k = 0; k < s.steps(); ++k) s.step(f);
        CHECK(wnorm(f.f, b.op.grid()) <= floor);
        CHECK(f.t == doctest::Approx(0.2));
        CHECK(s.h2_distance(f) <= floor);
    }
}

TEST_CASE("collisions alone relax toward the null space") {
    const auto& b = bench();
    auto o = only(false, true);
    o.epsilon = 0.05;
    const RemainderSolver s(b.L, b.flat, o);
    auto f = s.zero_field();
    const auto& g = b.op.grid();
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) {
            const double sq = std::sqrt(b.flat.levels[0].F[0](i, a));
            f.f(i, a) = sq * (0.3 * std::sin(g.p(a)[0]) + std::cos(0.7 * i) * g.p(a)[1] * g.p(a)[2] / g.p0(a) + 0.2);
        }
    auto split = [&](const RemainderField& r, const std::vector<std::shared_ptr<const CellContext>>& ctx) {
        DistField m = r.f;
        std::vector<Abc> abc;
        for (int i = 0; i < 8; ++i) {
            abc.push_back(b.L.project_P(std::span<const double>(r.f.cell(i), g.size()), *ctx[i]));
            b.L.remove_macro(m.cell(i), *ctx[i]);
        }
        return std::make_pair(m, abc);
    };
    const auto ctx = s.contexts(0);
    auto [m0, abc0] = split(f, ctx);
    double prev = wnorm(m0, g);
    for (int k = 0; k < s.steps(); ++k) {
        s.step(f);
        auto [m, abc] = split(f, ctx);
        const double now = wnorm(m, g);
        CHECK(now <= prev * (1.0 + 1e-12));
        CHECK(now < prev);
        prev = now;
        for (int i = 0; i < 8; ++i) CHECK((abc[i].vec() - abc0[i].vec()).norm() <= 1e-6 * (1.0 + abc0[i].vec().norm()));
    }
}

TEST_CASE("upwind transport alone preserves sign and mass") {
    const auto& b = bench();
    auto o = only(true, false);
    o.transport_scheme = TransportScheme::Upwind;
    const RemainderSolver s(b.L, b.flat, o);
    auto f = s.zero_field();
    const auto& g = b.op.grid();
    double m0 = 0.0;
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) {
            f.f(i, a) = (i == 3 ? 1.0 : 0.0) * std::sqrt(b.flat.levels[0].F[0](i, a));
            m0 += g.weight(a) * f.f(i, a);
        }
    for (int k = 0; k < s.steps(); ++k) s.step(f);
    double m1 = 0.0, lo = 0.0;
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) {
            m1 += g.weight(a) * f.f(i, a);
            lo = std::min(lo, f.f(i, a));
        }
    CHECK(lo >= 0.0);
    CHECK(m1 == doctest::Approx(m0).epsilon(1e-13));
}

TEST_CASE("spectral transport shifts Fourier modes exactly") {
    const auto& b = bench();
    const RemainderSolver s(b.L, b.flat, only(true, false));
    auto f = s.zero_field();
    const auto& g = b.op.grid();
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) f.f(i, a) = std::sin(2.0 * s.space().x(i)) * std::exp(-g.p0(a));
    for (int k = 0; k < s.steps(); ++k) s.step(f);
    double err = 0.0;
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a)
            err = std::max(err, std::abs(f.f(i, a) - std::sin(2.0 * (s.space().x(i) - g.phat(a)[0] * f.t)) * std::exp(-g.p0(a))));
    CHECK(err <= 1e-12);
}

TEST_CASE("energy is quadratic and dissipation terms are nonnegative") {
    const auto& b = bench();
    RemainderOptions o;
    o.t_final = 0.2;
    const RemainderSolver s(b.L, b.wave, o);
    auto f = s.zero_field();
    const auto& g = b.op.grid();
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a)
            f.f(i, a) = std::sqrt(b.wave.levels[0].F[0](i, a)) * (std::sin(s.space().x(i)) + 0.1 * g.p(a)[0] * g.p(a)[1]);
    const auto e1 = s.energy(f);
    auto f2 = f;
    for (auto& x : f2.f.data()) x *= 2.5;
    const auto e2 = s.energy(f2);
    CHECK(e2.E == doctest::Approx(6.25 * e1.E).epsilon(1e-12));
    CHECK(e2.D == doctest::Approx(6.25 * e1.D).epsilon(1e-12));
    for (const auto& [name, v] : e1.terms)
        if (name.rfind("D:", 0) == 0) CHECK(v >= 0.0);
    CHECK_FALSE(e1.terms.empty());
}

TEST_CASE("H2 distance is linear in the remainder on a constant backbone") {
    const auto& b = bench();
    RemainderOptions o;
    o.t_final = 0.2;
    o.epsilon = 0.1;
    const RemainderSolver s(b.L, b.flat, o);
    auto f = s.zero_field();
    const auto& g = b.op.grid();
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) f.f(i, a) = std::cos(s.space().x(i)) * std::exp(-g.p0(a));
    const double d1 = s.h2_distance(f);
    for (auto& x : f.f.data()) x *= 3.0;
    CHECK(s.h2_distance(f) == doctest::Approx(3.0 * d1).epsilon(1e-12));
    CHECK(d1 > 0.0);
}

TEST_CASE("constructed initial data keeps F nonnegative at t = 0") {
    const auto& b = bench();
    for (double tau : {0.5, 0.9}) {
        RemainderOptions o;
        o.t_final = 0.2;
        o.tau_init = tau;
        o.epsilon = 0.1;
        const RemainderSolver s(b.L, b.wave, o);
        const auto f = s.initial_field();
        CHECK(wnorm(f.f, b.op.grid()) > 0.0);
        const auto pos = s.positivity(f);
        CHECK(pos.min_F >= 0.0);
        CHECK(pos.peak_M > 0.0);
    }
}

TEST_CASE("manufactured macroscopic field satisfies the micro-macro balance") {
    // f = M^{1/2}(a + b.p + p0 c) with (a,b,c) depending on x and t, hbar = (d_t + p^ d_x) f discretely:
    // then every projected equation holds up to round-off
    const auto& b = bench();
    RemainderOptions o;
    o.t_final = 0.2;
    o.epsilon = 0.1;
    const RemainderSolver s(b.L, b.flat, o);
    const auto& g = b.op.grid();
    const std::size_t np = g.size();
    const double h = s.space().h();
    auto cur = s.zero_field();
    auto next = cur;
    next.level = s.stride();
    next.t = b.flat.levels[next.level].t;
    const auto c0 = s.contexts(0), c1 = s.contexts(next.level);
    auto abc_at = [&](int i, double growth) {
        const double x = s.space().x(i);
        return Abc{0.1 * std::sin(x) * growth, {0.05 * std::cos(x) * growth, -0.02 * std::sin(2 * x), 0.01}, 0.02 * std::sin(2 * x) * growth};
    };
    for (int i = 0; i < 8; ++i) {
        const auto u = b.L.reconstruct(abc_at(i, 1.0), *c0[i]);
        const auto v = b.L.reconstruct(abc_at(i, 1.1), *c1[i]);
        for (std::size_t a = 0; a < np; ++a) {
            cur.f(i, a) = u[a];
            next.f(i, a) = v[a];
        }
    }
    const double dt = next.t - cur.t;
    const auto dfx = dx_field(cur.f, h);
    DistField hbar(np, 8);
    for (int i = 0; i < 8; ++i)
        for (std::size_t a = 0; a < np; ++a) hbar(i, a) = (next.f(i, a) - cur.f(i, a)) / dt + g.phat(a)[0] * dfx(i, a);
    const auto r = s.macro_diagnostics(cur, next, hbar);
    for (const auto& [name, v] : r.macabc) CHECK(v <= 1e-8 * r.macabc_scale);
    for (double c : r.conservation) CHECK(c <= 1e-8 * r.conservation_scale);
    CHECK(r.macabc_scale > 0.0);
}

TEST_CASE("sweep on a constant backbone is degenerate") {
    const auto& b = bench();
    SweepOptions so;
    so.base.t_final = 0.2;
    so.base.dt = 0.1;
    const auto res = knudsen_sweep(b.L, b.flat, so);
    CHECK_FALSE(res.failed);
    CHECK(res.degenerate);
    CHECK(std::isnan(res.slope));
    REQUIRE(res.runs.size() == 3);
    REQUIRE(res.halved.size() == 3);
    for (const auto& r : res.runs) CHECK(r.sup_h2 == 0.0);
    so.epsilons = {0.1, 0.1, 0.05};
    CHECK_THROWS_AS(knudsen_sweep(b.L, b.flat, so), ConfigError);
}

TEST_CASE("a short full run on the wave backbone") {
    const auto& b = bench();
    RemainderOptions o;
    o.t_final = 0.2;
    o.epsilon = 0.1;
    o.weights = WeightSpec{3, 1.05, 0};
    const auto rs = run_remainder(b.L, b.wave, o);
    REQUIRE(rs.records.size() == 3);
    CHECK(rs.sup_h2 > 0.0);
    CHECK(rs.min_F0 >= 0.0);
    CHECK(rs.min_F >= -1e-8 * rs.peak_M);
    for (const auto& r : rs.records) CHECK(std::isfinite(r.E));
    CHECK(rs.records.back().D_integral >= 0.0);
}
