#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "landau/euler_fluid.hpp"
#include "landau/errors.hpp"

using namespace landau;

TEST_CASE("closure: two Bessel forms of the internal energy agree") {
    for (double T : {0.1, 0.3, 1.0, 1.2}) {
        const auto th = thermo_closure(1.3, T);
        CHECK(th.P0 == doctest::Approx(1.3 * T));
        CHECK(th.e0 == doctest::Approx(internal_energy_k1_form(1.3, T)).epsilon(1e-10));
    }
    // cold limit: e0 = n0 (1 + 3T/2 + 15T^2/8 + ...)
    const double T = 1e-3;
    CHECK(thermo_closure(1.0, T).e0 == doctest::Approx(1.0 + 1.5 * T + 15.0 / 8.0 * T * T).epsilon(1e-8));
}

TEST_CASE("primitive recovery round trip") {
    const ContinuumClosure cc;
    const LatticeClosure lc(MomentumGrid(8.0, 16));
    for (const Closure* c : {static_cast<const Closure*>(&cc), static_cast<const Closure*>(&lc)})
        for (const CellState s : {CellState{1.0, {0.0, 0, 0}, 1.0}, CellState{0.8, {0.07, 0, 0}, 0.6}, CellState{1.5, {-0.03, 0, 0}, 1.1}}) {
            double res = 1.0;
            const auto r = recover_primitives(*c, c->conserved(s), CellState{1.0, {0, 0, 0}, 1.0}, 0.1, &res);
            CHECK(r.n0 == doctest::Approx(s.n0).epsilon(1e-10));
            CHECK(r.u[0] == doctest::Approx(s.u[0]).epsilon(1e-10).scale(1.0));
            CHECK(r.T0 == doctest::Approx(s.T0).epsilon(1e-10));
            CHECK(res < 1e-10);
        }
    CHECK_THROWS_AS(recover_primitives(cc, cc.conserved({1.0, {0.5, 0, 0}, 1.0}), CellState{}, 0.1), NumericalFailure);
}

TEST_CASE("closure Jacobians match finite differences") {
    const ContinuumClosure cc;
    const LatticeClosure lc(MomentumGrid(6.0, 12));
    const CellState s{1.1, {0.04, 0, 0}, 0.9};
    for (const Closure* c : {static_cast<const Closure*>(&cc), static_cast<const Closure*>(&lc)}) {
        const auto J = c->jacobian(s);
        const double e = 1e-6;
        for (int k = 0; k < 3; ++k) {
            CellState a = s, b = s;
            if (k == 0) a.n0 += e, b.n0 -= e;
            if (k == 1) a.u[0] += e, b.u[0] -= e;
            if (k == 2) a.T0 += e, b.T0 -= e;
            const Eigen::Vector3d col = (c->conserved(a) - c->conserved(b)) / (2 * e);
            CHECK((J.col(k) - col).norm() <= 1e-6 * (1.0 + col.norm()));
        }
    }
}

TEST_CASE("lattice closure approaches the continuum closure") {
    const ContinuumClosure cc;
    const CellState s{1.0, {0.05, 0, 0}, 0.5};
    const Eigen::Vector3d U = cc.conserved(s);
    const double e16 = (LatticeClosure(MomentumGrid(8.0, 16)).conserved(s) - U).norm();
    const double e24 = (LatticeClosure(MomentumGrid(8.0, 24)).conserved(s) - U).norm();
    CHECK(e24 < e16);
    CHECK(e24 < 1e-3 * U.norm());
}

TEST_CASE("Euler stepping: constant states, conservation, CFL guard") {
    const SpatialGrid sg(16, 2.0 * M_PI);
    const EulerSolver eu(sg, std::make_shared<ContinuumClosure>());
    const auto flat = eu.make_state(FluidState(16, CellState{1.0, {0.02, 0, 0}, 0.8}));
    const auto next = eu.step(flat, 0.1);
    for (int i = 0; i < 16; ++i) {
        CHECK(next.prim.n0[i] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(next.prim.T0[i] == doctest::Approx(0.8).epsilon(1e-13));
    }
    auto s = eu.make_state(wave_state(sg, 1e-3));
    const auto t0 = eu.totals(s);
    for (int k = 0; k < 10; ++k) s = eu.step(s, 0.1);
    const auto t1 = eu.totals(s);
    CHECK(std::abs(t1[0] - t0[0]) <= 1e-13 * t0[0]);
    CHECK(std::abs(t1[2] - t0[2]) <= 1e-13 * t0[2]);
    CHECK(std::abs(t1[1] - t0[1]) <= 1e-13 * t0[2]);
    CHECK(s.t == doctest::Approx(1.0));
    CHECK_THROWS_AS(eu.step(s, 0.5 * sg.h() + 1e-9), std::invalid_argument);
}

TEST_CASE("primitive rates agree with differencing the flow") {
    const SpatialGrid sg(16, 2.0 * M_PI);
    const EulerSolver eu(sg, std::make_shared<ContinuumClosure>());
    const auto s = eu.make_state(wave_state(sg, 1e-3));
    const auto rates = eu.primitive_rates(s);
    const double dt = 1e-3;
    const auto a = eu.step(s, dt);
    for (int i = 0; i < 16; ++i) {
        CHECK((a.prim.n0[i] - s.prim.n0[i]) / dt == doctest::Approx(rates[i][0]).epsilon(1e-2).scale(1e-6));
        CHECK((a.prim.T0[i] - s.prim.T0[i]) / dt == doctest::Approx(rates[i][2]).epsilon(1e-2).scale(1e-6));
    }
}

TEST_CASE("periodic differences are second order") {
    for (int n : {16, 32}) {
        const SpatialGrid sg(n, 2.0 * M_PI);
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::sin(sg.x(i));
        const auto d = ddx(v, sg.h()), dd = d2dx2(v, sg.h());
        double e1 = 0, e2 = 0;
        for (int i = 0; i < n; ++i) {
            e1 = std::max(e1, std::abs(d[i] - std::cos(sg.x(i))));
            e2 = std::max(e2, std::abs(dd[i] + std::sin(sg.x(i))));
        }
        CHECK(e1 <= 0.2 * sg.h() * sg.h());
        CHECK(e2 <= 0.1 * sg.h() * sg.h());
    }
}

TEST_CASE("smallness diagnostics for the default wave") {
    const SpatialGrid sg(32, 2.0 * M_PI);
    const EulerSolver eu(sg, std::make_shared<ContinuumClosure>());
    std::vector<EulerState> hist{eu.make_state(wave_state(sg, 1e-3))};
    for (int k = 0; k < 5; ++k) hist.push_back(eu.step(hist.back(), 0.05));
    const auto z = diagnostics_Z(eu, hist, 1.05, 0.0);
    CHECK(z.Z > 0.0);
    CHECK(z.Z < 1e-2);
    CHECK(z.window_ok);
}
