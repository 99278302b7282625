#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "landau/equilibrium.hpp"

using namespace landau;

TEST_CASE("Bessel K against boost") {
    for (int nu : {1, 2, 3})
        for (double z : {0.3, 1.0, 2.5, 7.0, 15.0}) {
            const double ref = boost::math::cyl_bessel_k(nu, z);
            CHECK(bessel_k(nu, z) == doctest::Approx(ref).epsilon(1e-10));
            CHECK(bessel_k_scaled(nu, z) == doctest::Approx(ref * std::exp(z)).epsilon(1e-10));
        }
    // the scaled form stays finite where K itself underflows
    CHECK(std::isfinite(bessel_k_scaled(2, 900.0)));
    CHECK(bessel_k_scaled(2, 900.0) > 0.0);
}

TEST_CASE("Juttner normalization by radial quadrature") {
    // at rest: 4 pi int p^2 M dp = n0
    for (double T : {0.2, 0.5, 1.0}) {
        const CellState s{1.7, {0, 0, 0}, T};
        boost::math::quadrature::exp_sinh<double> q;
        const double mass = 4.0 * M_PI * q.integrate([&](double r) { return r * r * juttner(s, {r, 0, 0}); });
        CHECK(mass == doctest::Approx(1.7).epsilon(1e-9));
    }
    const CellState s{1.0, {0.2, 0, 0}, 0.8};
    CHECK(juttner_sqrt(s, {0.1, 0.2, 0.3}) == doctest::Approx(std::sqrt(juttner(s, {0.1, 0.2, 0.3}))));
}

TEST_CASE("grid moments approach the closed forms") {
    const MomentumGrid coarse(8.0, 16), fine(8.0, 24);
    const CellState s{1.0, {0.05, 0.0, 0.0}, 0.6};
    const auto rc = fluid_moment_check(s, coarse), rf = fluid_moment_check(s, fine);
    CHECK(std::abs(rf.mass) < 1e-3);
    CHECK(std::abs(rf.energy) < 1e-3);
    CHECK(std::abs(rf.pressure) < 1e-3);
    CHECK(std::abs(rf.mass) < std::abs(rc.mass));
}

TEST_CASE("fluid state validation") {
    FluidState f(4);
    CHECK_NOTHROW(f.validate());
    f.set(2, CellState{1.0, {0.2, 0, 0}, 1.0});
    CHECK_THROWS_AS(f.validate(0.1), std::domain_error);
    f.set(2, CellState{-1.0, {0, 0, 0}, 1.0});
    CHECK_THROWS_AS(f.validate(), std::domain_error);
    f.set(2, CellState{1.0, {0, 0, 0}, 0.0});
    CHECK_THROWS_AS(f.validate(), std::domain_error);
}
