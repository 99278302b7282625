#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "landau/phase_space.hpp"

using namespace landau;

TEST_CASE("mass shell kinematics") {
    CHECK(energy_of({0, 0, 0}) == 1.0);
    CHECK(energy_of({3, 0, 4}) == doctest::Approx(std::sqrt(26.0)));
    const Vec3 p{0.3, -1.2, 2.0};
    CHECK(lorentz_inner(p, p) == doctest::Approx(-1.0).epsilon(1e-14));
    const Vec3 ph = p_hat(p);
    for (int d = 0; d < 3; ++d) CHECK(ph[d] == doctest::Approx(p[d] / energy_of(p)));
}

TEST_CASE("rho - 1 is non-negative and accurate near the diagonal") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
        CHECK(lorentz_inner(p, q) <= -1.0 + 1e-12);
        CHECK(rho_minus_one(p, q) == doctest::Approx(-lorentz_inner(p, q) - 1.0).epsilon(1e-9));
    }
    // long double reference for a nearly coincident pair, where the naive form cancels
    const Vec3 p{1.0, 2.0, -0.5}, q{1.0 + 1e-7, 2.0, -0.5};
    long double p0 = std::sqrt(1.0L + 1.0L + 4.0L + 0.25L);
    long double q1 = 1.0L + 1e-7L;
    long double q0 = std::sqrt(1.0L + q1 * q1 + 4.0L + 0.25L);
    long double ref = p0 * q0 - (q1 + 4.0L + 0.25L) - 1.0L;
    CHECK(rho_minus_one(p, q) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-6));
    CHECK(rho_minus_one(p, p) == 0.0);
}

TEST_CASE("momentum grid layout and trapezoid weights") {
    const MomentumGrid g(6.0, 8);
    CHECK(g.size() == 512);
    CHECK(g.spacing() == doctest::Approx(12.0 / 7.0));
    CHECK(g.p(0)[0] == -6.0);
    CHECK(g.p(g.size() - 1)[2] == doctest::Approx(6.0));
    double wsum = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        wsum += g.weight(a);
        const auto m = g.multi_index(a);
        CHECK(g.index(m[0], m[1], m[2]) == a);
        for (int d = 0; d < 3; ++d) CHECK(g.p(g.mirror(a))[d] == doctest::Approx(-g.p(a)[d]));
    }
    CHECK(wsum == doctest::Approx(12.0 * 12.0 * 12.0));
    // odd integrands vanish, linear ones are exact
    std::vector<double> v(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) v[a] = g.p(a)[1] * g.p(a)[1] * g.p(a)[1];
    CHECK(std::abs(integrate_p(v, g)) < 1e-10);
    for (std::size_t a = 0; a < g.size(); ++a) v[a] = 2.0 + g.p(a)[0];
    CHECK(integrate_p(v, g) == doctest::Approx(2.0 * 1728.0));
}

TEST_CASE("grid parameter validation") {
    CHECK_THROWS_AS(build_momentum_grid({6.0, 9}), std::invalid_argument);
    CHECK_THROWS_AS(build_momentum_grid({6.0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_momentum_grid({0.0, 8}), std::invalid_argument);
    CHECK_NOTHROW(build_momentum_grid({6.0, 8}));
}

TEST_CASE("pairwise sum against a long double reference") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(10007);
    long double ref = 0.0L;
    for (auto& x : v) {
        x = u(rng) * std::pow(10.0, 8.0 * u(rng));
        ref += x;
    }
    CHECK(pairwise_sum(v) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("spatial grid wraps periodically") {
    const SpatialGrid sg(8, 2.0);
    CHECK(sg.h() == 0.25);
    CHECK(sg.x(0) == 0.125);
    CHECK(sg.wrap(-1) == 7);
    CHECK(sg.wrap(8) == 0);
    CHECK(sg.wrap(-17) == 7);
}
