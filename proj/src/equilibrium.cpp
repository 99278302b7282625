#include "landau/equilibrium.hpp"

#include <atomic>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace landau {

FluidState::FluidState(std::size_t cells, const CellState& c) : n0(cells, c.n0), u(cells, c.u), T0(cells, c.T0) {}

void FluidState::set(std::size_t i, const CellState& c) {
    n0[i] = c.n0;
    u[i] = c.u;
    T0[i] = c.T0;
}

void FluidState::validate(double u_max) const {
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(n0[i] > 0.0)) throw std::domain_error("fluid state: n0 must be positive");
        if (!(T0[i] > 0.0)) throw std::domain_error("fluid state: T0 must be positive");
        if (std::sqrt(norm2(u[i])) > u_max) throw std::domain_error("fluid state: |u| exceeds u_max");
    }
}

namespace {

// int_0^inf e^{-z t} (t(t+2))^{m/2} dt, m = 1 or 3
double shifted_integral(double z, int m) {
    static thread_local boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [z, m](double t) {
        const double base = t * (t + 2.0);
        if (!(base > 0.0)) return 0.0;
        // in log form so that huge t gives 0 rather than 0 * inf
        return std::exp(-z * t + 0.5 * m * std::log(base));
    };
    double err = 0.0;
    return integrator.integrate(f, 1e-14, &err);
}

}  // namespace

double bessel_k_scaled(int order, double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel_k: z must be positive");
    switch (order) {
        case 1: return z * shifted_integral(z, 1);
        case 2: return z * z / 3.0 * shifted_integral(z, 3);
        case 3: return bessel_k_scaled(1, z) + 4.0 / z * bessel_k_scaled(2, z);
        default: throw std::invalid_argument("bessel_k: order must be 1, 2 or 3");
    }
}

double bessel_k(int order, double z) { return std::exp(-z) * bessel_k_scaled(order, z); }

void warn_if_temperature_unsupported(double T0) {
    static std::atomic<bool> warned{false};
    if ((T0 < 0.1 || T0 > 1.2) && !warned.exchange(true))
        std::cerr << "warning: T0=" << T0 << " outside the supported range [0.1, 1.2]\n";
}

double juttner_log_norm(const CellState& s) {
    const double g = s.gamma();
    // log K2(g) = log(e^g K2(g)) - g
    const double logK2 = std::log(bessel_k_scaled(2, g)) - g;
    return std::log(s.n0 * g / (4.0 * std::numbers::pi)) - logK2;
}

double juttner(const CellState& s, const Vec3& p) {
    const Vec3& u = s.u;
    const double inner = -energy_of(p) * s.u0() + dot(p, u);
    return std::exp(juttner_log_norm(s) + s.gamma() * inner);
}

double juttner_sqrt(const CellState& s, const Vec3& p) { return std::sqrt(juttner(s, p)); }

std::vector<double> juttner_on_grid(const CellState& s, const MomentumGrid& grid) {
    warn_if_temperature_unsupported(s.T0);
    const double ln = juttner_log_norm(s), g = s.gamma(), u0 = s.u0();
    std::vector<double> m(grid.size());
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const double inner = -grid.p0(a) * u0 + dot(grid.p(a), s.u);
        m[a] = std::exp(ln + g * inner);
    }
    return m;
}

MomentResiduals fluid_moment_check(const CellState& s, const MomentumGrid& grid) {
    const auto m = juttner_on_grid(s, grid);
    std::vector<double> v(grid.size());
    const double g = s.gamma(), u0 = s.u0(), uu = norm2(s.u);
    const double P0 = s.n0 / g;
    const double e0 = s.n0 * (bessel_k_scaled(3, g) / bessel_k_scaled(2, g) - 1.0 / g);

    MomentResiduals r;
    const double mass = integrate_p(m, grid);
    r.mass = (mass - s.n0 * u0) / (s.n0 * u0);

    for (std::size_t a = 0; a < grid.size(); ++a) v[a] = norm2(grid.p(a)) / grid.p0(a) * m[a];
    const double pres = integrate_p(v, grid) / 3.0;
    const double pres_ref = ((e0 + P0) * uu + 3.0 * P0) / 3.0;
    r.pressure = (pres - pres_ref) / pres_ref;

    for (std::size_t a = 0; a < grid.size(); ++a) v[a] = grid.p0(a) * m[a];
    const double en = integrate_p(v, grid);
    const double en_ref = e0 * u0 * u0 + P0 * uu;
    r.energy = (en - en_ref) / en_ref;
    return r;
}

}  // namespace landau
