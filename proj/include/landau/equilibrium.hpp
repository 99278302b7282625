#pragma once
// Juttner equilibria and the modified Bessel functions normalizing them.

#include <vector>

#include "landau/phase_space.hpp"

namespace landau {

/// One spatial cell of the fluid backbone.
struct CellState {
    double n0 = 1.0;
    Vec3 u{0.0, 0.0, 0.0};
    double T0 = 1.0;

    double gamma() const { return 1.0 / T0; }
    double u0() const { return energy_of(u); }
};

/// (n0, u, T0) on the periodic spatial grid.
struct FluidState {
    std::vector<double> n0;
    std::vector<Vec3> u;
    std::vector<double> T0;

    FluidState() = default;
    explicit FluidState(std::size_t cells, const CellState& c = {});
    std::size_t size() const { return n0.size(); }
    CellState cell(std::size_t i) const { return {n0[i], u[i], T0[i]}; }
    void set(std::size_t i, const CellState& c);
    /// throws std::domain_error on n0 <= 0, T0 <= 0 or |u| > u_max
    void validate(double u_max = 0.1) const;
};

/// K_nu(z) for nu in {1,2,3}. K2 and K1 by adaptive quadrature of
/// (z^2/3) int_1^inf e^{-zs}(s^2-1)^{3/2} ds and z int_1^inf e^{-zs}(s^2-1)^{1/2} ds,
/// K3 from K3 = K1 + 4 K2 / z.
double bessel_k(int order, double z);

/// e^z K_nu(z), same construction but without the exponential (safe for large z).
double bessel_k_scaled(int order, double z);

/// log of n0 gamma / (4 pi K2(gamma))
double juttner_log_norm(const CellState& s);

double juttner(const CellState& s, const Vec3& p);
double juttner_sqrt(const CellState& s, const Vec3& p);

/// M at every node of the grid.
std::vector<double> juttner_on_grid(const CellState& s, const MomentumGrid& grid);

/// Relative discrepancies between quadrature moments of M and closed forms.
struct MomentResiduals {
    double mass = 0.0;      // int M - n0 u0
    double pressure = 0.0;  // (1/3) int (|p|^2/p0) M - [(e0+P0)|u|^2/3 + P0]
    double energy = 0.0;    // int p0 M - [e0 (u0)^2 + P0 |u|^2]
};
MomentResiduals fluid_moment_check(const CellState& s, const MomentumGrid& grid);

/// Warns once on stderr when T0 leaves the supported range [0.1, 1.2].
void warn_if_temperature_unsupported(double T0);

}  // namespace landau
