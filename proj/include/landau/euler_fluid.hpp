#pragma once
// 1D relativistic Euler backbone on the torus (flow along x1, u = (u1,0,0)).

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "landau/equilibrium.hpp"
#include "landau/phase_space.hpp"

namespace landau {

struct Thermo {
    double P0 = 0.0;
    double e0 = 0.0;
};

/// P0 = n0 T0, e0 = n0 (K3(g)/K2(g) - T0), g = 1/T0
Thermo thermo_closure(double n0, double T0);
/// same e0 through the K1 form n0 (K1/K2 + 3 T0)
double internal_energy_k1_form(double n0, double T0);

/// Primitive vector (n0, u1, T0) <-> conserved (D, m1, E) and 1D flux.
class Closure {
public:
    virtual ~Closure() = default;
    virtual Eigen::Vector3d conserved(const CellState& s) const = 0;
    virtual Eigen::Vector3d flux(const CellState& s) const = 0;
    /// d(conserved)/d(n0, u1, T0)
    virtual Eigen::Matrix3d jacobian(const CellState& s) const = 0;
};

/// Perfect fluid with the Bessel closure: D = n0 u0, m = (e0+P0) u0 u, E = e0 (u0)^2 + P0 |u|^2.
class ContinuumClosure final : public Closure {
public:
    Eigen::Vector3d conserved(const CellState& s) const override;
    Eigen::Vector3d flux(const CellState& s) const override;
    Eigen::Matrix3d jacobian(const CellState& s) const override;
};

/// Same structure with every moment taken by grid quadrature of the Juttner state:
/// U = <(1, p1, p0) M>, flux = <p^_1 (1, p1, p0) M>. Used when the backbone must be
/// exactly consistent with the kinetic transport on the same momentum grid.
class LatticeClosure final : public Closure {
public:
    explicit LatticeClosure(const MomentumGrid& grid) : grid_(grid) {}
    Eigen::Vector3d conserved(const CellState& s) const override;
    Eigen::Vector3d flux(const CellState& s) const override;
    Eigen::Matrix3d jacobian(const CellState& s) const override;
    /// dM/d(n0, u1, T0) at every node, 3*Np component-major
    std::vector<double> dM(const CellState& s, const std::vector<double>& M) const;
    const MomentumGrid& grid() const { return grid_; }

private:
    MomentumGrid grid_;
};

/// Newton solve of closure.conserved(n0,u1,T0) = U, starting from guess.
/// Throws NumericalFailure on divergence or when |u| > u_max.
CellState recover_primitives(const Closure& closure, const Eigen::Vector3d& U, const CellState& guess, double u_max = 0.1,
                             double* residual = nullptr);

struct EulerOptions {
    double cfl = 0.4;
    double nu = 1.0 / 64.0;  // hyperdissipation: -(nu/h) (U_{+2} - 4U_{+1} + 6U - 4U_{-1} + U_{-2})
    double u_max = 0.1;
};

struct EulerState {
    double t = 0.0;
    FluidState prim;
    std::vector<Eigen::Vector3d> U;
};

class EulerSolver {
public:
    EulerSolver(const SpatialGrid& grid, std::shared_ptr<const Closure> closure, const EulerOptions& opt = {});
    const SpatialGrid& grid() const { return grid_; }
    const Closure& closure() const { return *closure_; }
    const EulerOptions& options() const { return opt_; }

    EulerState make_state(const FluidState& prim, double t = 0.0) const;
    /// dU/dt of the semi-discrete system; prim must be the primitives of U
    std::vector<Eigen::Vector3d> rhs(const std::vector<Eigen::Vector3d>& U, const FluidState& prim) const;
    /// primitives of U with prim as Newton guess
    FluidState primitives(const std::vector<Eigen::Vector3d>& U, const FluidState& guess) const;
    /// one RK4 step; throws std::invalid_argument when dt > cfl*h
    EulerState step(const EulerState& s, double dt) const;
    /// h * sum_i U_i
    Eigen::Vector3d totals(const EulerState& s) const;

    /// d/dt of the primitives (n0, u1, T0) per cell, from the equations themselves
    std::vector<Eigen::Vector3d> primitive_rates(const EulerState& s) const;
    /// time derivatives of orders 1..3 of the primitives along the semi-discrete flow
    /// (nested directional derivatives of the right-hand side, no snapshot differencing)
    std::array<std::vector<Eigen::Vector3d>, 3> primitive_time_derivatives(const EulerState& s) const;

private:
    SpatialGrid grid_;
    std::shared_ptr<const Closure> closure_;
    EulerOptions opt_;
};

EulerState euler_step(const EulerSolver& solver, const EulerState& s, double dt);

/// Backbone initial data: n0 = nbar(1 + d sin kx), u1 = d sin(kx + 1), T0 = Tbar(1 + d cos kx), k = 2 pi / L.
FluidState wave_state(const SpatialGrid& grid, double amplitude, double nbar = 1.0, double Tbar = 1.0);

struct FluidDiagnostics {
    double Z = 0.0;
    double Zcal = 0.0;
    double Y_floor = 0.0;
    bool window_ok = true;
};

/// Z = sup |grad_{t,x}(n0,u,T0)| (1+T0) u0 / T0^2, Zcal = sup_{l=1..3} |grad^l_{t,x}(n0,u,T0)|,
/// window_ok = Y(t0)/2 >= Z with Y at the weight temperature T_w.
FluidDiagnostics diagnostics_Z(const EulerSolver& solver, const std::vector<EulerState>& history, double T_w, double t0);

/// Periodic central first and second differences of a cell field.
std::vector<double> ddx(const std::vector<double>& v, double h);
std::vector<double> d2dx2(const std::vector<double>& v, double h);

}  // namespace landau
