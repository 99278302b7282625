#include "landau/euler_fluid.hpp"

#include <cmath>
#include <stdexcept>

#include "landau/errors.hpp"
#include "landau/linearized.hpp"

namespace landau {

namespace {
// h = K3/K2 and dh/dgamma (K_nu' = -K_{nu-1} - nu K_nu / z)
struct Enthalpy {
    double h, dh_dgamma, k1_over_k2;
};
Enthalpy enthalpy(double g) {
    const double k1 = bessel_k_scaled(1, g), k2 = bessel_k_scaled(2, g), k3 = bessel_k_scaled(3, g);
    const double h = k3 / k2;
    return {h, -1.0 - h / g + k1 * k3 / (k2 * k2), k1 / k2};
}
}  // namespace

Thermo thermo_closure(double n0, double T0) {
    if (!(n0 > 0.0) || !(T0 > 0.0)) throw std::domain_error("thermo_closure: n0 and T0 must be positive");
    const double g = 1.0 / T0;
    return {n0 * T0, n0 * (bessel_k_scaled(3, g) / bessel_k_scaled(2, g) - T0)};
}

double internal_energy_k1_form(double n0, double T0) {
    if (!(n0 > 0.0) || !(T0 > 0.0)) throw std::domain_error("internal_energy_k1_form: n0 and T0 must be positive");
    const double g = 1.0 / T0;
    return n0 * (bessel_k_scaled(1, g) / bessel_k_scaled(2, g) + 3.0 * T0);
}

// ---------------------------------------------------------------------------

Eigen::Vector3d ContinuumClosure::conserved(const CellState& s) const {
    const auto th = thermo_closure(s.n0, s.T0);
    const double u1 = s.u[0], u0 = s.u0();
    const double w = th.e0 + th.P0;
    return {s.n0 * u0, w * u0 * u1, th.e0 * u0 * u0 + th.P0 * u1 * u1};
}

Eigen::Vector3d ContinuumClosure::flux(const CellState& s) const {
    const auto th = thermo_closure(s.n0, s.T0);
    const double u1 = s.u[0], u0 = s.u0();
    const double w = th.e0 + th.P0;
    return {s.n0 * u1, w * u1 * u1 + th.P0, w * u0 * u1};
}

Eigen::Matrix3d ContinuumClosure::jacobian(const CellState& s) const {
    const double n = s.n0, T = s.T0, g = 1.0 / T, u1 = s.u[0], u0 = s.u0();
    const auto e = enthalpy(g);
    const double hT = -g * g * e.dh_dgamma;
    Eigen::Matrix3d J;
    J.col(0) << u0, e.h * u0 * u1, (e.h - T) * u0 * u0 + T * u1 * u1;
    J.col(1) << n * u1 / u0, n * e.h * (u1 * u1 + u0 * u0) / u0, 2.0 * n * e.h * u1;
    J.col(2) << 0.0, n * hT * u0 * u1, n * (hT - 1.0) * u0 * u0 + n * u1 * u1;
    return J;
}

Eigen::Vector3d LatticeClosure::conserved(const CellState& s) const {
    const auto M = juttner_on_grid(s, grid_);
    const std::size_t np = grid_.size();
    std::vector<double> t1(np), t2(np);
    for (std::size_t a = 0; a < np; ++a) {
        t1[a] = grid_.p(a)[0] * M[a];
        t2[a] = grid_.p0(a) * M[a];
    }
    return {integrate_p(M, grid_), integrate_p(t1, grid_), integrate_p(t2, grid_)};
}

Eigen::Vector3d LatticeClosure::flux(const CellState& s) const {
    const auto M = juttner_on_grid(s, grid_);
    const std::size_t np = grid_.size();
    std::vector<double> t0(np), t1(np), t2(np);
    for (std::size_t a = 0; a < np; ++a) {
        const double v = grid_.phat(a)[0] * M[a];
        t0[a] = v;
        t1[a] = grid_.p(a)[0] * v;
        t2[a] = grid_.p(a)[0] * M[a];
    }
    return {integrate_p(t0, grid_), integrate_p(t1, grid_), integrate_p(t2, grid_)};
}

std::vector<double> LatticeClosure::dM(const CellState& s, const std::vector<double>& M) const {
    const std::size_t np = grid_.size();
    const double g = s.gamma(), u1 = s.u[0], u0 = s.u0();
    const double k1k2 = bessel_k_scaled(1, g) / bessel_k_scaled(2, g);
    std::vector<double> d(3 * np);
    for (std::size_t a = 0; a < np; ++a) {
        const double p1 = grid_.p(a)[0], p0 = grid_.p0(a);
        const double pu = -p0 * u0 + dot(grid_.p(a), s.u);
        d[a] = M[a] / s.n0;
        d[np + a] = M[a] * g * (p1 - p0 * u1 / u0);
        d[2 * np + a] = -g * g * M[a] * (3.0 / g + k1k2 + pu);
    }
    return d;
}

Eigen::Matrix3d LatticeClosure::jacobian(const CellState& s) const {
    const auto M = juttner_on_grid(s, grid_);
    const auto d = dM(s, M);
    const std::size_t np = grid_.size();
    Eigen::Matrix3d J;
    std::vector<double> t(np);
    for (int c = 0; c < 3; ++c) {
        const double* dc = d.data() + c * np;
        J(0, c) = integrate_p(std::span<const double>(dc, np), grid_);
        for (std::size_t a = 0; a < np; ++a) t[a] = grid_.p(a)[0] * dc[a];
        J(1, c) = integrate_p(t, grid_);
        for (std::size_t a = 0; a < np; ++a) t[a] = grid_.p0(a) * dc[a];
        J(2, c) = integrate_p(t, grid_);
    }
    return J;
}

CellState recover_primitives(const Closure& closure, const Eigen::Vector3d& U, const CellState& guess, double u_max, double* residual) {
    if (!(U[0] > 0.0) || !(U[2] > 0.0)) throw NumericalFailure("recover_primitives: non-physical conserved state");
    CellState s = guess;
    s.u = {guess.u[0], 0.0, 0.0};
    if (!(s.n0 > 0.0) || !(s.T0 > 0.0)) s = {U[0], {0.0, 0.0, 0.0}, 1.0};
    const Eigen::Vector3d scale(std::abs(U[0]), std::max(std::abs(U[2]), 1e-300), std::abs(U[2]));
    double res = 0.0;
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector3d r = closure.conserved(s) - U;
        res = r.cwiseQuotient(scale).cwiseAbs().maxCoeff();
        if (res <= 1e-14) break;
        const Eigen::Vector3d dx = closure.jacobian(s).partialPivLu().solve(-r);
        double lam = 1.0;
        // keep n0, T0 positive
        while (s.n0 + lam * dx[0] <= 0.0 || s.T0 + lam * dx[2] <= 0.0) lam *= 0.5;
        s.n0 += lam * dx[0];
        s.u[0] += lam * dx[1];
        s.T0 += lam * dx[2];
        if (!std::isfinite(s.n0 + s.u[0] + s.T0)) throw NumericalFailure("recover_primitives: Newton diverged");
    }
    if (residual) *residual = res;
    if (res > 1e-11) throw NumericalFailure("recover_primitives: Newton did not converge (residual " + std::to_string(res) + ")");
    if (std::abs(s.u[0]) > u_max) throw NumericalFailure("recover_primitives: |u| exceeds u_max (state outside the supported regime)");
    return s;
}

// ---------------------------------------------------------------------------

EulerSolver::EulerSolver(const SpatialGrid& grid, std::shared_ptr<const Closure> closure, const EulerOptions& opt)
    : grid_(grid), closure_(std::move(closure)), opt_(opt) {
    if (!(opt.cfl > 0.0 && opt.cfl <= 1.0)) throw std::invalid_argument("euler.cfl must lie in (0, 1]");
    if (opt.nu < 0.0) throw std::invalid_argument("hyperdissipation must be >= 0");
}

EulerState EulerSolver::make_state(const FluidState& prim, double t) const {
    prim.validate(opt_.u_max);
    if (prim.size() != std::size_t(grid_.cells)) throw std::invalid_argument("make_state: cell count mismatch");
    EulerState s;
    s.t = t;
    s.prim = prim;
    s.U.resize(prim.size());
    for (std::size_t i = 0; i < prim.size(); ++i) s.U[i] = closure_->conserved(prim.cell(i));
    return s;
}

FluidState EulerSolver::primitives(const std::vector<Eigen::Vector3d>& U, const FluidState& guess) const {
    FluidState out(U.size());
    for (std::size_t i = 0; i < U.size(); ++i) out.set(i, recover_primitives(*closure_, U[i], guess.cell(i), opt_.u_max));
    return out;
}

std::vector<Eigen::Vector3d> EulerSolver::rhs(const std::vector<Eigen::Vector3d>& U, const FluidState& prim) const {
    const int n = grid_.cells;
    const double h = grid_.h();
    std::vector<Eigen::Vector3d> F(n), out(n);
    for (int i = 0; i < n; ++i) F[i] = closure_->flux(prim.cell(i));
    for (int i = 0; i < n; ++i) {
        const auto w = [&](int k) -> const Eigen::Vector3d& { return U[grid_.wrap(i + k)]; };
        out[i] = -(F[grid_.wrap(i + 1)] - F[grid_.wrap(i - 1)]) / (2.0 * h) -
                 (opt_.nu / h) * (w(2) - 4.0 * w(1) + 6.0 * w(0) - 4.0 * w(-1) + w(-2));
    }
    return out;
}

EulerState EulerSolver::step(const EulerState& s, double dt) const {
    if (!(dt > 0.0) || dt > opt_.cfl * grid_.h() * (1.0 + 1e-12))
        throw std::invalid_argument("euler_step: CFL violation (dt=" + std::to_string(dt) + " > cfl*h=" + std::to_string(opt_.cfl * grid_.h()) + ")");
    const std::size_t n = s.U.size();
    auto axpy = [n](const std::vector<Eigen::Vector3d>& a, double c, const std::vector<Eigen::Vector3d>& b) {
        std::vector<Eigen::Vector3d> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    const auto k1 = rhs(s.U, s.prim);
    const auto U2 = axpy(s.U, 0.5 * dt, k1);
    const auto P2 = primitives(U2, s.prim);
    const auto k2 = rhs(U2, P2);
    const auto U3 = axpy(s.U, 0.5 * dt, k2);
    const auto P3 = primitives(U3, P2);
    const auto k3 = rhs(U3, P3);
    const auto U4 = axpy(s.U, dt, k3);
    const auto P4 = primitives(U4, P3);
    const auto k4 = rhs(U4, P4);
    EulerState out;
    out.t = s.t + dt;
    out.U.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.U[i] = s.U[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.prim = primitives(out.U, P4);
    return out;
}

EulerState euler_step(const EulerSolver& solver, const EulerState& s, double dt) { return solver.step(s, dt); }

Eigen::Vector3d EulerSolver::totals(const EulerState& s) const {
    // pairwise per component for a fixed summation order
    Eigen::Vector3d t;
    std::vector<double> v(s.U.size());
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < s.U.size(); ++i) v[i] = s.U[i][c];
        t[c] = grid_.h() * pairwise_sum(v);
    }
    return t;
}

std::vector<Eigen::Vector3d> EulerSolver::primitive_rates(const EulerState& s) const {
    const auto R = rhs(s.U, s.prim);
    std::vector<Eigen::Vector3d> out(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) out[i] = closure_->jacobian(s.prim.cell(i)).partialPivLu().solve(R[i]);
    return out;
}

std::array<std::vector<Eigen::Vector3d>, 3> EulerSolver::primitive_time_derivatives(const EulerState& s) const {
    using Field = std::vector<Eigen::Vector3d>;
    const std::size_t n = s.U.size();
    auto comb = [n](const Field& a, double c, const Field& b) {
        Field r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    auto R1 = [&](const Field& U) { return rhs(U, primitives(U, s.prim)); };
    const double dl = 0.05;
    // R_{k+1}(U) = dR_k(U)[R1(U)]
    auto R2f = [&](const Field& U) {
        const Field r1 = R1(U);
        Field d = comb(R1(comb(U, dl, r1)), -1.0, R1(comb(U, -dl, r1)));
        for (auto& v : d) v /= 2.0 * dl;
        return d;
    };
    const Field r1 = R1(s.U);
    const Field r2 = R2f(s.U);
    Field r3 = comb(R2f(comb(s.U, dl, r1)), -1.0, R2f(comb(s.U, -dl, r1)));
    for (auto& v : r3) v /= 2.0 * dl;

    // primitives along the cubic Taylor path of U, differentiated by 5-point stencils
    const double e = 0.05;
    std::array<Field, 5> W;
    for (int k = -2; k <= 2; ++k) {
        const double sk = k * e;
        Field U(n);
        for (std::size_t i = 0; i < n; ++i) U[i] = s.U[i] + sk * r1[i] + 0.5 * sk * sk * r2[i] + sk * sk * sk / 6.0 * r3[i];
        const FluidState p = primitives(U, s.prim);
        W[k + 2].resize(n);
        for (std::size_t i = 0; i < n; ++i) W[k + 2][i] = {p.n0[i], p.u[i][0], p.T0[i]};
    }
    std::array<Field, 3> out;
    for (auto& o : out) o.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[0][i] = (-W[4][i] + 8.0 * W[3][i] - 8.0 * W[1][i] + W[0][i]) / (12.0 * e);
        out[1][i] = (-W[4][i] + 16.0 * W[3][i] - 30.0 * W[2][i] + 16.0 * W[1][i] - W[0][i]) / (12.0 * e * e);
        out[2][i] = (W[4][i] - 2.0 * W[3][i] + 2.0 * W[1][i] - W[0][i]) / (2.0 * e * e * e);
    }
    return out;
}

// ---------------------------------------------------------------------------

FluidState wave_state(const SpatialGrid& grid, double amplitude, double nbar, double Tbar) {
    FluidState s(grid.cells);
    const double k = 2.0 * M_PI / grid.length;
    for (int i = 0; i < grid.cells; ++i) {
        const double x = grid.x(i);
        s.set(i, {nbar * (1.0 + amplitude * std::sin(k * x)), {amplitude * std::sin(k * x + 1.0), 0.0, 0.0},
                  Tbar * (1.0 + amplitude * std::cos(k * x))});
    }
    return s;
}

std::vector<double> ddx(const std::vector<double>& v, double h) {
    const int n = static_cast<int>(v.size());
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = (v[(i + 1) % n] - v[(i - 1 + n) % n]) / (2.0 * h);
    return d;
}

std::vector<double> d2dx2(const std::vector<double>& v, double h) {
    const int n = static_cast<int>(v.size());
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = (v[(i + 1) % n] - 2.0 * v[i] + v[(i - 1 + n) % n]) / (h * h);
    return d;
}

FluidDiagnostics diagnostics_Z(const EulerSolver& solver, const std::vector<EulerState>& history, double T_w, double t0) {
    FluidDiagnostics d;
    const double h = solver.grid().h();
    for (const auto& s : history) {
        const std::size_t n = s.U.size();
        const auto dt = solver.primitive_time_derivatives(s);
        double sup1 = 0.0, sup2 = 0.0, sup3 = 0.0, supZ = 0.0;
        std::vector<double> n1(n, 0.0), n2(n, 0.0), n3(n, 0.0);
        for (int c = 0; c < 3; ++c) {
            std::vector<double> w(n), wt(n), wtt(n), wttt(n);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = c == 0 ? s.prim.n0[i] : (c == 1 ? s.prim.u[i][0] : s.prim.T0[i]);
                wt[i] = dt[0][i][c];
                wtt[i] = dt[1][i][c];
                wttt[i] = dt[2][i][c];
            }
            const auto wx = ddx(w, h), wxx = d2dx2(w, h), wxxx = ddx(wxx, h);
            const auto wtx = ddx(wt, h), wtxx = d2dx2(wt, h), wttx = ddx(wtt, h);
            for (std::size_t i = 0; i < n; ++i) {
                n1[i] += wt[i] * wt[i] + wx[i] * wx[i];
                n2[i] += wtt[i] * wtt[i] + 2.0 * wtx[i] * wtx[i] + wxx[i] * wxx[i];
                n3[i] += wttt[i] * wttt[i] + 3.0 * wttx[i] * wttx[i] + 3.0 * wtxx[i] * wtxx[i] + wxxx[i] * wxxx[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double T = s.prim.T0[i];
            const double u0 = energy_of(s.prim.u[i]);
            sup1 = std::max(sup1, std::sqrt(n1[i]));
            sup2 = std::max(sup2, std::sqrt(n2[i]));
            sup3 = std::max(sup3, std::sqrt(n3[i]));
            supZ = std::max(supZ, std::sqrt(n1[i]) * (1.0 + T) * u0 / (T * T));
        }
        d.Z = std::max(d.Z, supZ);
        d.Zcal = std::max({d.Zcal, sup1, sup2, sup3});
    }
    d.Y_floor = 0.5 * rate_Y(T_w, t0);
    d.window_ok = d.Y_floor >= d.Z;
    return d;
}

}  // namespace landau
