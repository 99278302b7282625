#pragma once
// Nonlinear Landau collision operator in flux (divergence) form, plus the
// non-divergence rearrangement used by the positivity argument.

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <span>
#include <vector>

#include "landau/equilibrium.hpp"
#include "landau/kernel.hpp"
#include "landau/phase_space.hpp"

namespace landau {

/// Values over (x-cell x p-node); cell i occupies [i*Np, (i+1)*Np).
class DistField {
public:
    DistField() = default;
    DistField(std::size_t np, std::size_t cells, double fill = 0.0) : np_(np), cells_(cells), v_(np * cells, fill) {}
    std::size_t np() const { return np_; }
    std::size_t cells() const { return cells_; }
    double* cell(std::size_t i) { return v_.data() + i * np_; }
    const double* cell(std::size_t i) const { return v_.data() + i * np_; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }
    double& operator()(std::size_t i, std::size_t a) { return v_[i * np_ + a]; }
    double operator()(std::size_t i, std::size_t a) const { return v_[i * np_ + a]; }
    bool all_finite() const;

private:
    std::size_t np_ = 0, cells_ = 0;
    std::vector<double> v_;
};

/// Juttner state of one cell sampled on the grid, with the exact
/// per-family discrete gradient of log M (log M is affine in (1,p,p0)).
struct LocalMaxwellian {
    CellState state;
    std::vector<double> M, sqrtM;
    std::array<std::vector<double>, 2> dlogM;  // 3*Np each, component-major
};

class CollisionOperator {
public:
    explicit CollisionOperator(const MomentumGrid& grid, const KernelOptions& opt = {});
    CollisionOperator(const CollisionOperator&) = delete;
    CollisionOperator& operator=(const CollisionOperator&) = delete;

    const MomentumGrid& grid() const { return grid_; }
    std::size_t np() const { return grid_.size(); }
    const Stencil& stencil(int family) const { return family == 0 ? plus_ : minus_; }
    const KernelTable& table() const { return *table_; }
    KernelMode mode() const { return table_->options().mode; }

    LocalMaxwellian reference(const CellState& s) const;

    /// G_M[g] = M D(g/M) + g D(log M), 3*Np output. Consistent with grad g; exact on g = M.
    void weighted_grad(int family, const double* g, const LocalMaxwellian& ref, double* out) const;

    /// out(:,c) = C[g(:,c), h(:,c)] using refs[c] for the weighted gradients.
    /// g, h, out are Np x ncols column-major; out is overwritten.
    void bilinear(const double* g, const double* h, std::span<const LocalMaxwellian* const> refs, double* out) const;

private:
    MomentumGrid grid_;
    Stencil plus_, minus_;
    std::unique_ptr<KernelTable> table_;
};

/// Single-cell convenience wrapper.
std::vector<double> collision_bilinear(const CollisionOperator& op, std::span<const double> g, std::span<const double> h,
                                       const LocalMaxwellian& ref);

struct InvariantResiduals {
    double mass = 0.0;
    Vec3 momentum{0.0, 0.0, 0.0};
    double energy = 0.0;
    double max_abs() const;
};

/// int (1, p, p0) C[g,h] dp by grid quadrature.
InvariantResiduals invariant_residuals(const CollisionOperator& op, std::span<const double> g, std::span<const double> h,
                                       const LocalMaxwellian& ref);
InvariantResiduals moments_of(std::span<const double> c, const MomentumGrid& grid);

/// C[F,F] = diffusion_ij d_i d_j F + drift_j d_j F + reaction F, with
/// diffusion = int Phi F dq, drift_j = int (d_{p_i} Phi^{ij} F - Phi^{jk} d_k F) dq and
/// reaction = 4 int (p^mu q_mu)/(p0 q0) ((p^mu q_mu)^2-1)^{-1/2} F dq + kappa(p) F.
/// Quadrature over the grid skipping q = p; momentum derivatives of F by
/// second-order differences (one-sided at the truncation boundary).
struct NonDivergenceForm {
    std::vector<Eigen::Matrix3d> diffusion;
    std::vector<Vec3> drift;
    std::vector<double> reaction;
};
NonDivergenceForm nondivergence_form(std::span<const double> F, const MomentumGrid& grid, double eta = 0.0);
/// Evaluates the assembled form on F.
std::vector<double> nondivergence_apply(const NonDivergenceForm& nd, std::span<const double> F, const MomentumGrid& grid);

/// Second-order momentum derivatives used by the non-divergence form.
std::vector<double> central_gradient(std::span<const double> F, const MomentumGrid& grid);  // 3*Np
std::vector<Eigen::Matrix3d> central_hessian(std::span<const double> F, const MomentumGrid& grid);

}  // namespace landau
