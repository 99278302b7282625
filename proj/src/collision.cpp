#include "landau/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "landau/parallel.hpp"

namespace landau {

bool DistField::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

CollisionOperator::CollisionOperator(const MomentumGrid& grid, const KernelOptions& opt)
    : grid_(grid), plus_(grid_, +1), minus_(grid_, -1) {
    table_ = std::make_unique<KernelTable>(grid_, std::array<const Stencil*, 2>{&plus_, &minus_}, opt);
}

LocalMaxwellian CollisionOperator::reference(const CellState& s) const {
    LocalMaxwellian r;
    r.state = s;
    const std::size_t np = grid_.size();
    r.M = juttner_on_grid(s, grid_);
    r.sqrtM.resize(np);
    for (std::size_t a = 0; a < np; ++a) r.sqrtM[a] = std::sqrt(r.M[a]);
    const double gam = s.gamma(), u0 = s.u0();
    for (int f = 0; f < 2; ++f) {
        const auto& dp = stencil(f).dp0();
        auto& d = r.dlogM[f];
        d.resize(3 * np);
        for (int k = 0; k < 3; ++k)
            for (std::size_t a = 0; a < np; ++a) d[k * np + a] = gam * (s.u[k] - u0 * dp[k * np + a]);
    }
    return r;
}

void CollisionOperator::weighted_grad(int family, const double* g, const LocalMaxwellian& ref, double* out) const {
    const std::size_t np = grid_.size();
    std::vector<double> ratio(np);
    for (std::size_t a = 0; a < np; ++a) ratio[a] = g[a] / ref.M[a];
    stencil(family).grad(ratio.data(), out);
    const auto& dl = ref.dlogM[family];
    for (int k = 0; k < 3; ++k)
        for (std::size_t a = 0; a < np; ++a) out[k * np + a] = ref.M[a] * out[k * np + a] + g[a] * dl[k * np + a];
}

void CollisionOperator::bilinear(const double* g, const double* h, std::span<const LocalMaxwellian* const> refs, double* out) const {
    const std::size_t np = grid_.size();
    const std::size_t nc = refs.size();
    const auto& w = grid_.weights();
    std::fill(out, out + np * nc, 0.0);
    if (nc == 0) return;

    std::vector<double> Gg(3 * np * nc), Zh(np * nc), ZG(3 * np * nc), A(6 * np * nc), Bv(3 * np * nc);
    for (int fam = 0; fam < 2; ++fam) {
        parallel_for(nc, [&](std::size_t c) {
            std::vector<double> tmp(3 * np);
            weighted_grad(fam, g + c * np, *refs[c], tmp.data());
            for (int k = 0; k < 3; ++k) std::copy(tmp.begin() + k * np, tmp.begin() + (k + 1) * np, Gg.begin() + (k * nc + c) * np);
            weighted_grad(fam, h + c * np, *refs[c], tmp.data());
            for (int k = 0; k < 3; ++k)
                for (std::size_t a = 0; a < np; ++a) ZG[(k * nc + c) * np + a] = w[a] * tmp[k * np + a];
            for (std::size_t a = 0; a < np; ++a) Zh[c * np + a] = w[a] * h[c * np + a];
        });

        std::vector<KernelTable::Job> jobs;
        for (int b = 0; b < 6; ++b) jobs.push_back({b, Zh.data(), A.data() + b * np * nc, 0.0});
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                jobs.push_back({KernelTable::block_index(k, l), ZG.data() + l * np * nc, Bv.data() + k * np * nc, l == 0 ? 0.0 : 1.0});
        table_->multiply(fam, jobs, static_cast<int>(nc));

        parallel_for(nc, [&](std::size_t c) {
            std::vector<double> flux(3 * np), dv(np);
            for (int k = 0; k < 3; ++k)
                for (std::size_t a = 0; a < np; ++a) {
                    const std::size_t ca = c * np + a;
                    double s = 0.0;
                    for (int l = 0; l < 3; ++l) s += A[KernelTable::block_index(k, l) * np * nc + ca] * Gg[l * np * nc + ca];
                    flux[k * np + a] = s - g[ca] * Bv[k * np * nc + ca];
                }
            stencil(fam).div(flux.data(), dv.data());
            for (std::size_t a = 0; a < np; ++a) out[c * np + a] += 0.5 * dv[a];
        });
    }
}

std::vector<double> collision_bilinear(const CollisionOperator& op, std::span<const double> g, std::span<const double> h,
                                       const LocalMaxwellian& ref) {
    if (g.size() != op.np() || h.size() != op.np()) throw std::invalid_argument("collision_bilinear: shape mismatch");
    std::vector<double> out(op.np());
    const LocalMaxwellian* r = &ref;
    op.bilinear(g.data(), h.data(), std::span<const LocalMaxwellian* const>(&r, 1), out.data());
    return out;
}

double InvariantResiduals::max_abs() const {
    return std::max({std::abs(mass), std::abs(momentum[0]), std::abs(momentum[1]), std::abs(momentum[2]), std::abs(energy)});
}

InvariantResiduals moments_of(std::span<const double> c, const MomentumGrid& grid) {
    const std::size_t np = grid.size();
    if (c.size() != np) throw std::invalid_argument("moments_of: shape mismatch");
    std::vector<double> t(np);
    InvariantResiduals r;
    r.mass = integrate_p(c, grid);
    for (int k = 0; k < 3; ++k) {
        for (std::size_t a = 0; a < np; ++a) t[a] = grid.p(a)[k] * c[a];
        r.momentum[k] = integrate_p(t, grid);
    }
    for (std::size_t a = 0; a < np; ++a) t[a] = grid.p0(a) * c[a];
    r.energy = integrate_p(t, grid);
    return r;
}

InvariantResiduals invariant_residuals(const CollisionOperator& op, std::span<const double> g, std::span<const double> h,
                                       const LocalMaxwellian& ref) {
    return moments_of(collision_bilinear(op, g, h, ref), op.grid());
}

// ---------------------------------------------------------------------------
// non-divergence form

namespace {
// second-order first derivative along one axis
double d1(std::span<const double> F, const MomentumGrid& grid, std::size_t a, int axis) {
    const int n = grid.n_axis();
    const int i = grid.multi_index(a)[axis];
    const std::size_t st = grid.stride(axis);
    const double h = grid.spacing();
    if (i == 0) return (-3.0 * F[a] + 4.0 * F[a + st] - F[a + 2 * st]) / (2.0 * h);
    if (i == n - 1) return (3.0 * F[a] - 4.0 * F[a - st] + F[a - 2 * st]) / (2.0 * h);
    return (F[a + st] - F[a - st]) / (2.0 * h);
}

double d2(std::span<const double> F, const MomentumGrid& grid, std::size_t a, int axis) {
    const int n = grid.n_axis();
    const int i = grid.multi_index(a)[axis];
    const std::size_t st = grid.stride(axis);
    const double h2 = grid.spacing() * grid.spacing();
    if (i == 0) return (2.0 * F[a] - 5.0 * F[a + st] + 4.0 * F[a + 2 * st] - F[a + 3 * st]) / h2;
    if (i == n - 1) return (2.0 * F[a] - 5.0 * F[a - st] + 4.0 * F[a - 2 * st] - F[a - 3 * st]) / h2;
    return (F[a + st] - 2.0 * F[a] + F[a - st]) / h2;
}
}  // namespace

std::vector<double> central_gradient(std::span<const double> F, const MomentumGrid& grid) {
    const std::size_t np = grid.size();
    std::vector<double> g(3 * np);
    for (int k = 0; k < 3; ++k)
        for (std::size_t a = 0; a < np; ++a) g[k * np + a] = d1(F, grid, a, k);
    return g;
}

std::vector<Eigen::Matrix3d> central_hessian(std::span<const double> F, const MomentumGrid& grid) {
    const std::size_t np = grid.size();
    const auto g = central_gradient(F, grid);
    std::vector<Eigen::Matrix3d> H(np);
    for (std::size_t a = 0; a < np; ++a) {
        for (int k = 0; k < 3; ++k) H[a](k, k) = d2(F, grid, a, k);
        for (int k = 0; k < 3; ++k)
            for (int l = k + 1; l < 3; ++l) {
                // mixed derivative as the composition of the two first-derivative stencils
                const double v = d1(std::span<const double>(g.data() + l * np, np), grid, a, k);
                H[a](k, l) = H[a](l, k) = v;
            }
    }
    return H;
}

NonDivergenceForm nondivergence_form(std::span<const double> F, const MomentumGrid& grid, double eta) {
    const std::size_t np = grid.size();
    if (F.size() != np) throw std::invalid_argument("nondivergence_form: shape mismatch");
    const auto gF = central_gradient(F, grid);
    NonDivergenceForm nd;
    nd.diffusion.assign(np, Eigen::Matrix3d::Zero());
    nd.drift.assign(np, Vec3{0, 0, 0});
    nd.reaction.assign(np, 0.0);
    const auto& w = grid.weights();
    parallel_for(np, [&](std::size_t a) {
        const Vec3& p = grid.p(a);
        const double dlt = 1e-5 * std::max(1.0, std::sqrt(norm2(p)));
        Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
        Eigen::Vector3d drift = Eigen::Vector3d::Zero();
        double react = 0.0;
        for (std::size_t b = 0; b < np; ++b) {
            if (b == a) continue;
            const Vec3& q = grid.p(b);
            const double wf = w[b] * F[b];
            const Eigen::Matrix3d phi = kernel_phi(p, q, eta).phi;
            D += wf * phi;
            // d_{p_i} Phi^{ij} by central differences in p
            Eigen::Vector3d divphi = Eigen::Vector3d::Zero();
            for (int i = 0; i < 3; ++i) {
                Vec3 pp = p, pm = p;
                pp[i] += dlt;
                pm[i] -= dlt;
                const Eigen::Matrix3d dphi = (kernel_phi(pp, q, eta).phi - kernel_phi(pm, q, eta).phi) / (2.0 * dlt);
                divphi += dphi.row(i).transpose();
            }
            const Eigen::Vector3d gq(gF[b], gF[np + b], gF[2 * np + b]);
            drift += wf * divphi - w[b] * (phi * gq);
            const double rm1 = rho_minus_one(p, q);
            const double rho = 1.0 + rm1;
            const double g = rm1 * (rho + 1.0);
            react += w[b] * 4.0 * (-rho) / (grid.p0(a) * grid.p0(b)) / std::sqrt(g + eta * eta) * F[b];
        }
        nd.diffusion[a] = D;
        nd.drift[a] = {drift[0], drift[1], drift[2]};
        nd.reaction[a] = react + kappa(p) * F[a];
    });
    return nd;
}

std::vector<double> nondivergence_apply(const NonDivergenceForm& nd, std::span<const double> F, const MomentumGrid& grid) {
    const std::size_t np = grid.size();
    const auto gF = central_gradient(F, grid);
    const auto H = central_hessian(F, grid);
    std::vector<double> out(np);
    for (std::size_t a = 0; a < np; ++a) {
        double s = (nd.diffusion[a].cwiseProduct(H[a])).sum();
        for (int j = 0; j < 3; ++j) s += nd.drift[a][j] * gF[j * np + a];
        out[a] = s + nd.reaction[a] * F[a];
    }
    return out;
}

}  // namespace landau
