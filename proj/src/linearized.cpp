#include "landau/linearized.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "landau/errors.hpp"
#include "landau/parallel.hpp"

namespace landau {

double weight_value(const WeightSpec& spec, double t, const Vec3& p) {
    if (t < 0.0) throw std::invalid_argument("weight_value: t must be >= 0");
    const double p0 = energy_of(p);
    const double L = std::log(M_E + t);
    return std::pow(p0, 2.0 * (spec.N0 - spec.ell)) * std::exp(p0 / (5.0 * spec.T * L));
}

double rate_Y(double T, double t) {
    if (t < 0.0) throw std::invalid_argument("rate_Y: t must be >= 0");
    const double L = std::log(M_E + t);
    return 1.0 / (5.0 * T * (M_E + t) * L * L);
}

Eigen::Matrix3d collision_frequency_sigma(const CellState& s, const Vec3& p, const MomentumGrid& grid, double eta) {
    Eigen::Matrix3d sig = Eigen::Matrix3d::Zero();
    const double floor2 = std::max(eta * eta, 1e-24);
    for (std::size_t b = 0; b < grid.size(); ++b) {
        const Vec3& q = grid.p(b);
        const double rm1 = rho_minus_one(p, q);
        if (rm1 * (rm1 + 2.0) < floor2) continue;
        sig += (grid.weight(b) * juttner(s, q)) * kernel_phi(p, q, eta).phi;
    }
    return sig;
}

// ---------------------------------------------------------------------------

LinearizedOperator::LinearizedOperator(const CollisionOperator& op, const LinearizedOptions& opt) : op_(&op), opt_(opt) {
    if (!(opt.cg_tol > 0.0)) throw std::invalid_argument("linearized.cg_tol must be positive");
    if (opt.cg_max_iter < 1) throw std::invalid_argument("linearized.cg_max_iter must be >= 1");
}

std::shared_ptr<const CellContext> LinearizedOperator::prepare(const CellState& s) const {
    return prepare(std::span<const CellState>(&s, 1)).front();
}

std::vector<std::shared_ptr<const CellContext>> LinearizedOperator::prepare(std::span<const CellState> states) const {
    const std::size_t np = this->np(), nc = states.size();
    const auto& grid = this->grid();
    const auto& w = grid.weights();
    std::vector<std::shared_ptr<CellContext>> ctx(nc);
    parallel_for(nc, [&](std::size_t c) {
        ctx[c] = std::make_shared<CellContext>();
        ctx[c]->ref = op_->reference(states[c]);
    });

    std::vector<double> Z(np * nc), S(6 * np * nc);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t a = 0; a < np; ++a) Z[c * np + a] = w[a] * ctx[c]->ref.M[a];
    for (int fam = 0; fam < 2; ++fam) {
        std::vector<KernelTable::Job> jobs;
        for (int b = 0; b < 6; ++b) jobs.push_back({b, Z.data(), S.data() + b * np * nc, 0.0});
        op_->table().multiply(fam, jobs, static_cast<int>(nc));
        for (std::size_t c = 0; c < nc; ++c) {
            auto& sg = ctx[c]->sigma[fam];
            sg.resize(6 * np);
            for (int b = 0; b < 6; ++b) std::copy_n(S.data() + (b * nc + c) * np, np, sg.data() + b * np);
        }
    }

    parallel_for(nc, [&](std::size_t c) {
        CellContext& cx = *ctx[c];
        cx.sigma_bar.resize(6 * np);
        for (std::size_t i = 0; i < 6 * np; ++i) cx.sigma_bar[i] = 0.5 * (cx.sigma[0][i] + cx.sigma[1][i]);
        for (int j = 0; j < 5; ++j) cx.basis[j].resize(np);
        for (std::size_t a = 0; a < np; ++a) {
            const double s = cx.ref.sqrtM[a];
            cx.basis[0][a] = s;
            for (int k = 0; k < 3; ++k) cx.basis[1 + k][a] = grid.p(a)[k] * s;
            cx.basis[4][a] = grid.p0(a) * s;
        }
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j <= i; ++j) cx.gram(i, j) = cx.gram(j, i) = inner(cx.basis[i].data(), cx.basis[j].data());
        // scale-free conditioning check
        const Eigen::VectorXd d = cx.gram.diagonal().cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd Gs = d.asDiagonal() * cx.gram * d.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs);
        if (!(es.eigenvalues()(0) > 1e-12 * es.eigenvalues()(4)))
            throw NumericalFailure("project_P: Gram matrix ill-conditioned (grid too coarse or T0 out of range)");
        cx.gram_ldlt.compute(cx.gram);

        // diagonal of the local part in the w-inner product
        cx.diag_A.assign(np, 0.0);
        for (int fam = 0; fam < 2; ++fam) {
            const Stencil& st = op_->stencil(fam);
            const auto& sg = cx.sigma[fam];
            for (std::size_t a = 0; a < np; ++a) {
                Stencil::Row r[3];
                for (int k = 0; k < 3; ++k) r[k] = st.row(a, k);
                const double wm = w[a] * cx.ref.M[a];
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double s = sg[KernelTable::block_index(k, l) * np + a] * wm;
                        const std::size_t ck[2] = {r[k].c0, r[k].c1}, cl[2] = {r[l].c0, r[l].c1};
                        const double vk[2] = {r[k].v0, r[k].v1}, vl[2] = {r[l].v0, r[l].v1};
                        for (int e = 0; e < 2; ++e)
                            for (int f = 0; f < 2; ++f)
                                if (ck[e] == cl[f]) cx.diag_A[ck[e]] += 0.5 * s * vk[e] * vl[f] / cx.ref.M[ck[e]];
                    }
            }
        }
        for (std::size_t a = 0; a < np; ++a) cx.diag_A[a] /= w[a];
    });
    return {ctx.begin(), ctx.end()};
}

double LinearizedOperator::inner(const double* f, const double* g) const {
    const std::size_t np = this->np();
    std::vector<double> t(np);
    const auto& w = grid().weights();
    for (std::size_t a = 0; a < np; ++a) t[a] = w[a] * f[a] * g[a];
    return pairwise_sum(t);
}

// ---------------------------------------------------------------------------

void LinearizedOperator::apply_parts(const double* f, Ctxs ctxs, double* out, bool local, bool nonlocal) const {
    const std::size_t np = this->np(), nc = ctxs.size();
    const auto& w = grid().weights();
    std::fill(out, out + np * nc, 0.0);
    std::vector<double> X(3 * np * nc), Zw(nonlocal ? 3 * np * nc : 0), Y(nonlocal ? 3 * np * nc : 0);
    for (int fam = 0; fam < 2; ++fam) {
        const Stencil& st = op_->stencil(fam);
        parallel_for(nc, [&](std::size_t c) {
            const CellContext& cx = *ctxs[c];
            std::vector<double> phi(np), g(3 * np);
            for (std::size_t a = 0; a < np; ++a) phi[a] = f[c * np + a] / cx.ref.sqrtM[a];
            st.grad(phi.data(), g.data());
            for (int k = 0; k < 3; ++k)
                for (std::size_t a = 0; a < np; ++a) {
                    X[(k * nc + c) * np + a] = g[k * np + a];
                    if (nonlocal) Zw[(k * nc + c) * np + a] = w[a] * cx.ref.M[a] * g[k * np + a];
                }
        });
        if (nonlocal) {
            std::vector<KernelTable::Job> jobs;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    jobs.push_back({KernelTable::block_index(k, l), Zw.data() + l * np * nc, Y.data() + k * np * nc, l == 0 ? 0.0 : 1.0});
            op_->table().multiply(fam, jobs, static_cast<int>(nc));
        }
        parallel_for(nc, [&](std::size_t c) {
            const CellContext& cx = *ctxs[c];
            const auto& sg = cx.sigma[fam];
            std::vector<double> flux(3 * np, 0.0), dv(np);
            for (int k = 0; k < 3; ++k)
                for (std::size_t a = 0; a < np; ++a) {
                    double s = 0.0;
                    if (local)
                        for (int l = 0; l < 3; ++l) s += sg[KernelTable::block_index(k, l) * np + a] * X[(l * nc + c) * np + a];
                    if (nonlocal) s -= Y[(k * nc + c) * np + a];
                    flux[k * np + a] = cx.ref.M[a] * s;
                }
            st.div(flux.data(), dv.data());
            for (std::size_t a = 0; a < np; ++a) out[c * np + a] -= 0.5 * dv[a] / cx.ref.sqrtM[a];
        });
    }
}

void LinearizedOperator::apply_L(const double* f, Ctxs ctxs, double* out) const { apply_parts(f, ctxs, out, true, true); }

void LinearizedOperator::apply_A(const double* f, Ctxs ctxs, double* out) const {
    apply_parts(f, ctxs, out, true, false);
    for (std::size_t i = 0; i < np() * ctxs.size(); ++i) out[i] = -out[i];
}

void LinearizedOperator::apply_K(const double* f, Ctxs ctxs, double* out) const {
    apply_parts(f, ctxs, out, false, true);
    for (std::size_t i = 0; i < np() * ctxs.size(); ++i) out[i] = -out[i];
}

void LinearizedOperator::apply_Gamma(const double* f, const double* g, Ctxs ctxs, double* out) const {
    const std::size_t np = this->np(), nc = ctxs.size();
    std::vector<double> F(np * nc), G(np * nc);
    std::vector<const LocalMaxwellian*> refs(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        refs[c] = &ctxs[c]->ref;
        for (std::size_t a = 0; a < np; ++a) {
            F[c * np + a] = ctxs[c]->ref.sqrtM[a] * f[c * np + a];
            G[c * np + a] = ctxs[c]->ref.sqrtM[a] * g[c * np + a];
        }
    }
    op_->bilinear(F.data(), G.data(), refs, out);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t a = 0; a < np; ++a) out[c * np + a] /= ctxs[c]->ref.sqrtM[a];
}

namespace {
template <class Fn>
std::vector<double> single(std::size_t np, const CellContext& ctx, Fn&& fn) {
    std::vector<double> out(np);
    const CellContext* p = &ctx;
    fn(std::span<const CellContext* const>(&p, 1), out.data());
    return out;
}
}  // namespace

std::vector<double> LinearizedOperator::apply_L(std::span<const double> f, const CellContext& ctx) const {
    if (f.size() != np()) throw std::invalid_argument("apply_L: shape mismatch");
    return single(np(), ctx, [&](Ctxs c, double* o) { apply_L(f.data(), c, o); });
}
std::vector<double> LinearizedOperator::apply_A(std::span<const double> f, const CellContext& ctx) const {
    if (f.size() != np()) throw std::invalid_argument("apply_A: shape mismatch");
    return single(np(), ctx, [&](Ctxs c, double* o) { apply_A(f.data(), c, o); });
}
std::vector<double> LinearizedOperator::apply_K(std::span<const double> f, const CellContext& ctx) const {
    if (f.size() != np()) throw std::invalid_argument("apply_K: shape mismatch");
    return single(np(), ctx, [&](Ctxs c, double* o) { apply_K(f.data(), c, o); });
}
std::vector<double> LinearizedOperator::apply_Gamma(std::span<const double> f, std::span<const double> g, const CellContext& ctx) const {
    if (f.size() != np() || g.size() != np()) throw std::invalid_argument("apply_Gamma: shape mismatch");
    return single(np(), ctx, [&](Ctxs c, double* o) { apply_Gamma(f.data(), g.data(), c, o); });
}

// ---------------------------------------------------------------------------

Abc LinearizedOperator::project_P(std::span<const double> f, const CellContext& ctx) const {
    if (f.size() != np()) throw std::invalid_argument("project_P: shape mismatch");
    Eigen::Matrix<double, 5, 1> rhs;
    for (int j = 0; j < 5; ++j) rhs[j] = inner(ctx.basis[j].data(), f.data());
    return Abc::from(ctx.gram_ldlt.solve(rhs));
}

std::vector<double> LinearizedOperator::reconstruct(const Abc& c, const CellContext& ctx) const {
    const std::size_t np = this->np();
    std::vector<double> out(np);
    const auto v = c.vec();
    for (std::size_t a = 0; a < np; ++a) {
        double s = 0.0;
        for (int j = 0; j < 5; ++j) s += v[j] * ctx.basis[j][a];
        out[a] = s;
    }
    return out;
}

void LinearizedOperator::remove_macro(double* f, const CellContext& ctx) const {
    const auto pf = reconstruct(project_P(std::span<const double>(f, np()), ctx), ctx);
    for (std::size_t a = 0; a < np(); ++a) f[a] -= pf[a];
}

double LinearizedOperator::sigma_norm2(std::span<const double> f, const CellContext& ctx) const {
    const std::size_t np = this->np();
    if (f.size() != np) throw std::invalid_argument("sigma_norm: shape mismatch");
    const auto& grid = this->grid();
    std::vector<double> g(3 * np), t(np);
    double total = 0.0;
    for (int fam = 0; fam < 2; ++fam) {
        op_->stencil(fam).grad(f.data(), g.data());
        const auto& sg = ctx.sigma[fam];
        for (std::size_t a = 0; a < np; ++a) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) s += g[k * np + a] * sg[KernelTable::block_index(k, l) * np + a] * g[l * np + a];
            t[a] = s;
        }
        total += 0.5 * integrate_p(t, grid);
    }
    const double T0 = ctx.ref.state.T0;
    for (std::size_t a = 0; a < np; ++a) {
        const Vec3& ph = grid.phat(a);
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) s += ph[k] * ctx.sigma_bar[KernelTable::block_index(k, l) * np + a] * ph[l];
        t[a] = s * f[a] * f[a] / (T0 * T0);
    }
    total += integrate_p(t, grid);
    return std::max(0.0, total);
}

double LinearizedOperator::sigma_norm(std::span<const double> f, const CellContext& ctx) const { return std::sqrt(sigma_norm2(f, ctx)); }

// ---------------------------------------------------------------------------

std::vector<double> LinearizedOperator::dense_symmetric(const CellContext& ctx) const {
    const std::size_t np = this->np();
    const auto& w = grid().weights();
    std::vector<double> S(np * np, 0.0), T(np * np);
    std::vector<double> wm(np), scale(np);
    for (std::size_t a = 0; a < np; ++a) {
        wm[a] = w[a] * ctx.ref.M[a];
        scale[a] = 1.0 / (ctx.ref.sqrtM[a] * std::sqrt(w[a]));  // columns of E W^{-1/2}
    }
    for (int fam = 0; fam < 2; ++fam) {
        const Stencil& st = op_->stencil(fam);
        std::vector<Stencil::Row> rows(3 * np);
        for (int k = 0; k < 3; ++k)
            for (std::size_t a = 0; a < np; ++a) rows[k * np + a] = st.row(a, k);
        const auto& sg = ctx.sigma[fam];
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                const int blk = KernelTable::block_index(k, l);
                const double* B = op_->table().block_data(fam, blk);
                if (!B) throw NumericalFailure("dense_symmetric: kernel table is streamed; dense assembly unavailable");
                // T = Q_kl Etilde_l, row i of T gathers Q(i,a) onto the two columns of row (a,l)
                parallel_for(np, [&](std::size_t i) {
                    double* Ti = T.data() + i * np;
                    std::fill(Ti, Ti + np, 0.0);
                    const double* Bi = B + i * np;
                    for (std::size_t a = 0; a < np; ++a) {
                        double q = -wm[i] * Bi[a] * wm[a];
                        if (a == i) q += wm[a] * sg[blk * np + a];
                        const auto& r = rows[l * np + a];
                        Ti[r.c0] += q * r.v0 * scale[r.c0];
                        Ti[r.c1] += q * r.v1 * scale[r.c1];
                    }
                });
                // S += 1/2 Etilde_k^T T, scattered row-wise; parallel over column strips
                const std::size_t strip = 256;
                parallel_for((np + strip - 1) / strip, [&](std::size_t sidx) {
                    const std::size_t j0 = sidx * strip, j1 = std::min(np, j0 + strip);
                    for (std::size_t a = 0; a < np; ++a) {
                        const auto& r = rows[k * np + a];
                        const double e0 = 0.5 * r.v0 * scale[r.c0], e1 = 0.5 * r.v1 * scale[r.c1];
                        const double* Ta = T.data() + a * np;
                        double* S0 = S.data() + r.c0 * np;
                        double* S1 = S.data() + r.c1 * np;
                        for (std::size_t j = j0; j < j1; ++j) {
                            S0[j] += e0 * Ta[j];
                            S1[j] += e1 * Ta[j];
                        }
                    }
                });
            }
    }
    // symmetrize round-off
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = i + 1; j < np; ++j) {
            const double m = 0.5 * (S[i * np + j] + S[j * np + i]);
            S[i * np + j] = S[j * np + i] = m;
        }
    return S;
}

std::vector<double> LinearizedOperator::dense_sigma_symmetric(const CellContext& ctx) const {
    const std::size_t np = this->np();
    const auto& grid = this->grid();
    std::vector<double> S(np * np, 0.0), isw(np);
    for (std::size_t a = 0; a < np; ++a) isw[a] = 1.0 / std::sqrt(grid.weight(a));
    for (int fam = 0; fam < 2; ++fam) {
        const Stencil& st = op_->stencil(fam);
        const auto& sg = ctx.sigma[fam];
        for (std::size_t a = 0; a < np; ++a) {
            std::array<Stencil::Row, 3> r;
            for (int k = 0; k < 3; ++k) r[k] = st.row(a, k);
            const double wa = 0.5 * grid.weight(a);
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double q = wa * sg[KernelTable::block_index(k, l) * np + a];
                    const std::size_t ck[2] = {r[k].c0, r[k].c1}, cl[2] = {r[l].c0, r[l].c1};
                    const double vk[2] = {r[k].v0, r[k].v1}, vl[2] = {r[l].v0, r[l].v1};
                    for (int u = 0; u < 2; ++u)
                        for (int v = 0; v < 2; ++v) S[ck[u] * np + cl[v]] += q * vk[u] * vl[v] * isw[ck[u]] * isw[cl[v]];
                }
        }
    }
    const double T0 = ctx.ref.state.T0;
    for (std::size_t a = 0; a < np; ++a) {
        const Vec3& ph = grid.phat(a);
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) s += ph[k] * ctx.sigma_bar[KernelTable::block_index(k, l) * np + a] * ph[l];
        S[a * np + a] += s / (T0 * T0);  // w_a cancels against the two W^{-1/2}
    }
    return S;
}

CoercivityFit coercivity_spectrum(const LinearizedOperator& L, const CellContext& ctx) {
    const lapack_int np = static_cast<lapack_int>(L.np());
    const lapack_int m = np - 5;
    auto A = L.dense_symmetric(ctx);
    auto B = L.dense_sigma_symmetric(ctx);
    // Householder basis whose last np-5 columns span the w-orthogonal complement of N
    std::vector<double> V(static_cast<std::size_t>(np) * 5), tau(5);
    for (int q = 0; q < 5; ++q)
        for (lapack_int a = 0; a < np; ++a) V[q * np + a] = ctx.basis[q][a] * std::sqrt(L.grid().weight(a));
    int info = LAPACKE_dgeqrf(LAPACK_COL_MAJOR, np, 5, V.data(), np, tau.data());
    for (auto* X : {&A, &B}) {
        if (info == 0) info = LAPACKE_dormqr(LAPACK_COL_MAJOR, 'L', 'T', np, np, 5, V.data(), np, tau.data(), X->data(), np);
        if (info == 0) info = LAPACKE_dormqr(LAPACK_COL_MAJOR, 'R', 'N', np, np, 5, V.data(), np, tau.data(), X->data(), np);
    }
    if (info != 0) throw NumericalFailure("coercivity: null-space reduction failed (info=" + std::to_string(info) + ")");
    std::vector<double> A2(static_cast<std::size_t>(m) * m), B2(static_cast<std::size_t>(m) * m), lam(m);
    for (lapack_int j = 0; j < m; ++j)
        for (lapack_int i = 0; i < m; ++i) {
            A2[j * m + i] = A[(j + 5) * np + i + 5];
            B2[j * m + i] = B[(j + 5) * np + i + 5];
        }
    info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'N', 'U', m, A2.data(), m, B2.data(), m, lam.data());
    if (info != 0) throw NumericalFailure("coercivity: generalized eigenproblem failed (info=" + std::to_string(info) + ")");
    CoercivityFit r;
    r.delta = lam.front();
    r.largest = lam.back();
    return r;
}

SpectralPreconditioner::SpectralPreconditioner(const LinearizedOperator& L, const CellContext& ctx) : state_(ctx.ref.state) {
    np_ = L.np();
    V_ = L.dense_symmetric(ctx);
    lambda_.resize(np_);
    const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(np_), V_.data(), static_cast<lapack_int>(np_),
                                    lambda_.data());
    if (info != 0) throw NumericalFailure("spectral preconditioner: eigen-decomposition failed (info=" + std::to_string(info) + ")");
    wsqrt_.resize(np_);
    for (std::size_t a = 0; a < np_; ++a) wsqrt_[a] = std::sqrt(L.grid().weight(a));
}

void SpectralPreconditioner::apply(const double* r, double* z, int ncols, double shift, double scale) const {
    const int n = static_cast<int>(np_);
    std::vector<double> x(np_ * ncols), y(np_ * ncols);
    for (int c = 0; c < ncols; ++c)
        for (std::size_t a = 0; a < np_; ++a) x[c * np_ + a] = wsqrt_[a] * r[c * np_ + a];
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, n, ncols, n, 1.0, V_.data(), n, x.data(), n, 0.0, y.data(), n);
    for (int c = 0; c < ncols; ++c)
        for (std::size_t i = 0; i < np_; ++i) {
            // the five null modes are the smallest eigenvalues (ascending order)
            const double d = shift + scale * lambda_[i];
            y[c * np_ + i] = (shift == 0.0 && i < 5) ? 0.0 : y[c * np_ + i] / d;
        }
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, ncols, n, 1.0, V_.data(), n, y.data(), n, 0.0, x.data(), n);
    for (int c = 0; c < ncols; ++c)
        for (std::size_t a = 0; a < np_; ++a) z[c * np_ + a] = x[c * np_ + a] / wsqrt_[a];
}

// ---------------------------------------------------------------------------

template <class Op>
std::vector<SolveReport> LinearizedOperator::pcg(const double* r, Ctxs ctxs, double* u, bool project, Op&& op,
                                                 const SpectralPreconditioner* pre, double shift, double scale) const {
    const std::size_t np = this->np(), nc = ctxs.size();
    std::vector<SolveReport> rep(nc);
    std::vector<double> R(r, r + np * nc), Z(np * nc), P(np * nc), Q(np * nc);
    std::fill(u, u + np * nc, 0.0);
    std::vector<double> rnorm0(nc), rz(nc);
    std::vector<char> active(nc, 1);

    auto precond = [&]() {
        if (pre) {
            pre->apply(R.data(), Z.data(), static_cast<int>(nc), shift, scale);
        } else if (opt_.precond == Preconditioner::None) {
            Z = R;
        } else {
            for (std::size_t c = 0; c < nc; ++c)
                for (std::size_t a = 0; a < np; ++a) Z[c * np + a] = R[c * np + a] / (shift + scale * ctxs[c]->diag_A[a]);
        }
        if (project)
            for (std::size_t c = 0; c < nc; ++c) remove_macro(Z.data() + c * np, *ctxs[c]);
    };

    for (std::size_t c = 0; c < nc; ++c) {
        if (project) remove_macro(R.data() + c * np, *ctxs[c]);
        rnorm0[c] = std::sqrt(inner(r + c * np, r + c * np));
        if (rnorm0[c] == 0.0) {
            active[c] = 0;
            rep[c].converged = true;
        }
    }
    precond();
    P = Z;
    for (std::size_t c = 0; c < nc; ++c) rz[c] = inner(R.data() + c * np, Z.data() + c * np);

    const double target = 0.5 * opt_.cg_tol;  // recursive residual drifts a little from the true one
    for (int it = 1; it <= opt_.cg_max_iter; ++it) {
        if (std::none_of(active.begin(), active.end(), [](char x) { return x; })) break;
        op(P.data(), Q.data());
        for (std::size_t c = 0; c < nc; ++c) {
            if (!active[c]) continue;
            double* Pc = P.data() + c * np;
            double* Qc = Q.data() + c * np;
            double* Rc = R.data() + c * np;
            const double pq = inner(Pc, Qc);
            if (!(pq > 0.0)) {  // breakdown: operator not positive on this direction
                active[c] = 0;
                continue;
            }
            const double alpha = rz[c] / pq;
            for (std::size_t a = 0; a < np; ++a) {
                u[c * np + a] += alpha * Pc[a];
                Rc[a] -= alpha * Qc[a];
            }
            if (project) remove_macro(Rc, *ctxs[c]);
            rep[c].iterations = it;
            if (std::sqrt(inner(Rc, Rc)) <= target * rnorm0[c]) {
                active[c] = 0;
                rep[c].converged = true;
            }
        }
        precond();
        for (std::size_t c = 0; c < nc; ++c) {
            double* Pc = P.data() + c * np;
            if (!active[c]) {
                std::fill(Pc, Pc + np, 0.0);
                continue;
            }
            const double rzn = inner(R.data() + c * np, Z.data() + c * np);
            const double beta = rzn / rz[c];
            rz[c] = rzn;
            for (std::size_t a = 0; a < np; ++a) Pc[a] = Z[c * np + a] + beta * Pc[a];
        }
    }
    // true residuals
    if (project)
        for (std::size_t c = 0; c < nc; ++c) remove_macro(u + c * np, *ctxs[c]);
    op(u, Q.data());
    for (std::size_t c = 0; c < nc; ++c) {
        if (rnorm0[c] == 0.0) continue;
        double s = 0.0;
        std::vector<double> d(np);
        for (std::size_t a = 0; a < np; ++a) d[a] = Q[c * np + a] - r[c * np + a];
        s = std::sqrt(inner(d.data(), d.data()));
        rep[c].residual = s / rnorm0[c];
        rep[c].converged = rep[c].residual <= opt_.cg_tol;
    }
    return rep;
}

std::vector<SolveReport> LinearizedOperator::invert_L_on_orthogonal(const double* r, Ctxs ctxs, double* u,
                                                                    const SpectralPreconditioner* pre) const {
    const std::size_t np = this->np(), nc = ctxs.size();
    for (std::size_t c = 0; c < nc; ++c) {
        std::vector<double> pr(r + c * np, r + (c + 1) * np);
        const double nr = std::sqrt(inner(pr.data(), pr.data()));
        remove_macro(pr.data(), *ctxs[c]);
        std::vector<double> d(np);
        for (std::size_t a = 0; a < np; ++a) d[a] = r[c * np + a] - pr[a];
        const double npr = std::sqrt(inner(d.data(), d.data()));
        if (nr > 0.0 && npr > opt_.ortho_tol * nr)
            throw std::invalid_argument("invert_L_on_orthogonal: right-hand side not orthogonal to the null space (|Pr|/|r| = " +
                                        std::to_string(npr / nr) + ")");
    }
    return pcg(r, ctxs, u, true, [&](const double* x, double* y) { apply_L(x, ctxs, y); }, pre, 0.0, 1.0);
}

std::vector<double> LinearizedOperator::invert_L_on_orthogonal(std::span<const double> r, const CellContext& ctx, SolveReport* report,
                                                               const SpectralPreconditioner* pre) const {
    if (r.size() != np()) throw std::invalid_argument("invert_L_on_orthogonal: shape mismatch");
    std::vector<double> u(np());
    const CellContext* p = &ctx;
    auto rep = invert_L_on_orthogonal(r.data(), Ctxs(&p, 1), u.data(), pre);
    if (report) *report = rep[0];
    return u;
}

std::vector<SolveReport> LinearizedOperator::solve_shifted(const double* r, double tau, Ctxs ctxs, double* u,
                                                           const SpectralPreconditioner* pre) const {
    if (!(tau > 0.0)) throw std::invalid_argument("solve_shifted: tau must be positive");
    const std::size_t n = np() * ctxs.size();
    return pcg(
        r, ctxs, u, false,
        [&](const double* x, double* y) {
            apply_L(x, ctxs, y);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + tau * y[i];
        },
        pre, 1.0, tau);
}

}  // namespace landau
