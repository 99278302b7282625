#include "landau/hilbert_expansion.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "landau/errors.hpp"
#include "landau/parallel.hpp"

namespace landau {

void transport_apply(const DistField& F, const MomentumGrid& grid, const SpatialGrid& sg, double nu, DistField& out) {
    const std::size_t np = F.np();
    const int nc = static_cast<int>(F.cells());
    if (nc != sg.cells || np != grid.size()) throw std::invalid_argument("transport_apply: shape mismatch");
    out = DistField(np, nc);
    const double h = sg.h();
    parallel_for(nc, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        const double* fm2 = F.cell(sg.wrap(i - 2));
        const double* fm1 = F.cell(sg.wrap(i - 1));
        const double* f0 = F.cell(i);
        const double* fp1 = F.cell(sg.wrap(i + 1));
        const double* fp2 = F.cell(sg.wrap(i + 2));
        double* o = out.cell(i);
        for (std::size_t a = 0; a < np; ++a)
            o[a] = grid.phat(a)[0] * (fp1[a] - fm1[a]) / (2.0 * h) + (nu / h) * (fp2[a] - 4.0 * fp1[a] + 6.0 * f0[a] - 4.0 * fm1[a] + fm2[a]);
    });
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

std::array<double, 5> chi(const MomentumGrid& g, std::size_t a) { return {1.0, g.p(a)[0], g.p(a)[1], g.p(a)[2], g.p0(a)}; }

double l2_norm(const DistField& F, const MomentumGrid& grid, double h) {
    std::vector<double> t(F.data().size());
    const std::size_t np = F.np();
    for (std::size_t i = 0; i < F.cells(); ++i)
        for (std::size_t a = 0; a < np; ++a) t[i * np + a] = h * grid.weight(a) * F(i, a) * F(i, a);
    return std::sqrt(pairwise_sum(t));
}

// fourth-order first derivative over uniformly spaced samples, one-sided near the ends
double fd4(const std::vector<const double*>& f, std::size_t j, std::size_t a, double tau) {
    const std::size_t J = f.size();
    auto v = [&](std::size_t k) { return f[k][a]; };
    if (j >= 2 && j + 2 < J) return (-v(j + 2) + 8.0 * v(j + 1) - 8.0 * v(j - 1) + v(j - 2)) / (12.0 * tau);
    if (j == 0) return (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4)) / (12.0 * tau);
    if (j == 1) return (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4)) / (12.0 * tau);
    if (j == J - 1) return (25.0 * v(J - 1) - 48.0 * v(J - 2) + 36.0 * v(J - 3) - 16.0 * v(J - 4) + 3.0 * v(J - 5)) / (12.0 * tau);
    return (3.0 * v(J - 1) + 10.0 * v(J - 2) - 18.0 * v(J - 3) + 6.0 * v(J - 4) - v(J - 5)) / (12.0 * tau);
}

std::vector<const LocalMaxwellian*> refs_of(const std::vector<std::shared_ptr<const CellContext>>& ctx) {
    std::vector<const LocalMaxwellian*> r(ctx.size());
    for (std::size_t c = 0; c < ctx.size(); ++c) r[c] = &ctx[c]->ref;
    return r;
}

std::vector<const CellContext*> raw(const std::vector<std::shared_ptr<const CellContext>>& ctx) {
    std::vector<const CellContext*> r(ctx.size());
    for (std::size_t c = 0; c < ctx.size(); ++c) r[c] = ctx[c].get();
    return r;
}

}  // namespace

HilbertBuilder::HilbertBuilder(const LinearizedOperator& L, const EulerSolver& euler, const HilbertOptions& opt)
    : L_(&L), euler_(&euler), opt_(opt) {
    if (opt.k < 2) throw std::invalid_argument("hilbert.k must be >= 2");
    if (!(opt.decay_exponent > 0.0 && opt.decay_exponent < 1.0)) throw std::invalid_argument("hilbert.decay_exponent must lie in (0,1)");
    if (!dynamic_cast<const LatticeClosure*>(&euler.closure()))
        throw std::invalid_argument("HilbertBuilder: the backbone must use the lattice closure so the hierarchy is exactly solvable");
}

HilbertData HilbertBuilder::build(const FluidState& prim0, double tau, int nlevels, const SpectralPreconditioner* pre) const {
    if (nlevels < 5 || nlevels % 2 == 0) throw std::invalid_argument("HilbertBuilder: level count must be odd and >= 5");
    const auto& lat = dynamic_cast<const LatticeClosure&>(euler_->closure());
    const auto& grid = L_->grid();
    const auto& sg = euler_->grid();
    const std::size_t np = grid.size();
    const int nc = sg.cells;
    const double h = sg.h();
    const double nu = euler_->options().nu;
    const int K = 2 * opt_.k;  // number of coefficients F_0..F_{2k-1}
    const CollisionOperator& op = L_->collision();

    HilbertData D;
    D.k = opt_.k;
    D.tau = tau;
    D.radius = grid.radius();
    D.points_per_axis = grid.n_axis();
    D.cells = nc;
    D.length = sg.length;
    D.nu = nu;
    D.levels.resize(nlevels);

    // backbone
    std::vector<EulerState> states(nlevels);
    states[0] = euler_->make_state(prim0, 0.0);
    for (int j = 1; j < nlevels; ++j) states[j] = euler_->step(states[j - 1], tau);

    std::vector<std::vector<std::shared_ptr<const CellContext>>> ctx(nlevels);
    // per level and cell: Gram G, dG = <chi chi^T d_t M>, H = <chi chi^T p^_1 M>
    std::vector<std::vector<Mat5>> G(nlevels, std::vector<Mat5>(nc)), dG = G, H = G;
    for (int j = 0; j < nlevels; ++j) {
        auto& lv = D.levels[j];
        lv.t = states[j].t;
        lv.prim = states[j].prim;
        lv.dprim = euler_->primitive_rates(states[j]);
        std::vector<CellState> cs(nc);
        for (int i = 0; i < nc; ++i) cs[i] = lv.prim.cell(i);
        ctx[j] = L_->prepare(cs);
        lv.F.assign(K, DistField(np, nc));
        lv.micro.assign(K, DistField(np, nc));
        lv.dF.assign(K, DistField(np, nc));
        lv.abc.assign(K, std::vector<Abc>(nc));
        for (int i = 0; i < nc; ++i) {
            const auto& M = ctx[j][i]->ref.M;
            const auto dM = lat.dM(cs[i], M);
            double* F0 = lv.F[0].cell(i);
            double* dF0 = lv.dF[0].cell(i);
            for (std::size_t a = 0; a < np; ++a) {
                F0[a] = M[a];
                dF0[a] = dM[a] * lv.dprim[i][0] + dM[np + a] * lv.dprim[i][1] + dM[2 * np + a] * lv.dprim[i][2];
            }
            lv.abc[0][i] = Abc{1.0, {0, 0, 0}, 0.0};
            G[j][i] = ctx[j][i]->gram;
            Mat5 g2 = Mat5::Zero(), h2 = Mat5::Zero();
            std::vector<double> t(np);
            for (int r = 0; r < 5; ++r)
                for (int c = r; c < 5; ++c) {
                    for (std::size_t a = 0; a < np; ++a) {
                        const auto x = chi(grid, a);
                        t[a] = x[r] * x[c] * dF0[a];
                    }
                    g2(r, c) = g2(c, r) = integrate_p(t, grid);
                    for (std::size_t a = 0; a < np; ++a) {
                        const auto x = chi(grid, a);
                        t[a] = x[r] * x[c] * grid.phat(a)[0] * M[a];
                    }
                    h2(r, c) = h2(c, r) = integrate_p(t, grid);
                }
            dG[j][i] = g2;
            H[j][i] = h2;
        }
    }

    for (int n = 0; n + 1 < K; ++n) {
        const int m = n + 1;  // order being built
        // micro part at every level
        for (int j = 0; j < nlevels; ++j) {
            auto& lv = D.levels[j];
            const auto refs = refs_of(ctx[j]);
            DistField TF;
            transport_apply(lv.F[n], grid, sg, nu, TF);
            DistField r(np, nc);
            for (std::size_t q = 0; q < r.data().size(); ++q) r.data()[q] = lv.dF[n].data()[q] + TF.data()[q];
            DistField Cij(np, nc);
            for (int i = 1; i < m; ++i) {
                const int l = m - i;
                op.bilinear(lv.F[i].cell(0), lv.F[l].cell(0), refs, Cij.cell(0));
                for (std::size_t q = 0; q < r.data().size(); ++q) r.data()[q] -= Cij.data()[q];
            }
            for (int i = 0; i < nc; ++i) {
                const auto& sM = ctx[j][i]->ref.sqrtM;
                double* ri = r.cell(i);
                double rr = 0.0, mm = 0.0;
                for (std::size_t a = 0; a < np; ++a) {
                    ri[a] = -ri[a] / sM[a];
                    rr += grid.weight(a) * ri[a] * ri[a];
                    mm += grid.weight(a) * sM[a] * sM[a];
                }
                // a right-hand side at round-off (flat backbone) has no meaningful macro part
                if (std::sqrt(rr) <= 1e-13 * std::sqrt(mm)) L_->remove_macro(ri, *ctx[j][i]);
            }
            const auto cp = raw(ctx[j]);
            const auto rep = L_->invert_L_on_orthogonal(r.cell(0), cp, lv.micro[m].cell(0), pre);
            for (int i = 0; i < nc; ++i)
                if (!rep[i].converged)
                    throw NumericalFailure("hilbert: L^{-1} did not converge for order " + std::to_string(m) + " at level " +
                                           std::to_string(j) + " cell " + std::to_string(i) + " (residual " +
                                           std::to_string(rep[i].residual) + ")");
        }

        // macro part: W = <chi F_m> evolved by the projected order-m equation
        std::vector<std::vector<Vec5>> mflux(nlevels, std::vector<Vec5>(nc));
        for (int j = 0; j < nlevels; ++j)
            for (int i = 0; i < nc; ++i) {
                const auto& sM = ctx[j][i]->ref.sqrtM;
                const double* mu = D.levels[j].micro[m].cell(i);
                std::vector<double> t(np);
                for (int r = 0; r < 5; ++r) {
                    for (std::size_t a = 0; a < np; ++a) t[a] = chi(grid, a)[r] * grid.phat(a)[0] * sM[a] * mu[a];
                    mflux[j][i][r] = integrate_p(t, grid);
                }
            }
        auto R = [&](int j, const std::vector<Vec5>& W) {
            std::vector<Vec5> fl(nc), out(nc);
            for (int i = 0; i < nc; ++i) fl[i] = mflux[j][i] + H[j][i] * ctx[j][i]->gram_ldlt.solve(W[i]);
            for (int i = 0; i < nc; ++i) {
                auto w = [&](int k) -> const Vec5& { return W[sg.wrap(i + k)]; };
                out[i] = -(fl[sg.wrap(i + 1)] - fl[sg.wrap(i - 1)]) / (2.0 * h) - (nu / h) * (w(2) - 4.0 * w(1) + 6.0 * w(0) - 4.0 * w(-1) + w(-2));
            }
            return out;
        };
        auto axpy = [nc](const std::vector<Vec5>& a, double c, const std::vector<Vec5>& b) {
            std::vector<Vec5> r(nc);
            for (int i = 0; i < nc; ++i) r[i] = a[i] + c * b[i];
            return r;
        };
        std::vector<std::vector<Vec5>> W(nlevels, std::vector<Vec5>(nc, Vec5::Zero())), dW = W;
        for (int j = 0; j + 2 < nlevels; j += 2) {
            const auto k1 = R(j, W[j]);
            const auto k2 = R(j + 1, axpy(W[j], tau, k1));
            const auto k3 = R(j + 1, axpy(W[j], tau, k2));
            const auto k4 = R(j + 2, axpy(W[j], 2.0 * tau, k3));
            for (int i = 0; i < nc; ++i) W[j + 2][i] = W[j][i] + (2.0 * tau / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        for (int j = 0; j < nlevels; j += 2) dW[j] = R(j, W[j]);
        for (int j = 1; j < nlevels; j += 2)
            for (int i = 0; i < nc; ++i)  // cubic Hermite midpoint
                W[j][i] = 0.5 * (W[j - 1][i] + W[j + 1][i]) + (2.0 * tau / 8.0) * (dW[j - 1][i] - dW[j + 1][i]);
        for (int j = 1; j < nlevels; j += 2) dW[j] = R(j, W[j]);

        // assemble F_m and d_t F_m
        std::vector<DistField> sm(nlevels, DistField(np, nc));
        for (int j = 0; j < nlevels; ++j)
            for (int i = 0; i < nc; ++i) {
                const auto& sM = ctx[j][i]->ref.sqrtM;
                const double* mu = D.levels[j].micro[m].cell(i);
                for (std::size_t a = 0; a < np; ++a) sm[j](i, a) = sM[a] * mu[a];
            }
        std::vector<const double*> sm_ptr(nlevels);
        for (int j = 0; j < nlevels; ++j) sm_ptr[j] = sm[j].data().data();
        for (int j = 0; j < nlevels; ++j) {
            auto& lv = D.levels[j];
            for (int i = 0; i < nc; ++i) {
                const auto& cx = *ctx[j][i];
                const Vec5 abc = cx.gram_ldlt.solve(W[j][i]);
                const Vec5 dabc = cx.gram_ldlt.solve(dW[j][i] - dG[j][i] * abc);
                lv.abc[m][i] = Abc::from(abc);
                const double* dM0 = lv.dF[0].cell(i);
                for (std::size_t a = 0; a < np; ++a) {
                    const auto x = chi(grid, a);
                    double pa = 0.0, pd = 0.0;
                    for (int r = 0; r < 5; ++r) {
                        pa += x[r] * abc[r];
                        pd += x[r] * dabc[r];
                    }
                    lv.F[m](i, a) = sm[j](i, a) + cx.ref.M[a] * pa;
                    lv.dF[m](i, a) = fd4(sm_ptr, j, i * np + a, tau) + dM0[a] * pa + cx.ref.M[a] * pd;
                }
            }
        }
    }

    // pieces of the remainder source
    for (int j = 0; j < nlevels; ++j) {
        auto& lv = D.levels[j];
        const auto refs = refs_of(ctx[j]);
        DistField Cij(np, nc);
        for (const auto& [i, l] : remainder_source_pairs(opt_.k)) {
            const int e = i + l - opt_.k;
            op.bilinear(lv.F[i].cell(0), lv.F[l].cell(0), refs, Cij.cell(0));
            auto it = lv.S_parts.find(e);
            if (it == lv.S_parts.end()) it = lv.S_parts.emplace(e, DistField(np, nc)).first;
            for (std::size_t q = 0; q < Cij.data().size(); ++q) it->second.data()[q] += Cij.data()[q];
        }
        for (int n = 0; n < K; ++n)
            if (!lv.F[n].all_finite()) throw NumericalFailure("hilbert: non-finite coefficient F_" + std::to_string(n));
    }
    return D;
}

std::vector<HierarchyResidual> HilbertBuilder::residuals(const HilbertData& data, int j) const {
    if (j < 1 || j + 1 >= static_cast<int>(data.levels.size())) throw std::invalid_argument("residuals: level must be interior");
    const auto& grid = L_->grid();
    const auto& sg = euler_->grid();
    const std::size_t np = grid.size();
    const int nc = sg.cells;
    const auto& lv = data.levels[j];
    const CollisionOperator& op = L_->collision();
    std::vector<LocalMaxwellian> refs(nc);
    std::vector<const LocalMaxwellian*> rp(nc);
    for (int i = 0; i < nc; ++i) {
        refs[i] = op.reference(lv.prim.cell(i));
        rp[i] = &refs[i];
    }
    std::vector<HierarchyResidual> out;
    const int K = data.orders();
    for (int n = 0; n + 1 < K; ++n) {
        DistField dt(np, nc), TF, C(np, nc), R(np, nc);
        for (std::size_t q = 0; q < dt.data().size(); ++q)
            dt.data()[q] = (data.levels[j + 1].F[n].data()[q] - data.levels[j - 1].F[n].data()[q]) / (2.0 * data.tau);
        transport_apply(lv.F[n], grid, sg, data.nu, TF);
        for (std::size_t q = 0; q < R.data().size(); ++q) R.data()[q] = dt.data()[q] + TF.data()[q];
        for (int i = 0; i <= n + 1; ++i) {
            op.bilinear(lv.F[i].cell(0), lv.F[n + 1 - i].cell(0), rp, C.cell(0));
            for (std::size_t q = 0; q < R.data().size(); ++q) R.data()[q] -= C.data()[q];
        }
        HierarchyResidual hr;
        hr.n = n;
        hr.t = lv.t;
        hr.residual = l2_norm(R, grid, sg.h());
        hr.scale = l2_norm(TF, grid, sg.h()) + l2_norm(dt, grid, sg.h());
        out.push_back(hr);
    }
    return out;
}

ExpansionCoefficient HilbertBuilder::coefficient(const HilbertData& data, int level, int n) const {
    const auto& lv = data.levels.at(level);
    ExpansionCoefficient ec;
    ec.n = n;
    ec.field = lv.F.at(n);
    ec.micro = lv.micro.at(n);
    ec.macro.cells = lv.abc.at(n);
    return ec;
}

ExpansionCoefficient build_f0(const FluidState& prim, const CollisionOperator& op) {
    const std::size_t np = op.np(), nc = prim.size();
    ExpansionCoefficient ec;
    ec.n = 0;
    ec.field = DistField(np, nc);
    ec.micro = DistField(np, nc);
    ec.macro.cells.assign(nc, Abc{1.0, {0, 0, 0}, 0.0});
    for (std::size_t i = 0; i < nc; ++i) {
        const auto M = juttner_on_grid(prim.cell(i), op.grid());
        std::copy(M.begin(), M.end(), ec.field.cell(i));
    }
    return ec;
}

std::vector<std::pair<int, int>> remainder_source_pairs(int k) {
    std::vector<std::pair<int, int>> out;
    for (int i = 2; i <= 2 * k - 1; ++i)
        for (int j = 2; j <= 2 * k - 1; ++j)
            if (i + j >= 2 * k + 1) out.emplace_back(i, j);
    return out;
}

RemainderSource remainder_source_S(const HilbertData& data, int level, double epsilon) {
    const auto& lv = data.levels.at(level);
    const std::size_t np = lv.F[0].np(), nc = lv.F[0].cells();
    RemainderSource rs{DistField(np, nc), DistField(np, nc)};
    for (const auto& [e, part] : lv.S_parts) {
        const double c = std::pow(epsilon, e);
        for (std::size_t q = 0; q < part.data().size(); ++q) rs.S.data()[q] += c * part.data()[q];
    }
    for (std::size_t q = 0; q < rs.S.data().size(); ++q) rs.Sbar.data()[q] = rs.S.data()[q] / std::sqrt(lv.F[0].data()[q]);
    return rs;
}

DecayReport decay_check(const HilbertData& data, int n, double beta, const MomentumGrid& grid) {
    if (n + 1 >= data.orders()) throw std::invalid_argument("decay_check: order out of range");
    DecayReport r;
    r.n = n;
    const std::size_t np = grid.size();
    const int nax = grid.n_axis();
    for (const auto& lv : data.levels) {
        const double growth = std::pow(1.0 + lv.t, n);
        for (std::size_t i = 0; i < lv.F[0].cells(); ++i)
            for (std::size_t a = 0; a < np; ++a) {
                const double ratio = std::abs(lv.F[n + 1](i, a)) / (growth * std::pow(lv.F[0](i, a), beta));
                if (ratio > r.C_fit) {
                    r.C_fit = ratio;
                    r.t_at_max = lv.t;
                    r.cell_at_max = static_cast<int>(i);
                    r.node_at_max = a;
                }
            }
    }
    if (r.cell_at_max >= 0) {
        const auto mi = grid.multi_index(r.node_at_max);
        r.p_at_max = std::sqrt(norm2(grid.p(r.node_at_max)));
        r.at_boundary = false;
        for (int d = 0; d < 3; ++d)
            if (mi[d] == 0 || mi[d] == nax - 1) r.at_boundary = true;
    }
    return r;
}

// ---------------------------------------------------------------------------
// binary snapshots

namespace {
constexpr char kMagic[8] = {'L', 'H', 'X', 'P', 'v', '0', '0', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw PrerequisiteMissing("hilbert snapshot truncated");
    return v;
}
void put_field(std::ostream& os, const DistField& f) {
    put<std::uint64_t>(os, f.np());
    put<std::uint64_t>(os, f.cells());
    os.write(reinterpret_cast<const char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double)));
}
DistField get_field(std::istream& is) {
    const auto np = get<std::uint64_t>(is);
    const auto nc = get<std::uint64_t>(is);
    if (np > (1u << 24) || nc > (1u << 20)) throw PrerequisiteMissing("hilbert snapshot corrupt");
    DistField f(np, nc);
    is.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    if (!is) throw PrerequisiteMissing("hilbert snapshot truncated");
    return f;
}
}  // namespace

void HilbertData::save(const std::string& path) const {
    for (const auto& lv : levels)
        if (lv.prim.size() != static_cast<std::size_t>(cells) || lv.dprim.size() != lv.prim.size() ||
            lv.F.size() != static_cast<std::size_t>(orders()) || lv.micro.size() != lv.F.size() || lv.dF.size() != lv.F.size() ||
            lv.abc.size() != lv.F.size())
            throw std::invalid_argument("HilbertData::save: level arrays do not match k and cells");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write(kMagic, sizeof(kMagic));
    put<std::int32_t>(os, k);
    put(os, tau);
    put(os, radius);
    put<std::int32_t>(os, points_per_axis);
    put<std::int32_t>(os, cells);
    put(os, length);
    put(os, nu);
    put(os, amplitude);
    put<std::uint64_t>(os, levels.size());
    for (const auto& lv : levels) {
        put(os, lv.t);
        for (std::size_t i = 0; i < lv.prim.size(); ++i) {
            put(os, lv.prim.n0[i]);
            put(os, lv.prim.u[i][0]);
            put(os, lv.prim.T0[i]);
            for (int c = 0; c < 3; ++c) put(os, lv.dprim[i][c]);
        }
        for (int n = 0; n < orders(); ++n) {
            put_field(os, lv.F[n]);
            put_field(os, lv.micro[n]);
            put_field(os, lv.dF[n]);
            for (const auto& abc : lv.abc[n]) {
                const auto v = abc.vec();
                for (int r = 0; r < 5; ++r) put(os, v[r]);
            }
        }
        put<std::uint64_t>(os, lv.S_parts.size());
        for (const auto& [e, f] : lv.S_parts) {
            put<std::int32_t>(os, e);
            put_field(os, f);
        }
    }
    if (!os) throw std::runtime_error("failed writing " + path);
}

HilbertData HilbertData::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw PrerequisiteMissing("hilbert snapshot not found: " + path + " (run hilbert-build first)");
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || !std::equal(magic, magic + 8, kMagic)) throw PrerequisiteMissing("not a hilbert snapshot: " + path);
    HilbertData d;
    d.k = get<std::int32_t>(is);
    d.tau = get<double>(is);
    d.radius = get<double>(is);
    d.points_per_axis = get<std::int32_t>(is);
    d.cells = get<std::int32_t>(is);
    d.length = get<double>(is);
    d.nu = get<double>(is);
    d.amplitude = get<double>(is);
    const auto nl = get<std::uint64_t>(is);
    d.levels.resize(nl);
    for (auto& lv : d.levels) {
        lv.t = get<double>(is);
        lv.prim = FluidState(d.cells);
        lv.dprim.resize(d.cells);
        for (int i = 0; i < d.cells; ++i) {
            lv.prim.n0[i] = get<double>(is);
            lv.prim.u[i] = {get<double>(is), 0.0, 0.0};
            lv.prim.T0[i] = get<double>(is);
            for (int c = 0; c < 3; ++c) lv.dprim[i][c] = get<double>(is);
        }
        lv.F.resize(d.orders());
        lv.micro.resize(d.orders());
        lv.dF.resize(d.orders());
        lv.abc.assign(d.orders(), std::vector<Abc>(d.cells));
        for (int n = 0; n < d.orders(); ++n) {
            lv.F[n] = get_field(is);
            lv.micro[n] = get_field(is);
            lv.dF[n] = get_field(is);
            for (auto& abc : lv.abc[n]) {
                Eigen::Matrix<double, 5, 1> v;
                for (int r = 0; r < 5; ++r) v[r] = get<double>(is);
                abc = Abc::from(v);
            }
        }
        const auto ns = get<std::uint64_t>(is);
        for (std::uint64_t s = 0; s < ns; ++s) {
            const int e = get<std::int32_t>(is);
            lv.S_parts.emplace(e, get_field(is));
        }
    }
    return d;
}

}  // namespace landau
