#include "landau/remainder_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "landau/errors.hpp"
#include "landau/parallel.hpp"

namespace landau {

DistField dx_field(const DistField& F, double h) {
    const std::size_t np = F.np();
    const int nc = static_cast<int>(F.cells());
    DistField out(np, nc);
    for (int i = 0; i < nc; ++i) {
        const double* fp = F.cell((i + 1) % nc);
        const double* fm = F.cell((i + nc - 1) % nc);
        double* o = out.cell(i);
        for (std::size_t a = 0; a < np; ++a) o[a] = (fp[a] - fm[a]) / (2.0 * h);
    }
    return out;
}

DistField dxx_field(const DistField& F, double h) {
    const std::size_t np = F.np();
    const int nc = static_cast<int>(F.cells());
    DistField out(np, nc);
    for (int i = 0; i < nc; ++i) {
        const double* fp = F.cell((i + 1) % nc);
        const double* f0 = F.cell(i);
        const double* fm = F.cell((i + nc - 1) % nc);
        double* o = out.cell(i);
        for (std::size_t a = 0; a < np; ++a) o[a] = (fp[a] - 2.0 * f0[a] + fm[a]) / (h * h);
    }
    return out;
}

namespace {

// h sum_i sum_a w_a (om_a F)^2
double wnorm2(const DistField& F, const MomentumGrid& grid, double h, const std::vector<double>* om = nullptr) {
    const std::size_t np = F.np();
    std::vector<double> t(F.data().size());
    for (std::size_t i = 0; i < F.cells(); ++i)
        for (std::size_t a = 0; a < np; ++a) {
            const double v = om ? (*om)[a] * F(i, a) : F(i, a);
            t[i * np + a] = h * grid.weight(a) * v * v;
        }
    return pairwise_sum(t);
}

std::vector<const CellContext*> raw(const std::vector<std::shared_ptr<const CellContext>>& c) {
    std::vector<const CellContext*> r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = c[i].get();
    return r;
}

std::vector<const LocalMaxwellian*> refs(const std::vector<std::shared_ptr<const CellContext>>& c) {
    std::vector<const LocalMaxwellian*> r(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) r[i] = &c[i]->ref;
    return r;
}

std::array<double, 14> zeta(const Vec3& p, double p0) {
    return {1.0,
            p[0], p[1], p[2],
            p0,
            p[0] / p0, p[1] / p0, p[2] / p0,
            p[0] * p[0] / p0, p[1] * p[1] / p0, p[2] * p[2] / p0,
            p[0] * p[1] / p0, p[0] * p[2] / p0, p[1] * p[2] / p0};
}

}  // namespace

double l2_xp2(const DistField& F, const MomentumGrid& grid, double h) { return wnorm2(F, grid, h); }

TimeStep resolve_time_step(double h, double dt, double t_final) {
    if (!(t_final > 0.0)) throw ConfigError("solver.t_final must be positive");
    TimeStep r;
    if (dt <= 0.0) {
        const double dtmax = std::min(0.4 * h, 0.1);
        r.steps = static_cast<int>(std::ceil(t_final / dtmax - 1e-9));
        r.dt = t_final / r.steps;
    } else {
        r.dt = dt;
        r.steps = static_cast<int>(std::lround(t_final / dt));
        if (r.steps < 1 || std::abs(r.steps * dt - t_final) > 1e-9 * t_final)
            throw ConfigError("solver.t_final must be a whole number of steps solver.dt");
    }
    return r;
}

RemainderSolver::RemainderSolver(const LinearizedOperator& L, const HilbertData& data, const RemainderOptions& opt,
                                 const SpectralPreconditioner* pre)
    : L_(&L), data_(&data), opt_(opt), pre_(pre), sg_(data.cells, data.length) {
    const auto& grid = L.grid();
    if (data.points_per_axis != grid.n_axis() || std::abs(data.radius - grid.radius()) > 1e-12)
        throw ConfigError("hilbert data was built on a different momentum grid");
    if (data.levels.empty()) throw PrerequisiteMissing("hilbert data has no levels");
    if (!(opt.epsilon > 0.0 && opt.epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
    if (!(opt.t_final > 0.0)) throw ConfigError("solver.t_final must be positive");
    if (opt.imex_order != 1 && opt.imex_order != 2) throw ConfigError("solver.imex_order must be 1 or 2");
    const double h = sg_.h();
    const auto ts = resolve_time_step(h, opt.dt, opt.t_final);
    dt_ = ts.dt;
    steps_ = ts.steps;
    stride_ = static_cast<int>(std::lround(dt_ / data.tau));
    if (stride_ < 1 || std::abs(stride_ * data.tau - dt_) > 1e-9 * dt_)
        throw ConfigError("time step " + std::to_string(dt_) + " is not a multiple of the hilbert level spacing " +
                          std::to_string(data.tau));
    if (opt.imex_order == 2 && stride_ % 2 != 0)
        throw ConfigError("second-order IMEX needs hilbert levels at half steps; rebuild with a finer level spacing");
    if (static_cast<std::size_t>(steps_) * stride_ >= data.levels.size())
        throw PrerequisiteMissing("hilbert data ends at t = " + std::to_string(data.levels.back().t) + ", run needs t = " +
                                  std::to_string(opt.t_final) + "; rerun hilbert-build");
    if (opt.transport_scheme == TransportScheme::Upwind && dt_ > h)
        throw ConfigError("upwind transport needs dt <= h");

    const std::size_t np = grid.size();
    const int nc = sg_.cells;
    dlogM_x_.resize(data.levels.size());
    for (std::size_t j = 0; j < data.levels.size(); ++j) {
        const auto& M = data.levels[j].F[0];
        auto& d = dlogM_x_[j];
        d.resize(np * nc);
        for (int i = 0; i < nc; ++i)
            for (std::size_t a = 0; a < np; ++a)
                d[i * np + a] = (std::log(M(sg_.wrap(i + 1), a)) - std::log(M(sg_.wrap(i - 1), a))) / (2.0 * h);
    }
}

std::vector<std::shared_ptr<const CellContext>> RemainderSolver::contexts(int level) const {
    std::lock_guard<std::mutex> lk(cache_mu_);
    auto it = cache_.find(level);
    if (it != cache_.end()) return it->second;
    const auto& prim = data_->levels.at(level).prim;
    std::vector<CellState> cs(prim.size());
    for (std::size_t i = 0; i < cs.size(); ++i) cs[i] = prim.cell(i);
    auto c = L_->prepare(cs);
    while (cache_.size() >= 6) cache_.erase(cache_.begin());
    cache_.emplace(level, c);
    return c;
}

RemainderField RemainderSolver::zero_field() const {
    RemainderField r;
    r.f = DistField(L_->np(), sg_.cells);
    r.t = data_->levels[0].t;
    r.level = 0;
    r.epsilon = opt_.epsilon;
    r.k = data_->k;
    return r;
}

RemainderField RemainderSolver::initial_field() const {
    RemainderField r = zero_field();
    const auto& lv = data_->levels[0];
    const int nc = sg_.cells;
    const double h = sg_.h();
    const int K = data_->orders();
    std::vector<double> G(nc, 0.0);
    // backbone derivatives of order 1..2k-1
    std::array<std::vector<double>, 3> q;
    for (int i = 0; i < nc; ++i) {
        q[0].push_back(lv.prim.n0[i]);
        q[1].push_back(lv.prim.u[i][0]);
        q[2].push_back(lv.prim.T0[i]);
    }
    auto deriv = [h](const std::vector<double>& v, int j) {
        std::vector<double> d = v;
        for (int s = 0; s < j / 2; ++s) d = d2dx2(d, h);
        if (j % 2) d = ddx(d, h);
        return d;
    };
    for (int j = 1; j <= K - 1; ++j) {
        std::array<std::vector<double>, 3> d;
        for (int c = 0; c < 3; ++c) d[c] = deriv(q[c], j);
        for (int i = 0; i < nc; ++i) G[i] += std::sqrt(d[0][i] * d[0][i] + d[1][i] * d[1][i] + d[2][i] * d[2][i]);
    }
    for (int n = 1; n <= K - 1; ++n)
        for (int j = 0; j <= K - 1 - n; ++j) {
            std::array<std::vector<double>, 5> d;
            for (int c = 0; c < 5; ++c) {
                std::vector<double> v(nc);
                for (int i = 0; i < nc; ++i) v[i] = lv.abc[n][i].vec()[c];
                d[c] = deriv(v, j);
            }
            for (int i = 0; i < nc; ++i) {
                double s = 0.0;
                for (int c = 0; c < 5; ++c) s += d[c][i] * d[c][i];
                G[i] += std::sqrt(s);
            }
        }
    const auto& M = lv.F[0];
    for (int i = 0; i < nc; ++i)
        for (std::size_t a = 0; a < r.f.np(); ++a) r.f(i, a) = std::pow(M(i, a), opt_.tau_init - 0.5) * G[i];
    return r;
}

void RemainderSolver::advect(DistField& f, double dt) const {
    const auto& grid = L_->grid();
    const std::size_t np = grid.size();
    const int nc = sg_.cells;
    const double h = sg_.h(), Lx = sg_.length;
    DistField out(np, nc);
    if (opt_.transport_scheme == TransportScheme::Upwind) {
        for (std::size_t a = 0; a < np; ++a) {
            const double c = grid.phat(a)[0] * dt / h;
            for (int i = 0; i < nc; ++i) {
                const double up = c > 0.0 ? f(i, a) - f(sg_.wrap(i - 1), a) : f(sg_.wrap(i + 1), a) - f(i, a);
                out(i, a) = f(i, a) - c * up;
            }
        }
    } else {
        // exact shift of the trigonometric interpolant (Nyquist mode kept as a cosine)
        parallel_for(np, [&](std::size_t a) {
            const double s = grid.phat(a)[0] * dt;
            std::vector<double> K(nc);
            for (int m = 0; m < nc; ++m) {
                const double y = m * h - s;
                double v = 1.0;
                const int kmax = (nc - 1) / 2;
                for (int k = 1; k <= kmax; ++k) v += 2.0 * std::cos(2.0 * std::numbers::pi * k * y / Lx);
                if (nc % 2 == 0) v += std::cos(std::numbers::pi * nc * y / Lx);
                K[m] = v / nc;
            }
            for (int i = 0; i < nc; ++i) {
                double acc = 0.0;
                for (int j = 0; j < nc; ++j) acc += K[((i - j) % nc + nc) % nc] * f(j, a);
                out(i, a) = acc;
            }
        });
    }
    f = std::move(out);
}

DistField RemainderSolver::explicit_terms(const RemainderField& fld) const {
    const auto& grid = L_->grid();
    const std::size_t np = grid.size();
    const int nc = sg_.cells;
    const auto& lv = data_->levels.at(fld.level);
    const auto& M = lv.F[0];
    DistField out(np, nc);
    if (opt_.reaction) {
        const auto& dx = dlogM_x_[fld.level];
        for (int i = 0; i < nc; ++i)
            for (std::size_t a = 0; a < np; ++a) {
                const double dt_log = lv.dF[0](i, a) / M(i, a);
                out(i, a) -= 0.5 * (dt_log + grid.phat(a)[0] * dx[i * np + a]) * fld.f(i, a);
            }
    }
    if (opt_.gamma) {
        const auto ctx = contexts(fld.level);
        const auto rf = refs(ctx);
        const double eps = fld.epsilon;
        const int k = data_->k;
        DistField Fr(np, nc), Phi(np, nc), A(np, nc), C1(np, nc), C2(np, nc);
        for (std::size_t q = 0; q < Fr.data().size(); ++q) Fr.data()[q] = std::sqrt(M.data()[q]) * fld.f.data()[q];
        for (int n = 1; n < data_->orders(); ++n) {
            const double c = std::pow(eps, n - 1);
            for (std::size_t q = 0; q < Phi.data().size(); ++q) Phi.data()[q] += c * lv.F[n].data()[q];
        }
        const double ck = std::pow(eps, k - 1);
        for (std::size_t q = 0; q < A.data().size(); ++q) A.data()[q] = ck * Fr.data()[q] + Phi.data()[q];
        const auto& op = L_->collision();
        op.bilinear(A.cell(0), Fr.cell(0), rf, C1.cell(0));
        op.bilinear(Fr.cell(0), Phi.cell(0), rf, C2.cell(0));
        for (std::size_t q = 0; q < out.data().size(); ++q) out.data()[q] += (C1.data()[q] + C2.data()[q]) / std::sqrt(M.data()[q]);
    }
    if (opt_.source) {
        const auto rs = remainder_source_S(*data_, fld.level, fld.epsilon);
        for (std::size_t q = 0; q < out.data().size(); ++q) out.data()[q] += rs.Sbar.data()[q];
    }
    return out;
}

void RemainderSolver::implicit(DistField& g, int level, double tau) const {
    const auto ctx = contexts(level);
    const auto cp = raw(ctx);
    DistField u(g.np(), g.cells());
    const auto rep = L_->solve_shifted(g.cell(0), tau, cp, u.cell(0), pre_);
    for (std::size_t i = 0; i < rep.size(); ++i)
        if (!rep[i].converged)
            throw NumericalFailure("implicit collision solve did not converge at level " + std::to_string(level) + " cell " +
                                   std::to_string(i) + " (residual " + std::to_string(rep[i].residual) + ")");
    g = std::move(u);
}

DistField RemainderSolver::apply_L_field(const DistField& f, int level) const {
    const auto ctx = contexts(level);
    const auto cp = raw(ctx);
    DistField out(f.np(), f.cells());
    L_->apply_L(f.cell(0), cp, out.cell(0));
    return out;
}

void RemainderSolver::step(RemainderField& fld) const {
    const int j = fld.level, m = stride_;
    const double dt = dt_, eps = fld.epsilon;
    const bool any_explicit = opt_.reaction || opt_.gamma || opt_.source;
    if (opt_.imex_order == 1) {
        DistField g = fld.f;
        if (opt_.transport) advect(g, dt);
        if (any_explicit) {
            const auto X = explicit_terms(fld);
            for (std::size_t q = 0; q < g.data().size(); ++q) g.data()[q] += dt * X.data()[q];
        }
        if (opt_.collisions) implicit(g, j + m, dt / eps);
        fld.f = std::move(g);
    } else {
        // Strang transport around an implicit-midpoint collision/explicit stage
        const int mid = j + m / 2;
        RemainderField g = fld;
        if (opt_.transport) advect(g.f, 0.5 * dt);
        DistField y = g.f;
        if (any_explicit) {
            const auto X = explicit_terms(g);
            for (std::size_t q = 0; q < y.data().size(); ++q) y.data()[q] += 0.5 * dt * X.data()[q];
        }
        if (opt_.collisions) implicit(y, mid, 0.5 * dt / eps);
        RemainderField ym = g;
        ym.f = y;
        ym.level = mid;
        ym.t = data_->levels[mid].t;
        if (any_explicit) {
            const auto X = explicit_terms(ym);
            for (std::size_t q = 0; q < g.f.data().size(); ++q) g.f.data()[q] += dt * X.data()[q];
        }
        if (opt_.collisions) {
            const auto Ly = apply_L_field(y, mid);
            for (std::size_t q = 0; q < g.f.data().size(); ++q) g.f.data()[q] -= dt / eps * Ly.data()[q];
        }
        if (opt_.transport) advect(g.f, 0.5 * dt);
        fld.f = std::move(g.f);
    }
    fld.level = j + m;
    fld.t = data_->levels[fld.level].t;
    if (!fld.f.all_finite()) throw NumericalFailure("remainder became non-finite at t = " + std::to_string(fld.t));
}

EnergyReport RemainderSolver::energy(const RemainderField& fld) const {
    const auto& grid = L_->grid();
    const std::size_t np = grid.size();
    const int nc = sg_.cells;
    const double h = sg_.h(), eps = fld.epsilon, t = fld.t;
    const auto ctx = contexts(fld.level);
    DistField micro = fld.f, P(np, nc);
    for (int i = 0; i < nc; ++i) L_->remove_macro(micro.cell(i), *ctx[i]);
    for (std::size_t q = 0; q < P.data().size(); ++q) P.data()[q] = fld.f.data()[q] - micro.data()[q];
    const auto d1f = dx_field(fld.f, h), d2f = dxx_field(fld.f, h);
    const auto d1m = dx_field(micro, h), d2m = dxx_field(micro, h);
    const auto d1P = dx_field(P, h), d2P = dxx_field(P, h);

    std::array<std::vector<double>, 3> w, wp;
    for (int l = 0; l < 3; ++l) {
        WeightSpec ws = opt_.weights;
        ws.ell = l;
        w[l].resize(np);
        wp[l].resize(np);
        for (std::size_t a = 0; a < np; ++a) {
            w[l][a] = weight_value(ws, t, grid.p(a));
            wp[l][a] = w[l][a] * std::sqrt(grid.p0(a));
        }
    }
    const double Y = rate_Y(opt_.weights.T, t);
    auto n2 = [&](const DistField& F, const std::vector<double>* om) { return wnorm2(F, grid, h, om); };
    auto s2 = [&](const DistField& F, const std::vector<double>* om) {
        std::vector<double> acc(nc);
        parallel_for(nc, [&](std::size_t i) {
            std::vector<double> g(F.cell(i), F.cell(i) + np);
            if (om)
                for (std::size_t a = 0; a < np; ++a) g[a] *= (*om)[a];
            acc[i] = h * L_->sigma_norm2(g, *ctx[i]);
        });
        return pairwise_sum(acc);
    };

    EnergyReport r;
    auto addE = [&](const char* name, double v) {
        r.terms.emplace_back(std::string("E:") + name, v);
        r.E += v;
    };
    auto addD = [&](const char* name, double v) {
        r.terms.emplace_back(std::string("D:") + name, v);
        r.D += v;
    };
    addE("|f|^2", n2(fld.f, nullptr));
    addE("|w0(I-P)f|^2", n2(micro, &w[0]));
    addE("eps|dx f|^2", eps * n2(d1f, nullptr));
    addE("eps|w1 dx(I-P)f|^2", eps * n2(d1m, &w[1]));
    addE("eps^2|dxx f|^2", eps * eps * n2(d2f, nullptr));
    addE("eps^3|w2 dxx f|^2", eps * eps * eps * n2(d2f, &w[2]));

    addD("|(I-P)f|_s^2/eps", s2(micro, nullptr) / eps);
    addD("|w0(I-P)f|_s^2/eps", s2(micro, &w[0]) / eps);
    addD("Y|w0 sqrt(p0)(I-P)f|^2", Y * n2(micro, &wp[0]));
    addD("eps|dx Pf|^2", eps * n2(d1P, nullptr));
    addD("|dx(I-P)f|_s^2", s2(d1m, nullptr));
    addD("|w1 dx(I-P)f|_s^2", s2(d1m, &w[1]));
    addD("eps Y|w1 sqrt(p0) dx(I-P)f|^2", eps * Y * n2(d1m, &wp[1]));
    addD("eps^2|dxx Pf|^2", eps * eps * n2(d2P, nullptr));
    addD("eps|dxx(I-P)f|_s^2", eps * s2(d2m, nullptr));
    addD("eps^2|w2 dxx(I-P)f|_s^2", eps * eps * s2(d2m, &w[2]));
    addD("eps^3 Y|w2 sqrt(p0) dxx f|^2", eps * eps * eps * Y * n2(d2f, &wp[2]));
    return r;
}

DistField RemainderSolver::reconstruct(const RemainderField& fld) const {
    const auto& lv = data_->levels.at(fld.level);
    DistField F = lv.F[0];
    const double eps = fld.epsilon;
    for (int n = 1; n < data_->orders(); ++n) {
        const double c = std::pow(eps, n);
        for (std::size_t q = 0; q < F.data().size(); ++q) F.data()[q] += c * lv.F[n].data()[q];
    }
    const double ck = std::pow(eps, data_->k);
    for (std::size_t q = 0; q < F.data().size(); ++q) F.data()[q] += ck * std::sqrt(lv.F[0].data()[q]) * fld.f.data()[q];
    return F;
}

double RemainderSolver::h2_distance(const RemainderField& fld) const {
    DistField R = reconstruct(fld);
    const auto& M = data_->levels.at(fld.level).F[0];
    for (std::size_t q = 0; q < R.data().size(); ++q) R.data()[q] -= M.data()[q];
    const auto& grid = L_->grid();
    const double h = sg_.h();
    return std::sqrt(wnorm2(R, grid, h)) + std::sqrt(wnorm2(dx_field(R, h), grid, h)) + std::sqrt(wnorm2(dxx_field(R, h), grid, h));
}

PositivityReport RemainderSolver::positivity(const RemainderField& fld) const {
    const DistField F = reconstruct(fld);
    const auto& M = data_->levels.at(fld.level).F[0];
    PositivityReport r;
    r.min_F = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < F.cells(); ++i)
        for (std::size_t a = 0; a < F.np(); ++a) {
            if (F(i, a) < r.min_F) {
                r.min_F = F(i, a);
                r.cell = static_cast<int>(i);
                r.node = a;
            }
            r.peak_M = std::max(r.peak_M, M(i, a));
        }
    return r;
}

MacroReport RemainderSolver::macro_diagnostics(const RemainderField& cur, const RemainderField& next) const {
    return macro_diagnostics(cur, next, explicit_terms(cur));
}

// Differences are taken the way the first-order step couples its terms: forward in
// time, L at the new level, everything explicit at the old one. A centred version
// pairs L f(t) with a derivative that the implicit stage produced from L f(t+dt),
// and the stiff mismatch swamps everything else.
MacroReport RemainderSolver::macro_diagnostics(const RemainderField& cur, const RemainderField& next,
                                               const DistField& hbar) const {
    const auto& grid = L_->grid();
    const std::size_t np = grid.size();
    const int nc = sg_.cells;
    const double h = sg_.h(), eps = cur.epsilon;
    const double dt = next.t - cur.t;
    if (!(dt > 0.0)) throw std::invalid_argument("macro_diagnostics: fields must be ordered in time");
    const auto cc = contexts(cur.level), cn = contexts(next.level);
    auto split = [&](const RemainderField& fl, const std::vector<std::shared_ptr<const CellContext>>& ctx, DistField& micro,
                     std::vector<Abc>& abc) {
        micro = fl.f;
        abc.resize(nc);
        for (int i = 0; i < nc; ++i) {
            abc[i] = L_->project_P(std::span<const double>(fl.f.cell(i), np), *ctx[i]);
            L_->remove_macro(micro.cell(i), *ctx[i]);
        }
    };
    DistField mc, mn;
    std::vector<Abc> ac, an;
    split(cur, cc, mc, ac);
    split(next, cn, mn, an);

    const auto& lv = data_->levels.at(cur.level);
    const auto& M = lv.F[0];
    const auto& dxl = dlogM_x_[cur.level];
    const auto dmx = dx_field(mc, h), dfx = dx_field(cur.f, h);
    const auto Lf = apply_L_field(next.f, next.level);

    MacroReport r;
    r.abc.cells = ac;
    r.lhs.resize(nc);
    r.rhs.resize(nc);
    std::array<std::vector<double>, 5> cons_res, cons_dt, cons_tr, cons_h;
    for (auto* v : {&cons_res, &cons_dt, &cons_tr, &cons_h})
        for (auto& x : *v) x.assign(nc, 0.0);

    for (int i = 0; i < nc; ++i) {
        const auto& ctx = *cc[i];
        const auto abc = ac[i].vec();
        // l + h at every node
        std::vector<double> lh(np);
        for (std::size_t a = 0; a < np; ++a) {
            const double ph = grid.phat(a)[0];
            const double dtm = (mn(i, a) - mc(i, a)) / dt;
            const double ell = -dtm - ph * dmx(i, a) - Lf(i, a) / eps;
            const double poly = abc[0] + abc[1] * grid.p(a)[0] + abc[2] * grid.p(a)[1] + abc[3] * grid.p(a)[2] + abc[4] * grid.p0(a);
            // d_t and p^ d_x of the M^{1/2} inside P f, moved to the right
            const double hh = -poly * ctx.ref.sqrtM[a] * 0.5 * (lv.dF[0](i, a) / M(i, a) + ph * dxl[i * np + a]) + hbar(i, a);
            lh[a] = ell + hh;
        }
        Eigen::Matrix<double, 14, 14> G = Eigen::Matrix<double, 14, 14>::Zero();
        Eigen::Matrix<double, 14, 1> b = Eigen::Matrix<double, 14, 1>::Zero();
        for (std::size_t a = 0; a < np; ++a) {
            const auto z = zeta(grid.p(a), grid.p0(a));
            const double wa = grid.weight(a) * ctx.ref.M[a];
            for (int s = 0; s < 14; ++s) {
                b[s] += grid.weight(a) * z[s] * ctx.ref.sqrtM[a] * lh[a];
                for (int u = s; u < 14; ++u) G(s, u) += wa * z[s] * z[u];
            }
        }
        G = G.selfadjointView<Eigen::Upper>();
        const Eigen::Matrix<double, 14, 1> c = G.ldlt().solve(b);
        for (int s = 0; s < 14; ++s) r.rhs[i][s] = c[s];

        // left side from the (a,b,c) fields
        const auto aC = ac[i].vec(), aN = an[i].vec();
        const auto aR = ac[sg_.wrap(i + 1)].vec(), aL = ac[sg_.wrap(i - 1)].vec();
        Eigen::Matrix<double, 5, 1> dt_abc = (aN - aC) / dt, dx_abc = (aR - aL) / (2.0 * h);
        r.lhs[i] = {dt_abc[0], dt_abc[1] + dx_abc[4], dt_abc[2], dt_abc[3], dt_abc[4],
                    dx_abc[0], 0.0, 0.0,
                    dx_abc[1], 0.0, 0.0,
                    dx_abc[2], dx_abc[3], 0.0};

        // projected equation: <chi M^{1/2}, d_t f + p^ d_x f + L f / eps - hbar>
        for (int q = 0; q < 5; ++q) {
            const auto& bq = ctx.basis[q];
            double sr = 0.0, sd = 0.0, st = 0.0, sh = 0.0;
            for (std::size_t a = 0; a < np; ++a) {
                const double w = grid.weight(a) * bq[a];
                const double dtf = (next.f(i, a) - cur.f(i, a)) / dt;
                const double tr = grid.phat(a)[0] * dfx(i, a);
                sr += w * (dtf + tr + Lf(i, a) / eps - hbar(i, a));
                sd += w * dtf;
                st += w * tr;
                sh += w * hbar(i, a);
            }
            cons_res[q][i] = sr;
            cons_dt[q][i] = sd;
            cons_tr[q][i] = st;
            cons_h[q][i] = sh;
        }
    }
    auto xnorm = [h](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += h * x * x;
        return std::sqrt(s);
    };
    for (int q = 0; q < 5; ++q) {
        r.conservation[q] = xnorm(cons_res[q]);
        r.conservation_scale += xnorm(cons_dt[q]) + xnorm(cons_tr[q]) + xnorm(cons_h[q]);
    }
    const std::vector<std::pair<std::string, std::vector<int>>> groups = {
        {"a_t", {0}}, {"b_t", {1, 2, 3}}, {"c_t", {4}}, {"a_x", {5, 6, 7}}, {"b_ii", {8, 9, 10}}, {"b_ij", {11, 12, 13}}};
    double sl = 0.0, sr = 0.0;
    for (const auto& [name, idx] : groups) {
        double s = 0.0;
        for (int i = 0; i < nc; ++i)
            for (int q : idx) {
                const double d = r.lhs[i][q] - r.rhs[i][q];
                s += h * d * d;
            }
        r.macabc[name] = std::sqrt(s);
    }
    for (int i = 0; i < nc; ++i)
        for (int q = 0; q < 14; ++q) {
            sl += h * r.lhs[i][q] * r.lhs[i][q];
            sr += h * r.rhs[i][q] * r.rhs[i][q];
        }
    r.macabc_scale = std::sqrt(sl) + std::sqrt(sr);

    // macroscopic gradient against the dissipation combination
    DistField P(np, nc);
    for (std::size_t q = 0; q < P.data().size(); ++q) P.data()[q] = cur.f.data()[q] - mc.data()[q];
    const double num = wnorm2(dx_field(P, h), grid, h);
    double s_micro = 0.0, s_dmicro = 0.0;
    for (int i = 0; i < nc; ++i) {
        s_micro += h * L_->sigma_norm2(std::span<const double>(mc.cell(i), np), *cc[i]);
        s_dmicro += h * L_->sigma_norm2(std::span<const double>(dmx.cell(i), np), *cc[i]);
    }
    const double den = s_micro / (eps * eps) + s_dmicro + opt_.Zcal * wnorm2(cur.f, grid, h) + std::pow(eps, 2 * data_->k + 2);
    r.md_ratio = num / den;
    return r;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need matching series of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunSeries run_remainder(const LinearizedOperator& L, const HilbertData& data, const RemainderOptions& opt,
                        const SpectralPreconditioner* pre) {
    RemainderSolver solver(L, data, opt, pre);
    RunSeries rs;
    rs.epsilon = opt.epsilon;
    rs.dt = solver.dt();
    RemainderField f = solver.initial_field();
    const int mid = std::max(1, solver.steps() / 2);
    RemainderField before;
    double Dint = 0.0, Dprev = 0.0;
    const double pw = std::pow(opt.epsilon, 2 * data.k + 3);
    for (int s = 0; s <= solver.steps(); ++s) {
        if (s > 0) {
            if (s == mid) before = f;
            solver.step(f);
            if (s == mid) rs.macro = solver.macro_diagnostics(before, f);
        }
        const auto er = solver.energy(f);
        const auto pos = solver.positivity(f);
        if (s > 0) Dint += 0.5 * solver.dt() * (Dprev + er.D);
        Dprev = er.D;
        StepRecord r;
        r.t = f.t;
        r.h2_norm = solver.h2_distance(f);
        r.E = er.E;
        r.D = er.D;
        r.D_integral = Dint;
        r.min_F = pos.min_F;
        rs.records.push_back(r);
        rs.energies.push_back(er);
        rs.sup_h2 = std::max(rs.sup_h2, r.h2_norm);
        rs.max_E = std::max(rs.max_E, r.E);
        rs.peak_M = std::max(rs.peak_M, pos.peak_M);
        if (s == 0) {
            rs.min_F0 = pos.min_F;
            rs.min_F = pos.min_F;
        }
        rs.min_F = std::min(rs.min_F, pos.min_F);
        if (s > 0) {
            const double E0 = rs.records.front().E;
            rs.C_fit = std::max(rs.C_fit, std::max(0.0, r.E - E0) / (pw * r.t));
            rs.C_fit_ED = std::max(rs.C_fit_ED, std::max(0.0, r.E + r.D_integral - E0) / (pw * r.t));
        }
    }
    return rs;
}

SweepResult knudsen_sweep(const LinearizedOperator& L, const HilbertData& data, const SweepOptions& opt,
                          const SpectralPreconditioner* pre, const std::function<void(const RunSeries&, bool)>& on_run) {
    if (opt.epsilons.size() < 3) throw ConfigError("sweep.epsilons needs at least 3 entries");
    for (std::size_t i = 1; i < opt.epsilons.size(); ++i)
        if (!(opt.epsilons[i] < opt.epsilons[i - 1])) throw ConfigError("sweep.epsilons must be strictly decreasing");
    SweepResult res;
    try {
        for (double eps : opt.epsilons) {
            RemainderOptions o = opt.base;
            o.epsilon = eps;
            auto run = run_remainder(L, data, o, pre);
            res.epsilons.push_back(eps);
            res.runs.push_back(run);
            if (on_run) on_run(run, false);
            if (opt.dt_halving) {
                o.dt = run.dt / 2.0;
                auto half = run_remainder(L, data, o, pre);
                res.halved.push_back(half);
                if (on_run) on_run(half, true);
            }
        }
    } catch (const std::exception& e) {
        res.failed = true;
        res.error = e.what();
        return res;
    }
    std::vector<double> sup(res.runs.size());
    bool all_zero = true;
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        sup[i] = res.runs[i].sup_h2;
        if (sup[i] > 0.0) all_zero = false;
    }
    if (all_zero) {
        res.degenerate = true;
        res.slope = std::numeric_limits<double>::quiet_NaN();
    } else {
        res.slope = loglog_slope(res.epsilons, sup);
        res.degenerate = !std::isfinite(res.slope);
    }
    return res;
}

}  // namespace landau
