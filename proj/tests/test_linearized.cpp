#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "landau/linearized.hpp"

using namespace landau;

namespace {

struct Setup {
    CollisionOperator op{MomentumGrid(6.0, 8)};
    LinearizedOperator L{op};
    std::shared_ptr<const CellContext> ctx = L.prepare(CellState{1.0, {0.04, 0.0, -0.02}, 0.9});
};

const Setup& setup() {
    static const Setup s;
    return s;
}

std::vector<double> random_fn(const CellContext& ctx, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> f(ctx.ref.M.size());
    for (std::size_t a = 0; a < f.size(); ++a) f[a] = n(rng) * std::sqrt(ctx.ref.sqrtM[a]);
    return f;
}

double wn(const LinearizedOperator& L, const std::vector<double>& f) { return std::sqrt(L.inner(f.data(), f.data())); }

}  // namespace

TEST_CASE("weights and decay rate closed forms") {
    const WeightSpec w{3, 1.2, 1};
    const Vec3 p{1.0, 2.0, 2.0};
    const double t = 0.4, L = std::log(std::exp(1.0) + t);
    CHECK(weight_value(w, t, p) == doctest::Approx(std::pow(std::sqrt(10.0), 4.0) * std::exp(std::sqrt(10.0) / (5.0 * 1.2 * L))));
    CHECK(rate_Y(1.2, t) == doctest::Approx(1.0 / (5.0 * 1.2 * (std::exp(1.0) + t) * L * L)));
}

TEST_CASE("L annihilates the collision invariants and is self-adjoint, nonnegative") {
    const auto& s = setup();
    const auto& L = s.L;
    std::mt19937_64 rng(1);
    const auto f0 = random_fn(*s.ctx, rng);
    const double scale = wn(L, L.apply_L(f0, *s.ctx)) / wn(L, f0);
    for (const auto& chi : s.ctx->basis) CHECK(wn(L, L.apply_L(chi, *s.ctx)) <= 1e-10 * scale * wn(L, chi));
    for (int k = 0; k < 10; ++k) {
        const auto f = random_fn(*s.ctx, rng), g = random_fn(*s.ctx, rng);
        const auto Lf = L.apply_L(f, *s.ctx), Lg = L.apply_L(g, *s.ctx);
        CHECK(std::abs(L.inner(Lf.data(), g.data()) - L.inner(f.data(), Lg.data())) <= 1e-12 * wn(L, Lf) * wn(L, g));
        CHECK(L.inner(Lf.data(), f.data()) >= 0.0);
        // L = -A - K
        const auto A = L.apply_A(f, *s.ctx), K = L.apply_K(f, *s.ctx);
        for (std::size_t a = 0; a < f.size(); ++a) CHECK(Lf[a] == doctest::Approx(-A[a] - K[a]).scale(wn(L, Lf)));
    }
}

TEST_CASE("Gamma is the symmetric-weighted collision operator") {
    const auto& s = setup();
    std::mt19937_64 rng(2);
    const auto f = random_fn(*s.ctx, rng), g = random_fn(*s.ctx, rng);
    const auto G = s.L.apply_Gamma(f, g, *s.ctx);
    std::vector<double> F(f.size()), H(f.size());
    for (std::size_t a = 0; a < f.size(); ++a) {
        F[a] = s.ctx->ref.sqrtM[a] * f[a];
        H[a] = s.ctx->ref.sqrtM[a] * g[a];
    }
    const auto C = collision_bilinear(s.op, F, H, s.ctx->ref);
    double m = 0.0;
    for (double x : G) m = std::max(m, std::abs(x));
    for (std::size_t a = 0; a < f.size(); ++a) CHECK(G[a] == doctest::Approx(C[a] / s.ctx->ref.sqrtM[a]).epsilon(1e-10).scale(m));
}

TEST_CASE("projection P is idempotent and reproduces the null space") {
    const auto& s = setup();
    std::mt19937_64 rng(3);
    auto f = random_fn(*s.ctx, rng);
    const Abc c = s.L.project_P(f, *s.ctx);
    const auto Pf = s.L.reconstruct(c, *s.ctx);
    const Abc c2 = s.L.project_P(Pf, *s.ctx);
    CHECK((c.vec() - c2.vec()).norm() <= 1e-12 * c.vec().norm());
    s.L.remove_macro(f.data(), *s.ctx);
    CHECK(s.L.project_P(f, *s.ctx).vec().norm() <= 1e-12 * wn(s.L, f));
    const Abc known{0.3, {-0.1, 0.2, 0.05}, -0.4};
    const auto g = s.L.reconstruct(known, *s.ctx);
    CHECK((s.L.project_P(g, *s.ctx).vec() - known.vec()).norm() <= 1e-12);
}

TEST_CASE("inverse on the orthogonal complement") {
    const auto& s = setup();
    std::mt19937_64 rng(4);
    const SpectralPreconditioner pre(s.L, *s.L.prepare(CellState{1.0, {0, 0, 0}, 1.0}));
    for (int k = 0; k < 5; ++k) {
        auto g = random_fn(*s.ctx, rng);
        const auto r = s.L.apply_L(g, *s.ctx);
        SolveReport rep;
        const auto u = s.L.invert_L_on_orthogonal(r, *s.ctx, &rep, &pre);
        CHECK(rep.converged);
        s.L.remove_macro(g.data(), *s.ctx);
        std::vector<double> e(g.size());
        for (std::size_t a = 0; a < g.size(); ++a) e[a] = u[a] - g[a];
        CHECK(wn(s.L, e) <= 1e-6 * wn(s.L, g));
        // unpreconditioned CG reaches the same answer
        const auto u2 = s.L.invert_L_on_orthogonal(r, *s.ctx);
        for (std::size_t a = 0; a < g.size(); ++a) e[a] = u2[a] - g[a];
        CHECK(wn(s.L, e) <= 1e-5 * wn(s.L, g));
    }
    // a right-hand side with a macroscopic part has no solution
    CHECK_THROWS_AS(s.L.invert_L_on_orthogonal(s.ctx->basis[0], *s.ctx), std::invalid_argument);
}

TEST_CASE("shifted solve (I + tau L) u = r") {
    const auto& s = setup();
    std::mt19937_64 rng(5);
    const auto r = random_fn(*s.ctx, rng);
    std::vector<double> u(r.size());
    const CellContext* c[1] = {s.ctx.get()};
    const auto rep = s.L.solve_shifted(r.data(), 0.3, c, u.data());
    CHECK(rep[0].converged);
    const auto Lu = s.L.apply_L(u, *s.ctx);
    std::vector<double> res(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) res[a] = u[a] + 0.3 * Lu[a] - r[a];
    CHECK(wn(s.L, res) <= 1e-7 * wn(s.L, r));
}

TEST_CASE("coercivity constant bounds the quadratic form") {
    const auto& s = setup();
    const auto cf = coercivity_spectrum(s.L, *s.ctx);
    CHECK(cf.delta > 0.0);
    CHECK(cf.largest >= cf.delta);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 10; ++k) {
        auto f = random_fn(*s.ctx, rng);
        const auto Lf = s.L.apply_L(f, *s.ctx);
        const double q = s.L.inner(Lf.data(), f.data());
        s.L.remove_macro(f.data(), *s.ctx);
        const double sig = s.L.sigma_norm2(f, *s.ctx);
        CHECK(sig >= 0.0);
        CHECK(q >= (1.0 - 1e-9) * cf.delta * sig);
        CHECK(q <= (1.0 + 1e-9) * cf.largest * sig);
    }
}

TEST_CASE("dense forms agree with the matrix-free operators") {
    const auto& s = setup();
    const std::size_t np = s.L.np();
    const auto A = s.L.dense_symmetric(*s.ctx);
    const auto S = s.L.dense_sigma_symmetric(*s.ctx);
    std::mt19937_64 rng(7);
    auto f = random_fn(*s.ctx, rng);
    std::vector<double> y(np);
    for (std::size_t a = 0; a < np; ++a) y[a] = std::sqrt(s.L.grid().weight(a)) * f[a];
    double qa = 0.0, qs = 0.0;
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < np; ++j) {
            qa += y[i] * A[i * np + j] * y[j];
            qs += y[i] * S[i * np + j] * y[j];
        }
    const auto Lf = s.L.apply_L(f, *s.ctx);
    CHECK(qa == doctest::Approx(s.L.inner(Lf.data(), f.data())).epsilon(1e-10));
    CHECK(qs == doctest::Approx(s.L.sigma_norm2(f, *s.ctx)).epsilon(1e-10));
}
