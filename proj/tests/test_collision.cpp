#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "landau/collision.hpp"

using namespace landau;

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

const CollisionOperator& op8() {
    static const CollisionOperator op(MomentumGrid(6.0, 8));
    return op;
}

}  // namespace

TEST_CASE("kernel: null direction, symmetry, positive semidefinite") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const Vec3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
        const auto kv = kernel_phi(p, q);
        const Eigen::Matrix3d& phi = kv.phi;
        const Vec3 ph = p_hat(p), qh = p_hat(q);
        const Eigen::Vector3d d(qh[0] - ph[0], qh[1] - ph[1], qh[2] - ph[2]);
        CHECK((phi * d).norm() <= 1e-12 * phi.norm() * d.norm());
        CHECK((phi - kernel_phi(q, p).phi).norm() <= 1e-12 * phi.norm());
        CHECK((phi - phi.transpose()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(phi);
        CHECK(es.eigenvalues()[0] >= -1e-12 * es.eigenvalues()[2]);
        // the regularized kernel keeps the null direction
        const auto reg = kernel_phi(p, q, 1e-2).phi;
        CHECK((reg * d).norm() <= 1e-12 * reg.norm() * d.norm());
    }
    CHECK_THROWS_AS(kernel_phi({1, 2, 3}, {1, 2, 3}), std::domain_error);
}

TEST_CASE("kappa closed form 2^{9/2} pi / p0") {
    for (double r : {0.0, 0.5, 2.0, 7.0}) {
        const Vec3 p{r, 0.3 * r, 0.0};
        CHECK(kappa(p) == doctest::Approx(std::pow(2.0, 4.5) * M_PI / energy_of(p)).epsilon(1e-9));
    }
}

TEST_CASE("stencil divergence is minus the weighted adjoint of the gradient") {
    const MomentumGrid g(5.0, 8);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int sign : {1, -1}) {
        const Stencil st(g, sign);
        std::vector<double> psi(g.size()), F(3 * g.size()), gp(3 * g.size()), dv(g.size());
        for (auto& x : psi) x = n(rng);
        for (auto& x : F) x = n(rng);
        st.grad(psi.data(), gp.data());
        st.div(F.data(), dv.data());
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) {
            lhs += g.weight(a) * psi[a] * dv[a];
            for (int k = 0; k < 3; ++k) rhs += g.weight(a) * gp[k * g.size() + a] * F[k * g.size() + a];
        }
        CHECK(lhs == doctest::Approx(-rhs).epsilon(1e-12));
        CHECK(std::abs(rhs) > 1.0);
    }
}

TEST_CASE("equilibrium is annihilated by the projected operator only") {
    const auto& op = op8();
    for (const CellState s : {CellState{1.0, {0, 0, 0}, 1.0}, CellState{0.7, {0.08, -0.03, 0.02}, 0.5}}) {
        const auto ref = op.reference(s);
        CellState hot = s;
        hot.T0 *= 1.1;
        const auto Mh = juttner_on_grid(hot, op.grid());
        const double scale = max_abs(collision_bilinear(op, ref.M, Mh, ref));
        CHECK(scale > 0.0);
        CHECK(max_abs(collision_bilinear(op, ref.M, ref.M, ref)) <= 1e-12 * scale);
    }
    KernelOptions plain;
    plain.mode = KernelMode::Plain;
    const CollisionOperator pop(MomentumGrid(6.0, 8), plain);
    const auto ref = pop.reference({1.0, {0, 0, 0}, 1.0});
    CHECK(max_abs(collision_bilinear(pop, ref.M, ref.M, ref)) > 1e-6);
}

TEST_CASE("collision invariants for unequal arguments") {
    const auto& op = op8();
    const auto& g = op.grid();
    const auto ref = op.reference({1.0, {0.02, 0.0, 0.01}, 0.9});
    std::vector<double> f(g.size()), h(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
        const auto& p = g.p(a);
        f[a] = ref.M[a] * (1.0 + 0.3 * std::cos(p[0] + 0.5 * p[2]));
        h[a] = ref.M[a] * (1.0 + 0.2 * p[1] - 0.1 * p[0] * p[2]);
    }
    // mass for any pair; momentum and energy only for C[f,f] and the symmetrized C[f,h] + C[h,f]
    const auto c = collision_bilinear(op, f, h, ref);
    const auto c2 = collision_bilinear(op, h, f, ref);
    std::vector<double> sym(c.size()), ac(c.size());
    for (std::size_t a = 0; a < c.size(); ++a) {
        sym[a] = c[a] + c2[a];
        ac[a] = (std::abs(c[a]) + std::abs(c2[a])) * g.p0(a);
    }
    const double scale = integrate_p(ac, g);
    CHECK(std::abs(invariant_residuals(op, f, h, ref).mass) <= 1e-12 * scale);
    CHECK(moments_of(sym, g).max_abs() <= 1e-12 * scale);
    CHECK(invariant_residuals(op, f, f, ref).max_abs() <= 1e-12 * scale);
    CHECK(invariant_residuals(op, f, h, ref).max_abs() > 1e-6 * scale);
}

TEST_CASE("batched bilinear matches single-column calls") {
    const auto& op = op8();
    const auto& g = op.grid();
    const std::size_t np = g.size();
    const auto r0 = op.reference({1.0, {0, 0, 0}, 1.0});
    const auto r1 = op.reference({1.2, {0.05, 0, 0}, 0.8});
    std::vector<double> f(2 * np), h(2 * np), out(2 * np);
    for (std::size_t a = 0; a < np; ++a) {
        f[a] = r0.M[a] * (1 + 0.1 * g.p(a)[0]);
        h[a] = r0.M[a];
        f[np + a] = r1.M[a];
        h[np + a] = r1.M[a] * (1 - 0.1 * g.p(a)[2]);
    }
    const LocalMaxwellian* refs[2] = {&r0, &r1};
    op.bilinear(f.data(), h.data(), refs, out.data());
    const auto c0 = collision_bilinear(op, std::span(f.data(), np), std::span(h.data(), np), r0);
    const auto c1 = collision_bilinear(op, std::span(f.data() + np, np), std::span(h.data() + np, np), r1);
    for (std::size_t a = 0; a < np; ++a) {
        CHECK(out[a] == doctest::Approx(c0[a]).epsilon(1e-12).scale(max_abs(c0)));
        CHECK(out[np + a] == doctest::Approx(c1[a]).epsilon(1e-12).scale(max_abs(c1)));
    }
}

TEST_CASE("non-divergence form: diffusion matrix is positive semidefinite for F >= 0") {
    const MomentumGrid g(5.0, 8);
    const auto M = juttner_on_grid({1.0, {0.0, 0.0, 0.0}, 1.0}, g);
    const auto nd = nondivergence_form(M, g);
    REQUIRE(nd.diffusion.size() == g.size());
    for (const auto& D : nd.diffusion) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (D + D.transpose()));
        CHECK(es.eigenvalues()[0] >= -1e-12 * es.eigenvalues()[2]);
    }
    const auto out = nondivergence_apply(nd, M, g);
    CHECK(out.size() == g.size());
}
