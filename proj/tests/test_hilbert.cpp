#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "landau/errors.hpp"
#include "landau/hilbert_expansion.hpp"

using namespace landau;

namespace {

struct Bench {
    CollisionOperator op{MomentumGrid(6.0, 8)};
    LinearizedOperator L{op};
    SpatialGrid sg{8, 2.0 * M_PI};
    EulerSolver eu{sg, std::make_shared<LatticeClosure>(op.grid())};
    HilbertBuilder hb{L, eu};
};

const Bench& bench() {
    static const Bench b;
    return b;
}

double max_abs(const DistField& F) {
    double m = 0.0;
    for (double x : F.data()) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("source pairs for k = 2") {
    const auto p = remainder_source_pairs(2);
    REQUIRE(p.size() == 3);
    for (const auto& [i, j] : p) {
        CHECK(i + j >= 5);
        CHECK(i >= 2);
        CHECK(j <= 3);
    }
}

TEST_CASE("constant backbone: all corrections vanish") {
    const auto& b = bench();
    const auto D = b.hb.build(wave_state(b.sg, 0.0), 0.1, 5);
    REQUIRE(D.levels.size() == 5);
    const double m0 = max_abs(D.levels[0].F[0]);
    for (const auto& lv : D.levels) {
        double d = 0.0;
        for (std::size_t q = 0; q < lv.F[0].data().size(); ++q) d = std::max(d, std::abs(lv.F[0].data()[q] - D.levels[0].F[0].data()[q]));
        CHECK(d <= 1e-14 * m0);
        for (int n = 1; n < D.orders(); ++n) CHECK(max_abs(lv.F[n]) <= 1e-13 * m0);
    }
    for (const auto& r : b.hb.residuals(D, 2)) CHECK(r.residual <= 1e-12 * m0);
    const auto src = remainder_source_S(D, 2, 0.1);
    // corrections are round-off, so is everything built from them
    CHECK(max_abs(src.S) <= 1e-24 * m0);
    for (int n = 0; n + 1 < D.orders(); ++n) CHECK(decay_check(D, n, 0.9, b.op.grid()).C_fit <= 1e-13);
}

TEST_CASE("small wave: hierarchy residuals, macro/micro split, persistence") {
    const auto& b = bench();
    const auto D = b.hb.build(wave_state(b.sg, 1e-3), 0.1, 5);
    // F_1 is O(amplitude) and the defining equations hold at the interior levels
    CHECK(max_abs(D.levels[2].F[1]) > 0.0);
    for (int j = 1; j <= 3; ++j)
        for (const auto& r : b.hb.residuals(D, j)) CHECK(r.relative() <= 1e-3);
    // F_n = M^{1/2} (P + micro)
    for (int n = 1; n < D.orders(); ++n) {
        const auto c = b.hb.coefficient(D, 2, n);
        CHECK(c.n == n);
        CHECK(c.macro.cells.size() == 8u);
    }
    const auto d = decay_check(D, 0, 0.9, b.op.grid());
    CHECK(std::isfinite(d.C_fit));
    CHECK(d.C_fit > 0.0);

    const auto path = (std::filesystem::temp_directory_path() / "landau_test_hilbert.bin").string();
    D.save(path);
    const auto E = HilbertData::load(path);
    std::filesystem::remove(path);
    CHECK(E.k == D.k);
    CHECK(E.tau == D.tau);
    REQUIRE(E.levels.size() == D.levels.size());
    for (std::size_t j = 0; j < D.levels.size(); ++j)
        for (int n = 0; n < D.orders(); ++n) CHECK(E.levels[j].F[n].data() == D.levels[j].F[n].data());
    CHECK_THROWS_AS(HilbertData::load(path), PrerequisiteMissing);
}

TEST_CASE("builder input guards") {
    const auto& b = bench();
    CHECK_THROWS_AS(b.hb.build(wave_state(b.sg, 0.0), 0.1, 4), std::invalid_argument);
    const EulerSolver cont(b.sg, std::make_shared<ContinuumClosure>());
    CHECK_THROWS_AS(HilbertBuilder(b.L, cont), std::invalid_argument);
}

TEST_CASE("shared transport operator differentiates in x") {
    const auto& b = bench();
    const auto& g = b.op.grid();
    const SpatialGrid sg(32, 2.0 * M_PI);
    DistField F(g.size(), 32), out;
    for (int i = 0; i < 32; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) F(i, a) = std::sin(sg.x(i));
    transport_apply(F, g, sg, 0.0, out);
    double err = 0.0;
    for (int i = 0; i < 32; ++i)
        for (std::size_t a = 0; a < g.size(); ++a) err = std::max(err, std::abs(out(i, a) - g.phat(a)[0] * std::cos(sg.x(i))));
    CHECK(err <= 0.2 * sg.h() * sg.h());
}
