#pragma once
// Expansion coefficients F_0..F_{2k-1} on a uniform set of time levels, built
// order by order: micro part through L^{-1}, macro part through the projected
// conservation laws integrated alongside the Euler backbone.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "landau/collision.hpp"
#include "landau/euler_fluid.hpp"
#include "landau/linearized.hpp"

namespace landau {

/// Shared discrete transport T[F] = p^_1 dF/dx + nu h^3 d^4F/dx^4 (central, periodic), so that
/// d_t F = -T[F] is the kinetic counterpart of the Euler right-hand side.
void transport_apply(const DistField& F, const MomentumGrid& grid, const SpatialGrid& sg, double nu, DistField& out);

struct ExpansionCoefficient {
    int n = 0;
    DistField field;               // F_n
    ProjectionCoefficients macro;  // (a_n, b_n, c_n)
    DistField micro;               // (I-P)[F_n / sqrt(M)]
};

struct HilbertOptions {
    int k = 2;
    double decay_exponent = 0.9;
};

/// Everything the remainder solver needs, sampled on time levels t_j = j*tau.
struct HilbertData {
    int k = 2;
    double tau = 0.0;
    double radius = 0.0;
    int points_per_axis = 0;
    int cells = 0;
    double length = 0.0;
    double nu = 0.0;
    double amplitude = 0.0;

    struct Level {
        double t = 0.0;
        FluidState prim;
        std::vector<Eigen::Vector3d> dprim;  // d_t (n0, u1, T0)
        std::vector<DistField> F;            // F_0 .. F_{2k-1}
        std::vector<DistField> micro;        // index 0 unused (zero)
        std::vector<std::vector<Abc>> abc;   // per order, per cell
        std::vector<DistField> dF;           // d_t F_n (n <= 2k-1), from the evolution equations
        std::map<int, DistField> S_parts;    // exponent e -> sum of C[F_i,F_j] with i+j-k = e
    };
    std::vector<Level> levels;

    int orders() const { return 2 * k; }  // F_0..F_{2k-1}
    void save(const std::string& path) const;
    static HilbertData load(const std::string& path);
};

struct HierarchyResidual {
    int n = 0;           // order of the defining equation
    double t = 0.0;
    double residual = 0.0;  // ||d_t F_n + T F_n - sum C[F_i,F_j]|| (L2 in x,p); d_t by snapshot differencing
    double scale = 0.0;     // ||T F_n|| + ||d_t F_n||
    double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

struct DecayReport {
    int n = 0;              // checks F_{n+1}
    double C_fit = 0.0;     // max |F_{n+1}| / ((1+t)^n M^beta)
    double t_at_max = 0.0;
    int cell_at_max = -1;
    std::size_t node_at_max = 0;
    double p_at_max = 0.0;  // |p| of the maximizing node
    bool at_boundary = false;
};

class HilbertBuilder {
public:
    HilbertBuilder(const LinearizedOperator& L, const EulerSolver& euler, const HilbertOptions& opt = {});

    /// Builds nlevels (odd, >= 5) levels spaced tau starting from the backbone state prim0.
    HilbertData build(const FluidState& prim0, double tau, int nlevels, const SpectralPreconditioner* pre = nullptr) const;

    /// Direct substitution of the defining equations at level j (interior).
    std::vector<HierarchyResidual> residuals(const HilbertData& data, int level) const;

    /// F_n with its macro and micro parts at one level.
    ExpansionCoefficient coefficient(const HilbertData& data, int level, int n) const;

private:
    const LinearizedOperator* L_;
    const EulerSolver* euler_;
    HilbertOptions opt_;
};

/// F_0 = M at every cell (micro part zero).
ExpansionCoefficient build_f0(const FluidState& prim, const CollisionOperator& op);

/// S = sum_{i+j >= 2k+1, 2 <= i,j <= 2k-1} eps^{i+j-k} C[F_i,F_j] at one level, and Sbar = M^{-1/2} S.
struct RemainderSource {
    DistField S, Sbar;
};
RemainderSource remainder_source_S(const HilbertData& data, int level, double epsilon);
/// (i,j) pairs entering S for a given k
std::vector<std::pair<int, int>> remainder_source_pairs(int k);

/// |F_{n+1}| <= C (1+t)^n M^beta node-wise; C is fitted over all levels.
DecayReport decay_check(const HilbertData& data, int n, double beta, const MomentumGrid& grid);

}  // namespace landau
