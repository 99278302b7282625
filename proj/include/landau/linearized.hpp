#pragma once
// Linearization around a local Juttner state: collision frequency sigma,
// L = -A - K, Gamma, the macroscopic projection P and a projected CG inverse.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "landau/collision.hpp"

namespace landau {

/// (a, b, c) with P f = M^{1/2}(a + p.b + p0 c) for one cell.
struct Abc {
    double a = 0.0;
    Vec3 b{0.0, 0.0, 0.0};
    double c = 0.0;
    Eigen::Matrix<double, 5, 1> vec() const { return {a, b[0], b[1], b[2], c}; }
    static Abc from(const Eigen::Matrix<double, 5, 1>& v) { return {v[0], {v[1], v[2], v[3]}, v[4]}; }
};

/// One Abc triple per x-cell.
struct ProjectionCoefficients {
    std::vector<Abc> cells;
};

struct WeightSpec {
    int N0 = 3;
    double T = 1.05;
    int ell = 0;
};

/// w_ell = (p0)^{2(N0-ell)} exp(p0 / (5 T ln(e+t)))
double weight_value(const WeightSpec& spec, double t, const Vec3& p);
/// Y = 1 / (5 T (e+t) ln^2(e+t))
double rate_Y(double T, double t);

/// sigma(p) = int Phi(p,q) M(q) dq by grid quadrature (q with g < eta^2 skipped).
Eigen::Matrix3d collision_frequency_sigma(const CellState& s, const Vec3& p, const MomentumGrid& grid, double eta);

enum class Preconditioner { None, Jacobi, Spectral };

struct LinearizedOptions {
    double cg_tol = 1e-8;
    int cg_max_iter = 200;
    double ortho_tol = 1e-6;
    Preconditioner precond = Preconditioner::Spectral;
};

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;  // ||L u - r||_w / ||r||_w
    bool converged = false;
};

/// Everything that depends on the cell's Juttner state.
struct CellContext {
    LocalMaxwellian ref;
    std::array<std::vector<double>, 2> sigma;  // per family: 6 blocks of Np (00,01,02,11,12,22)
    std::vector<double> sigma_bar;             // 6*Np, family average
    std::array<std::vector<double>, 5> basis;  // M^{1/2}(1, p1, p2, p3, p0)
    Eigen::Matrix<double, 5, 5> gram;
    Eigen::LDLT<Eigen::Matrix<double, 5, 5>> gram_ldlt;
    std::vector<double> diag_A;  // diagonal of the local (A) part, w-symmetrized
};

/// Eigen-decomposition of the w-symmetrized L for a fixed state, used as a
/// preconditioner for cells whose state is close to it.
class SpectralPreconditioner {
public:
    SpectralPreconditioner(const class LinearizedOperator& L, const CellContext& ctx);
    /// z = W^{-1/2} V f(Lambda) V^T W^{1/2} r with f = 1/(shift + scale*lambda) (pseudo-inverse on the
    /// null modes when shift == 0). r, z: Np x ncols.
    void apply(const double* r, double* z, int ncols, double shift, double scale) const;
    const std::vector<double>& eigenvalues() const { return lambda_; }
    const CellState& state() const { return state_; }

private:
    CellState state_;
    std::size_t np_ = 0;
    std::vector<double> V_;  // Np x Np column-major eigenvectors
    std::vector<double> lambda_;
    std::vector<double> wsqrt_;
};

class LinearizedOperator {
public:
    LinearizedOperator(const CollisionOperator& op, const LinearizedOptions& opt = {});

    const CollisionOperator& collision() const { return *op_; }
    const MomentumGrid& grid() const { return op_->grid(); }
    std::size_t np() const { return op_->np(); }
    const LinearizedOptions& options() const { return opt_; }

    /// Builds contexts for a batch of cells (sigma by batched table products).
    std::vector<std::shared_ptr<const CellContext>> prepare(std::span<const CellState> states) const;
    std::shared_ptr<const CellContext> prepare(const CellState& s) const;

    using Ctxs = std::span<const CellContext* const>;

    /// Batched operators; f, out are Np x ncols with ncols = ctxs.size().
    void apply_L(const double* f, Ctxs ctxs, double* out) const;
    void apply_A(const double* f, Ctxs ctxs, double* out) const;
    void apply_K(const double* f, Ctxs ctxs, double* out) const;
    /// Gamma[f,g] = M^{-1/2} C[M^{1/2} f, M^{1/2} g]
    void apply_Gamma(const double* f, const double* g, Ctxs ctxs, double* out) const;

    std::vector<double> apply_L(std::span<const double> f, const CellContext& ctx) const;
    std::vector<double> apply_A(std::span<const double> f, const CellContext& ctx) const;
    std::vector<double> apply_K(std::span<const double> f, const CellContext& ctx) const;
    std::vector<double> apply_Gamma(std::span<const double> f, std::span<const double> g, const CellContext& ctx) const;

    Abc project_P(std::span<const double> f, const CellContext& ctx) const;
    std::vector<double> reconstruct(const Abc& c, const CellContext& ctx) const;
    /// f <- (I-P) f
    void remove_macro(double* f, const CellContext& ctx) const;

    /// <f,g> with trapezoid weights
    double inner(const double* f, const double* g) const;
    double sigma_norm2(std::span<const double> f, const CellContext& ctx) const;
    double sigma_norm(std::span<const double> f, const CellContext& ctx) const;

    /// Solves L u = r on N^perp for every column. Throws std::invalid_argument when some
    /// column has ||P r|| / ||r|| > ortho_tol; convergence failures are reported, not thrown.
    std::vector<SolveReport> invert_L_on_orthogonal(const double* r, Ctxs ctxs, double* u,
                                                    const SpectralPreconditioner* pre = nullptr) const;
    std::vector<double> invert_L_on_orthogonal(std::span<const double> r, const CellContext& ctx, SolveReport* report = nullptr,
                                               const SpectralPreconditioner* pre = nullptr) const;

    /// Solves (I + tau L) u = r for every column (tau > 0).
    std::vector<SolveReport> solve_shifted(const double* r, double tau, Ctxs ctxs, double* u,
                                           const SpectralPreconditioner* pre = nullptr) const;

    /// Dense w-symmetrized matrix W^{1/2} L W^{-1/2} for one cell (row-major == column-major, symmetric).
    std::vector<double> dense_symmetric(const CellContext& ctx) const;
    /// The sigma-norm quadratic form in the same W^{1/2} coordinates: |f|_s^2 = y^T S y, y = W^{1/2} f.
    std::vector<double> dense_sigma_symmetric(const CellContext& ctx) const;

private:
    void apply_parts(const double* f, Ctxs ctxs, double* out, bool local, bool nonlocal) const;
    template <class Op>
    std::vector<SolveReport> pcg(const double* r, Ctxs ctxs, double* u, bool project, Op&& op, const SpectralPreconditioner* pre,
                                 double shift, double scale) const;

    const CollisionOperator* op_;
    LinearizedOptions opt_;
};

/// Extreme generalized eigenvalues of <Lf,f> against |f|_s^2 restricted to N^perp; delta is the
/// best constant in <Lf,f> >= delta |(I-P)f|_s^2.
struct CoercivityFit {
    double delta = 0.0;
    double largest = 0.0;
};
CoercivityFit coercivity_spectrum(const LinearizedOperator& L, const CellContext& ctx);

}  // namespace landau
