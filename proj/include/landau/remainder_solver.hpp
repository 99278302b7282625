#pragma once
// Remainder f with F^eps = sum eps^n F_n + eps^k M^{1/2} f, integrated by IMEX
// (collisions implicit), plus the E/D functionals and the Knudsen sweep.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "landau/hilbert_expansion.hpp"
#include "landau/linearized.hpp"

namespace landau {

struct RemainderField {
    DistField f;
    double t = 0.0;
    int level = 0;  // index into HilbertData::levels
    double epsilon = 1.0;
    int k = 2;
};

enum class TransportScheme { Spectral, Upwind };

struct RemainderOptions {
    double epsilon = 0.1;
    double dt = 0.0;  // 0: min(0.4 h, 0.1) rounded so that t_final is a whole number of steps
    double t_final = 0.5;
    int imex_order = 1;
    TransportScheme transport_scheme = TransportScheme::Spectral;
    // switches for test modes; the full equation has all of them on
    bool transport = true;
    bool collisions = true;
    bool reaction = true;  // -M^{-1/2}(d_t + p^.d_x) M^{1/2} f
    bool gamma = true;     // Gamma terms with the F_i
    bool source = true;    // Sbar
    double tau_init = 0.5; // F_R(0) = M^tau G(x)
    WeightSpec weights{};
    double Zcal = 0.0;     // backbone smallness, enters the macroscopic bound
};

struct TimeStep {
    double dt = 0.0;
    int steps = 0;
};
/// dt = 0 picks min(0.4 h, 0.1) shrunk so that t_final is a whole number of steps.
TimeStep resolve_time_step(double h, double dt, double t_final);

struct EnergyReport {
    double E = 0.0;
    double D = 0.0;
    std::vector<std::pair<std::string, double>> terms;  // "E:..." and "D:..." entries, prefactors applied
};

struct PositivityReport {
    double min_F = 0.0;
    int cell = -1;
    std::size_t node = 0;
    double peak_M = 0.0;
    double relative() const { return min_F / peak_M; }
};

/// Coefficients of both sides of the micro-macro equation on the 14 functions
/// {1, p_i, p0, p_i/p0, p_i^2/p0, p_i p_j/p0 (i<j)} times M^{1/2}.
struct MacroReport {
    ProjectionCoefficients abc;
    std::vector<std::array<double, 14>> lhs, rhs;  // per cell
    std::array<double, 5> conservation{};          // ||<chi M^{1/2}, residual>|| per component
    double conservation_scale = 0.0;
    std::map<std::string, double> macabc;          // a_t, b_t, c_t, a_x, b_ii, b_ij
    double macabc_scale = 0.0;
    double md_ratio = 0.0;  // ||d_x P f||^2 / (eps^-2|(I-P)f|_s^2 + |d_x(I-P)f|_s^2 + Zcal||f||^2 + eps^{2k+2})
};

class RemainderSolver {
public:
    RemainderSolver(const LinearizedOperator& L, const HilbertData& data, const RemainderOptions& opt,
                    const SpectralPreconditioner* pre = nullptr);

    double dt() const { return dt_; }
    int stride() const { return stride_; }
    int steps() const { return steps_; }
    const SpatialGrid& space() const { return sg_; }
    const RemainderOptions& options() const { return opt_; }

    RemainderField zero_field() const;
    /// F_R(0) = M^tau (sum_{j=1}^{2k-1} |d_x^j(n0,u,T0)| + sum_i sum_{j<=2k-1-i} |d_x^j(a_i,b_i,c_i)|)
    RemainderField initial_field() const;

    void step(RemainderField& f) const;

    /// M^{-1/2}-weighted explicit terms (everything but transport and L), evaluated at the field's level
    DistField explicit_terms(const RemainderField& f) const;

    EnergyReport energy(const RemainderField& f) const;
    DistField reconstruct(const RemainderField& f) const;  // F^eps
    /// sum_{j<=2} ||d_x^j (F^eps - M)||
    double h2_distance(const RemainderField& f) const;
    PositivityReport positivity(const RemainderField& f) const;
    /// residual report over one step cur -> next
    MacroReport macro_diagnostics(const RemainderField& cur, const RemainderField& next) const;
    /// same, with the right-hand side hbar supplied by the caller
    MacroReport macro_diagnostics(const RemainderField& cur, const RemainderField& next, const DistField& hbar) const;

    /// contexts (Juttner state, sigma, Gram) of one Hilbert level; cached
    std::vector<std::shared_ptr<const CellContext>> contexts(int level) const;

private:
    void advect(DistField& f, double dt) const;
    void implicit(DistField& g, int level, double tau) const;
    DistField apply_L_field(const DistField& f, int level) const;

    const LinearizedOperator* L_;
    const HilbertData* data_;
    RemainderOptions opt_;
    const SpectralPreconditioner* pre_;
    SpatialGrid sg_;
    double dt_ = 0.0;
    int stride_ = 1;
    int steps_ = 0;
    std::vector<std::vector<double>> dlogM_x_;  // per level, per cell*Np
    mutable std::mutex cache_mu_;
    mutable std::map<int, std::vector<std::shared_ptr<const CellContext>>> cache_;
};

/// Central periodic x-derivatives of a distribution field.
DistField dx_field(const DistField& F, double h);
DistField dxx_field(const DistField& F, double h);
/// h sum_i sum_a w_a F^2
double l2_xp2(const DistField& F, const MomentumGrid& grid, double h);

struct StepRecord {
    double t = 0.0;
    double h2_norm = 0.0;
    double E = 0.0;
    double D = 0.0;
    double D_integral = 0.0;
    double min_F = 0.0;
};

struct RunSeries {
    double epsilon = 0.0;
    double dt = 0.0;
    std::vector<StepRecord> records;
    std::vector<EnergyReport> energies;
    double sup_h2 = 0.0;
    double max_E = 0.0;
    double min_F = 0.0;
    double peak_M = 0.0;
    double min_F0 = 0.0;  // at t = 0
    double C_fit = 0.0;     // max_t max(0, E(t) - E(0)) / (eps^{2k+3} t)
    double C_fit_ED = 0.0;  // same with E(t) + int D
    MacroReport macro;      // at the middle step
};

struct SweepOptions {
    std::vector<double> epsilons{0.1, 0.05, 0.025};
    RemainderOptions base{};
    bool dt_halving = true;
};

struct SweepResult {
    std::vector<double> epsilons;
    std::vector<RunSeries> runs;
    std::vector<RunSeries> halved;
    double slope = 0.0;
    bool degenerate = false;
    bool failed = false;
    std::string error;
};

/// One run from the positivity-constructed initial data to t_final.
RunSeries run_remainder(const LinearizedOperator& L, const HilbertData& data, const RemainderOptions& opt,
                        const SpectralPreconditioner* pre = nullptr);

/// Runs every epsilon (and its dt-halved twin), fits the log-log slope of sup_t ||F^eps - M||_{H^2}.
/// A failing run stops the sweep; whatever finished is returned with failed = true.
SweepResult knudsen_sweep(const LinearizedOperator& L, const HilbertData& data, const SweepOptions& opt,
                          const SpectralPreconditioner* pre = nullptr,
                          const std::function<void(const RunSeries&, bool halved)>& on_run = {});

/// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace landau
