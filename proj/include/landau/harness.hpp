#pragma once
// Pipelines behind the CLI subcommands: the property suites, the solver runs and
// everything they persist (CSV, SVG, summary, manifests).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "landau/collision.hpp"
#include "landau/config.hpp"
#include "landau/euler_fluid.hpp"
#include "landau/hilbert_expansion.hpp"
#include "landau/linearized.hpp"
#include "landau/remainder_solver.hpp"

namespace landau {

// Acceptance thresholds. The checks CSVs, summary.md and the acceptance binary all read these.
namespace limits {
inline constexpr int kernel_pairs = 10000;
inline constexpr double kernel_null = 1e-10;
inline constexpr double kernel_min_eigenvalue = -1e-12;
inline constexpr double cmm_relative = 1e-6;
inline constexpr double cmm_refinement = 3.0;
inline constexpr double conservation = 1e-8;
inline constexpr double null_space = 1e-5;
inline constexpr double self_adjoint = 1e-8;
inline constexpr double coercivity_drift = 0.2;
inline constexpr int roundtrip_samples = 50;
inline constexpr double roundtrip = 1e-5;
inline constexpr double decay_growth = 2.0;
inline constexpr double slope_lo = 0.7;
inline constexpr double slope_hi = 1.3;
inline constexpr double cfit_halving = 2.0;
inline constexpr double positivity = 1e-8;
inline constexpr double dissipation_floor = -1e-12;  // min D term / max D, round-off
}  // namespace limits

/// One line of a *_checks.csv. criterion 0 marks supplementary rows (pass = "info").
struct CheckRow {
    std::string check;
    double value = 0.0;
    std::string threshold;
    std::string pass;
    int criterion = 0;
};
CheckRow check_le(const std::string& name, double value, double limit, int criterion);
CheckRow check_ge(const std::string& name, double value, double limit, int criterion);
CheckRow check_in(const std::string& name, double value, double lo, double hi, int criterion);
CheckRow info_row(const std::string& name, double value);
std::string checks_csv(const std::vector<CheckRow>& rows);
std::vector<CheckRow> parse_checks_csv(const std::string& text);

/// Column-ordered CSV with shortest round-trip floats.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<std::string>& cells);
    std::string text() const;
    static std::string num(double v) { return format_double(v); }
    static std::string num(int v) { return std::to_string(v); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};
/// Splits CSV text into rows of fields (no quoting).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Output directory of one subcommand. Every write goes through here so that the
/// manifest lists all produced files; the manifest carries no timestamps.
class Artifacts {
public:
    Artifacts(std::string dir, std::string subcommand, const RunConfig& cfg);
    std::string path(const std::string& name) const;
    void write(const std::string& name, const std::string& content);
    /// lists a file some other writer already put into the directory
    void adopt(const std::string& name);
    /// records a file this subcommand read
    void input(const std::string& name);
    /// writes manifest_<subcommand>.json
    void finish();
    const std::vector<std::string>& outputs() const { return outputs_; }

private:
    std::string dir_, sub_;
    std::string config_text_, config_hash_;
    std::vector<std::pair<std::string, std::string>> inputs_;  // name, sha256
    std::vector<std::string> outputs_;
};

KernelOptions kernel_options(const RunConfig& cfg);
LinearizedOptions linearized_options(const RunConfig& cfg);

/// Grids and operators for one configuration.
struct Workbench {
    RunConfig cfg;
    MomentumGrid grid;
    SpatialGrid space;
    std::unique_ptr<CollisionOperator> op;
    std::unique_ptr<LinearizedOperator> L;
    std::unique_ptr<SpectralPreconditioner> pre;  // at the background state (1, 0, 1)

    explicit Workbench(const RunConfig& c, bool with_preconditioner = true);
    Workbench(const RunConfig& c, int points_per_axis, KernelMode mode, bool with_preconditioner);
};

/// Hilbert level spacing for a config: the remainder step divided by 2*imex_order, so that
/// the step and its dt-halved twin both land on levels (and IMEX-2 has its midpoints).
double hilbert_level_spacing(const RunConfig& cfg);

struct KernelPairStats {
    double null_ratio = 0.0;      // max ||Phi (q^ - p^)|| / ||Phi||
    double min_eigenvalue = 0.0;  // min over pairs of lambda_min(Phi)
    double seconds = 0.0;         // wall time (never written to CSV)
};
/// Seeded uniform pairs in the momentum box, regularization as in the collision table.
KernelPairStats kernel_pair_stats(const RunConfig& cfg, int pairs = limits::kernel_pairs);

// property suites; each returns its rows in a fixed order
std::vector<CheckRow> kernel_suite(const RunConfig& cfg);
std::vector<CheckRow> linearized_suite(const RunConfig& cfg);

struct SubcommandResult {
    std::vector<CheckRow> checks;
    std::vector<std::string> files;
};

SubcommandResult run_check_kernel(const RunConfig& cfg);
SubcommandResult run_check_linearized(const RunConfig& cfg);
SubcommandResult run_euler_solve(const RunConfig& cfg);
SubcommandResult run_hilbert_build(const RunConfig& cfg);
/// Throws PrerequisiteMissing without hilbert.bin. When a run fails the finished runs are
/// persisted and NumericalFailure is rethrown.
SubcommandResult run_knudsen_sweep(const RunConfig& cfg);
SubcommandResult run_report(const RunConfig& cfg);

/// name -> function, in CLI order
const std::vector<std::pair<std::string, std::function<SubcommandResult(const RunConfig&)>>>& subcommands();

/// checks for criteria 7-9 from a finished sweep
std::vector<CheckRow> sweep_checks(const SweepResult& res);

// SVG rendering (deterministic: fixed-precision coordinates)
struct Series {
    std::string label;
    std::vector<double> x, y;
};
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel, const std::vector<Series>& series,
                     bool logx, bool logy, const std::string& annotation = {});

}  // namespace landau
