#include "landau/harness.hpp"

#include <cblas.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include "json.hpp"
#include <random>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PrerequisiteMissing("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_num(const std::string& s) {
    if (s == "nan" || s == "-nan") return kNaN;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("not a number in CSV: '" + s + "'");
    return v;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

double wnorm(const LinearizedOperator& L, const double* f) { return std::sqrt(L.inner(f, f)); }

// random test functions: Gaussian node values under M^{1/4}, so they decay but are rough
std::vector<double> random_columns(const CellContext& ctx, int ncols, std::mt19937_64& rng) {
    const std::size_t np = ctx.ref.M.size();
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> g(np * ncols);
    for (int c = 0; c < ncols; ++c)
        for (std::size_t a = 0; a < np; ++a) g[c * np + a] = nd(rng) * std::sqrt(ctx.ref.sqrtM[a]);
    return g;
}

// moving test state for the linearized suite; nonzero drift exercises the full Juttner structure
const CellState kProbeState{1.0, {0.05, 0.0, 0.0}, 1.0};

}  // namespace

// ---------------------------------------------------------------------------
// check rows and CSV

CheckRow check_le(const std::string& name, double value, double limit, int criterion) {
    return {name, value, "<= " + format_double(limit), (value <= limit) ? "pass" : "fail", criterion};
}

CheckRow check_ge(const std::string& name, double value, double limit, int criterion) {
    return {name, value, ">= " + format_double(limit), (value >= limit) ? "pass" : "fail", criterion};
}

CheckRow check_in(const std::string& name, double value, double lo, double hi, int criterion) {
    return {name, value, "[" + format_double(lo) + " " + format_double(hi) + "]", (value >= lo && value <= hi) ? "pass" : "fail",
            criterion};
}

CheckRow info_row(const std::string& name, double value) { return {name, value, "", "info", 0}; }

std::string checks_csv(const std::vector<CheckRow>& rows) {
    CsvTable t({"criterion", "check", "value", "threshold", "result"});
    for (const auto& r : rows) t.row({std::to_string(r.criterion), r.check, format_double(r.value), r.threshold, r.pass});
    return t.text();
}

std::vector<CheckRow> parse_checks_csv(const std::string& text) {
    std::vector<CheckRow> out;
    const auto rows = parse_csv(text);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5) throw std::runtime_error("malformed checks CSV row");
        out.push_back({r[1], parse_num(r[2]), r[3], r[4], std::stoi(r[0])});
    }
    return out;
}

void CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw std::logic_error("CSV row width mismatch");
    rows_.push_back(cells);
}

std::string CsvTable::text() const {
    std::string s;
    auto line = [&s](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        s += "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t b = 0;
        for (;;) {
            const auto e = line.find(',', b);
            f.push_back(line.substr(b, e == std::string::npos ? std::string::npos : e - b));
            if (e == std::string::npos) break;
            b = e + 1;
        }
        rows.push_back(std::move(f));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// artifacts

Artifacts::Artifacts(std::string dir, std::string subcommand, const RunConfig& cfg)
    : dir_(std::move(dir)), sub_(std::move(subcommand)), config_text_(canonical_text(cfg)), config_hash_(config_hash(cfg)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory " + dir_);
}

std::string Artifacts::path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

void Artifacts::write(const std::string& name, const std::string& content) {
    const auto p = path(name);
    const auto tmp = p + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("output directory not writable: " + dir_);
        out << content;
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    fs::rename(tmp, p);
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
}

void Artifacts::adopt(const std::string& name) {
    if (!fs::exists(path(name))) throw std::logic_error("adopt: " + name + " was not written");
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
}

void Artifacts::input(const std::string& name) {
    const auto hash = sha256_file(path(name));
    for (auto& [n, h] : inputs_)
        if (n == name) {
            h = hash;
            return;
        }
    inputs_.emplace_back(name, hash);
}

void Artifacts::finish() {
    using nlohmann::ordered_json;
    ordered_json m;
    m["subcommand"] = sub_;
    m["config_hash"] = config_hash_;
    ordered_json cfg = ordered_json::object();
    std::istringstream in(config_text_);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    m["config"] = cfg;
    m["inputs"] = ordered_json::array();
    for (const auto& [n, h] : inputs_) m["inputs"].push_back({{"file", n}, {"sha256", h}});
    m["outputs"] = ordered_json::array();
    for (const auto& n : outputs_) {
        const auto p = path(n);
        m["outputs"].push_back({{"file", n}, {"sha256", sha256_file(p)}, {"bytes", fs::file_size(p)}});
    }
    m["build"] = {{"compiler", __VERSION__}, {"blas", openblas_get_config()}};
    const std::string name = "manifest_" + sub_ + ".json";
    std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("output directory not writable: " + dir_);
    out << m.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// workbench

KernelOptions kernel_options(const RunConfig& cfg) {
    KernelOptions k;
    k.eta_reg = cfg.collision_eta_reg;
    k.cache_dir = cfg.collision_table_cache_path;
    return k;
}

LinearizedOptions linearized_options(const RunConfig& cfg) {
    LinearizedOptions o;
    o.cg_tol = cfg.linearized_cg_tol;
    o.cg_max_iter = cfg.linearized_cg_max_iter;
    o.ortho_tol = cfg.linearized_ortho_tol;
    return o;
}

Workbench::Workbench(const RunConfig& c, bool with_preconditioner)
    : Workbench(c, c.momentum_points_per_axis, KernelMode::Projected, with_preconditioner) {}

Workbench::Workbench(const RunConfig& c, int points_per_axis, KernelMode mode, bool with_preconditioner)
    : cfg(c), grid(build_momentum_grid({c.momentum_radius, points_per_axis})), space(c.space_cells, c.space_length) {
    auto ko = kernel_options(c);
    ko.mode = mode;
    op = std::make_unique<CollisionOperator>(grid, ko);
    L = std::make_unique<LinearizedOperator>(*op, linearized_options(c));
    if (with_preconditioner) {
        const auto ctx = L->prepare(CellState{1.0, {0.0, 0.0, 0.0}, 1.0});
        pre = std::make_unique<SpectralPreconditioner>(*L, *ctx);
    }
}

double hilbert_level_spacing(const RunConfig& cfg) {
    const SpatialGrid sg(cfg.space_cells, cfg.space_length);
    const auto ts = resolve_time_step(sg.h(), cfg.solver_dt, cfg.solver_t_final);
    return ts.dt / (2.0 * cfg.solver_imex_order);
}

// ---------------------------------------------------------------------------
// kernel suite

KernelPairStats kernel_pair_stats(const RunConfig& cfg, int pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    const double R = cfg.momentum_radius;
    const double eta = cfg.collision_eta_reg * build_momentum_grid({R, cfg.momentum_points_per_axis}).spacing();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ud(-R, R);
    KernelPairStats st;
    st.min_eigenvalue = std::numeric_limits<double>::infinity();
    int done = 0;
    while (done < pairs) {
        const Vec3 p{ud(rng), ud(rng), ud(rng)}, q{ud(rng), ud(rng), ud(rng)};
        const double g = rho_minus_one(p, q) * (rho_minus_one(p, q) + 2.0);
        if (!(g > eta * eta)) continue;  // inside the regularized diagonal band
        const Eigen::Matrix3d phi = kernel_phi(p, q, eta).phi;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(phi, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        const double nrm = std::max(std::abs(ev[0]), std::abs(ev[2]));
        const Vec3 ph = p_hat(p), qh = p_hat(q);
        const Eigen::Vector3d d(qh[0] - ph[0], qh[1] - ph[1], qh[2] - ph[2]);
        st.null_ratio = std::max(st.null_ratio, (phi * d).norm() / (nrm * d.norm()));
        st.min_eigenvalue = std::min(st.min_eigenvalue, ev[0]);
        ++done;
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

namespace {

// ||C[M,M]||_inf / ||C[M, M_{1.1 T}]||_inf at the probe state
double equilibrium_defect(const CollisionOperator& op) {
    const CellState s{1.0, {0.05, 0.02, 0.0}, 1.0};
    CellState hot = s;
    hot.T0 *= 1.1;
    const auto ref = op.reference(s);
    const auto Mh = juttner_on_grid(hot, op.grid());
    const auto cmm = collision_bilinear(op, ref.M, ref.M, ref);
    const auto cmh = collision_bilinear(op, ref.M, Mh, ref);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < cmm.size(); ++i) {
        a = std::max(a, std::abs(cmm[i]));
        b = std::max(b, std::abs(cmh[i]));
    }
    return a / b;
}

int coarse_axis(int n) { return std::max(4, (n / 2 + 1) / 2 * 2); }

}  // namespace

std::vector<CheckRow> kernel_suite(const RunConfig& cfg) {
    std::vector<CheckRow> rows;
    const auto ks = kernel_pair_stats(cfg);
    rows.push_back(check_le("kernel_null_ratio", ks.null_ratio, limits::kernel_null, 1));
    rows.push_back(check_ge("kernel_min_eigenvalue", ks.min_eigenvalue, limits::kernel_min_eigenvalue, 1));

    // equilibrium annihilation, default grid and half resolution
    const int n = cfg.momentum_points_per_axis, nc = coarse_axis(n);
    Workbench fine(cfg, n, KernelMode::Projected, false);
    const double dfine = equilibrium_defect(*fine.op);
    double dcoarse = 0.0;
    {
        Workbench coarse(cfg, nc, KernelMode::Projected, false);
        dcoarse = equilibrium_defect(*coarse.op);
    }
    rows.push_back(check_le("cmm_relative", dfine, limits::cmm_relative, 2));
    rows.push_back(info_row("cmm_relative_coarse_n=" + std::to_string(nc), dcoarse));
    rows.push_back(check_ge("cmm_refinement_factor", dcoarse / dfine, limits::cmm_refinement, 2));
    {
        // the unprojected kernel for comparison: its defect is the plain truncation error
        Workbench pf(cfg, n, KernelMode::Plain, false), pc(cfg, nc, KernelMode::Plain, false);
        const double a = equilibrium_defect(*pf.op), b = equilibrium_defect(*pc.op);
        rows.push_back(info_row("cmm_relative_plain", a));
        rows.push_back(info_row("cmm_relative_plain_coarse_n=" + std::to_string(nc), b));
        rows.push_back(info_row("cmm_refinement_factor_plain", b / a));
    }

    // conservation for a perturbed Juttner state
    const auto& grid = fine.grid;
    const CellState s{1.0, {0.03, -0.02, 0.01}, 0.9};
    const auto ref = fine.op->reference(s);
    std::vector<double> g(grid.size());
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const auto& p = grid.p(a);
        g[a] = ref.M[a] * (1.0 + 0.2 * std::sin(p[0]) + 0.1 * p[1] * p[2] / grid.p0(a) + 0.05 * std::cos(p[2]));
    }
    const auto c = collision_bilinear(*fine.op, g, g, ref);
    const auto inv = moments_of(c, grid);
    std::array<std::vector<double>, 5> absm;
    for (auto& v : absm) v.resize(grid.size());
    for (std::size_t a = 0; a < grid.size(); ++a) {
        const auto& p = grid.p(a);
        const double ac = std::abs(c[a]);
        absm[0][a] = ac;
        for (int d = 0; d < 3; ++d) absm[1 + d][a] = ac * std::abs(p[d]);
        absm[4][a] = ac * grid.p0(a);
    }
    std::array<double, 5> res{inv.mass, inv.momentum[0], inv.momentum[1], inv.momentum[2], inv.energy};
    const char* names[5] = {"mass", "momentum_1", "momentum_2", "momentum_3", "energy"};
    for (int q = 0; q < 5; ++q)
        rows.push_back(check_le(std::string("conservation_") + names[q], std::abs(res[q]) / integrate_p(absm[q], grid), limits::conservation, 3));
    return rows;
}

// ---------------------------------------------------------------------------
// linearized suite

std::vector<CheckRow> linearized_suite(const RunConfig& cfg) {
    std::vector<CheckRow> rows;
    Workbench wb(cfg);
    const auto& L = *wb.L;
    const std::size_t np = L.np();
    const auto ctx = L.prepare(kProbeState);
    std::mt19937_64 rng(cfg.seed + 1);

    // operator scale by power iteration (L is w-symmetric and nonnegative)
    std::vector<double> v = random_columns(*ctx, 1, rng);
    double lmax = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double nv = wnorm(L, v.data());
        for (auto& x : v) x /= nv;
        v = L.apply_L(v, *ctx);
        lmax = wnorm(L, v.data());
    }

    double null = 0.0;
    for (const auto& chi : ctx->basis) {
        const auto Lc = L.apply_L(chi, *ctx);
        null = std::max(null, wnorm(L, Lc.data()) / (lmax * wnorm(L, chi.data())));
    }
    rows.push_back(check_le("null_space_residual", null, limits::null_space, 4));

    const int pairs = 20;
    const auto fg = random_columns(*ctx, 2 * pairs, rng);
    std::vector<const CellContext*> cp(2 * pairs, ctx.get());
    std::vector<double> Lfg(fg.size());
    L.apply_L(fg.data(), cp, Lfg.data());
    double defect = 0.0, minq = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pairs; ++k) {
        const double* f = fg.data() + 2 * k * np;
        const double* g = f + np;
        const double* Lf = Lfg.data() + 2 * k * np;
        const double* Lg = Lf + np;
        const double d = std::abs(L.inner(Lf, g) - L.inner(f, Lg)) / (wnorm(L, Lf) * wnorm(L, g) + wnorm(L, f) * wnorm(L, Lg));
        defect = std::max(defect, d);
        minq = std::min(minq, L.inner(Lf, f) / (lmax * L.inner(f, f)));
    }
    rows.push_back(check_le("self_adjoint_defect", defect, limits::self_adjoint, 4));
    rows.push_back(info_row("min_rayleigh_quotient", minq));

    const auto cf = coercivity_spectrum(L, *ctx);
    double delta_ref = 0.0;
    const int nref = cfg.momentum_points_per_axis + 4;
    {
        Workbench refined(cfg, nref, KernelMode::Projected, false);
        const auto rctx = refined.L->prepare(kProbeState);
        delta_ref = coercivity_spectrum(*refined.L, *rctx).delta;
    }
    rows.push_back(check_ge("coercivity_delta", cf.delta, 0.0, 4));
    rows.push_back(info_row("coercivity_delta_n=" + std::to_string(nref), delta_ref));
    rows.push_back(check_le("coercivity_relative_change", std::abs(delta_ref - cf.delta) / cf.delta, limits::coercivity_drift, 4));
    rows.push_back(info_row("coercivity_largest", cf.largest));
    rows.push_back(info_row("operator_norm_estimate", lmax));

    // round trip, all samples in one batch; the preconditioner sits at the background state as in the solver
    const int ns = limits::roundtrip_samples;
    auto g = random_columns(*ctx, ns, rng);
    std::vector<const CellContext*> cs(ns, ctx.get());
    std::vector<double> r(g.size()), u(g.size());
    L.apply_L(g.data(), cs, r.data());
    const auto reps = L.invert_L_on_orthogonal(r.data(), cs, u.data(), wb.pre.get());
    double rt = 0.0;
    int iters = 0;
    bool conv = true;
    for (int c = 0; c < ns; ++c) {
        double* gc = g.data() + c * np;
        L.remove_macro(gc, *ctx);
        std::vector<double> e(np);
        for (std::size_t a = 0; a < np; ++a) e[a] = u[c * np + a] - gc[a];
        rt = std::max(rt, wnorm(L, e.data()) / wnorm(L, gc));
        iters = std::max(iters, reps[c].iterations);
        conv = conv && reps[c].converged;
    }
    rows.push_back(check_le("roundtrip_error", rt, limits::roundtrip, 5));
    rows.push_back(info_row("roundtrip_max_cg_iterations", iters));
    rows.push_back(info_row("roundtrip_all_converged", conv ? 1.0 : 0.0));
    return rows;
}

// ---------------------------------------------------------------------------
// SVG

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel, const std::vector<Series>& series,
                     bool logx, bool logy, const std::string& annotation) {
    const double W = 640, H = 420, ml = 80, mr = 150, mt = 40, mb = 60;
    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((logx && !(s.x[i] > 0)) || (logy && !(s.y[i] > 0)) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) y0 -= 0.5 * std::max(1.0, std::abs(y0)), y1 += 0.5 * std::max(1.0, std::abs(y1));
    const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
    x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
    auto X = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
    auto f2 = [](double v) { return fmt("%.2f", v); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    s += "<text x=\"" + f2(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
    s += "<rect x=\"" + f2(ml) + "\" y=\"" + f2(mt) + "\" width=\"" + f2(W - ml - mr) + "\" height=\"" + f2(H - mt - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    // ticks: decades on log axes, 5 even steps otherwise
    auto ticks = [](double a, double b, bool lg) {
        std::vector<double> t;
        if (lg) {
            for (double d = std::ceil(a); d <= std::floor(b); d += 1.0) t.push_back(d);
            if (t.size() < 2) t = {a, 0.5 * (a + b), b};
        } else {
            for (int i = 0; i <= 4; ++i) t.push_back(a + (b - a) * i / 4.0);
        }
        return t;
    };
    auto label = [](double v, bool lg) { return lg ? fmt("%.3g", std::pow(10.0, v)) : fmt("%.3g", v); };
    for (double t : ticks(x0, x1, logx)) {
        const double px = ml + (t - x0) / (x1 - x0) * (W - ml - mr);
        s += "<line x1=\"" + f2(px) + "\" y1=\"" + f2(H - mb) + "\" x2=\"" + f2(px) + "\" y2=\"" + f2(H - mb + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + f2(px) + "\" y=\"" + f2(H - mb + 18) + "\" text-anchor=\"middle\">" + label(t, logx) + "</text>\n";
    }
    for (double t : ticks(y0, y1, logy)) {
        const double py = H - mb - (t - y0) / (y1 - y0) * (H - mt - mb);
        s += "<line x1=\"" + f2(ml - 5) + "\" y1=\"" + f2(py) + "\" x2=\"" + f2(ml) + "\" y2=\"" + f2(py) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + f2(ml - 8) + "\" y=\"" + f2(py + 4) + "\" text-anchor=\"end\">" + label(t, logy) + "</text>\n";
    }
    s += "<text x=\"" + f2(ml + (W - ml - mr) / 2) + "\" y=\"" + f2(H - 16) + "\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    s += "<text x=\"18\" y=\"" + f2(mt + (H - mt - mb) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         f2(mt + (H - mt - mb) / 2) + ")\">" + ylabel + "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& sr = series[k];
        const std::string col = colors[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            if ((logx && !(sr.x[i] > 0)) || (logy && !(sr.y[i] > 0)) || !std::isfinite(sr.y[i])) continue;
            pts += (pts.empty() ? "" : " ") + f2(X(sr.x[i])) + "," + f2(Y(sr.y[i]));
            s += "<circle cx=\"" + f2(X(sr.x[i])) + "\" cy=\"" + f2(Y(sr.y[i])) + "\" r=\"3\" fill=\"" + col + "\"/>\n";
        }
        if (!pts.empty()) s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.5\"/>\n";
        const double ly = mt + 14 + 18 * k;
        s += "<line x1=\"" + f2(W - mr + 12) + "\" y1=\"" + f2(ly - 4) + "\" x2=\"" + f2(W - mr + 32) + "\" y2=\"" + f2(ly - 4) +
             "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + f2(W - mr + 36) + "\" y=\"" + f2(ly) + "\">" + sr.label + "</text>\n";
    }
    if (!annotation.empty()) s += "<text x=\"" + f2(ml + 10) + "\" y=\"" + f2(mt + 18) + "\">" + annotation + "</text>\n";
    s += "</svg>\n";
    return s;
}

namespace {

std::map<std::string, std::size_t> columns(const std::vector<std::string>& header) {
    std::map<std::string, std::size_t> m;
    for (std::size_t i = 0; i < header.size(); ++i) m[header[i]] = i;
    return m;
}

// convergence.svg, h2_series.svg and energy.svg from the sweep CSV texts
void render_sweep_plots(Artifacts& art, const std::string& summary_csv, const std::string& result_csv, const std::string& slope_txt) {
    const auto sum = parse_csv(summary_csv);
    Series conv{"sup_t |F-M|_H2", {}, {}};
    if (!sum.empty()) {
        const auto c = columns(sum[0]);
        for (std::size_t i = 1; i < sum.size(); ++i) {
            conv.x.push_back(parse_num(sum[i][c.at("epsilon")]));
            conv.y.push_back(parse_num(sum[i][c.at("sup_h2")]));
        }
    }
    std::vector<Series> cs{conv};
    if (conv.x.size() >= 1 && conv.y.front() > 0) {
        // slope-1 guide through the largest epsilon
        Series ref{"slope 1", {}, {}};
        for (double e : conv.x) {
            ref.x.push_back(e);
            ref.y.push_back(conv.y.front() * e / conv.x.front());
        }
        cs.push_back(ref);
    }
    std::string slope_line = slope_txt.substr(0, slope_txt.find('\n'));
    art.write("convergence.svg", svg_plot("Knudsen sweep", "epsilon", "sup_t |F - M|_H2", cs, true, true, slope_line));

    const auto res = parse_csv(result_csv);
    std::vector<Series> h2, en;
    if (!res.empty()) {
        const auto c = columns(res[0]);
        std::map<double, std::size_t, std::greater<double>> idx;
        for (std::size_t i = 1; i < res.size(); ++i) {
            const double eps = parse_num(res[i][c.at("epsilon")]);
            if (!idx.count(eps)) {
                idx[eps] = h2.size();
                h2.push_back({"eps=" + res[i][c.at("epsilon")], {}, {}});
                en.push_back({"E, eps=" + res[i][c.at("epsilon")], {}, {}});
                en.push_back({"E+intD, eps=" + res[i][c.at("epsilon")], {}, {}});
            }
            const std::size_t k = idx[eps];
            const double t = parse_num(res[i][c.at("t")]);
            const double E = parse_num(res[i][c.at("E")]);
            h2[k].x.push_back(t);
            h2[k].y.push_back(parse_num(res[i][c.at("h2_norm")]));
            en[2 * k].x.push_back(t);
            en[2 * k].y.push_back(E);
            en[2 * k + 1].x.push_back(t);
            en[2 * k + 1].y.push_back(E + parse_num(res[i][c.at("D_integral")]));
        }
    }
    art.write("h2_series.svg", svg_plot("|F - M|_H2 along the runs", "t", "|F - M|_H2", h2, false, true));
    art.write("energy.svg", svg_plot("Energy and dissipation", "t", "E(t), E(t) + int D", en, false, true));
}

std::string md_table(const std::vector<CheckRow>& rows) {
    std::string s = "| criterion | check | value | threshold | result |\n|---|---|---|---|---|\n";
    for (const auto& r : rows)
        s += "| " + (r.criterion ? std::to_string(r.criterion) : std::string("-")) + " | " + r.check + " | " + format_double(r.value) +
             " | " + r.threshold + " | " + r.pass + " |\n";
    return s;
}

void print_rows(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows)
        std::printf("  %-40s %-24s %-16s %s\n", r.check.c_str(), format_double(r.value).c_str(), r.threshold.c_str(), r.pass.c_str());
}

EulerSolver make_euler(const MomentumGrid& grid, const SpatialGrid& sg, const RunConfig& cfg, double nu = EulerOptions{}.nu) {
    EulerOptions eo;
    eo.cfl = cfg.euler_cfl;
    eo.nu = nu;
    return EulerSolver(sg, std::make_shared<LatticeClosure>(grid), eo);
}

}  // namespace

// ---------------------------------------------------------------------------
// subcommands

SubcommandResult run_check_kernel(const RunConfig& cfg) {
    Artifacts art(cfg.output_dir, "check-kernel", cfg);
    SubcommandResult out;
    out.checks = kernel_suite(cfg);
    art.write("kernel_checks.csv", checks_csv(out.checks));
    art.finish();
    print_rows(out.checks);
    out.files = art.outputs();
    return out;
}

SubcommandResult run_check_linearized(const RunConfig& cfg) {
    Artifacts art(cfg.output_dir, "check-linearized", cfg);
    SubcommandResult out;
    out.checks = linearized_suite(cfg);
    art.write("linearized_checks.csv", checks_csv(out.checks));
    art.finish();
    print_rows(out.checks);
    out.files = art.outputs();
    return out;
}

SubcommandResult run_euler_solve(const RunConfig& cfg) {
    Artifacts art(cfg.output_dir, "euler-solve", cfg);
    const MomentumGrid grid = build_momentum_grid({cfg.momentum_radius, cfg.momentum_points_per_axis});
    const SpatialGrid sg(cfg.space_cells, cfg.space_length);
    const auto eu = make_euler(grid, sg, cfg);
    const int steps = static_cast<int>(std::ceil(cfg.euler_t_final / (cfg.euler_cfl * sg.h()) - 1e-9));
    const double dt = cfg.euler_t_final / steps;

    std::vector<EulerState> hist{eu.make_state(wave_state(sg, cfg.euler_amplitude))};
    CsvTable tab({"step", "t", "mass", "momentum", "energy", "max_abs_u", "min_T0", "max_T0"});
    auto record = [&](int k, const EulerState& s) {
        const auto tot = eu.totals(s);
        double umax = 0.0, tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
        for (std::size_t i = 0; i < s.prim.size(); ++i) {
            umax = std::max(umax, std::abs(s.prim.u[i][0]));
            tmin = std::min(tmin, s.prim.T0[i]);
            tmax = std::max(tmax, s.prim.T0[i]);
        }
        tab.row({CsvTable::num(k), CsvTable::num(s.t), CsvTable::num(tot[0]), CsvTable::num(tot[1]), CsvTable::num(tot[2]),
                 CsvTable::num(umax), CsvTable::num(tmin), CsvTable::num(tmax)});
    };
    record(0, hist.back());
    for (int k = 1; k <= steps; ++k) {
        hist.push_back(eu.step(hist.back(), dt));
        record(k, hist.back());
    }
    const auto& fin = hist.back();
    CsvTable prof({"x", "n0", "u1", "T0"});
    for (int i = 0; i < sg.cells; ++i)
        prof.row({CsvTable::num(sg.x(i)), CsvTable::num(fin.prim.n0[i]), CsvTable::num(fin.prim.u[i][0]), CsvTable::num(fin.prim.T0[i])});

    const auto a = eu.totals(hist.front()), b = eu.totals(fin);
    double tsup = 0.0;
    for (const auto& s : hist)
        for (double T : s.prim.T0) tsup = std::max(tsup, T);
    const auto z = diagnostics_Z(eu, hist, cfg.weights_T_margin * tsup, 0.0);
    std::vector<CheckRow> rows{info_row("mass_drift_relative", std::abs(b[0] - a[0]) / std::abs(a[0])),
                               info_row("momentum_drift", std::abs(b[1] - a[1])),
                               info_row("energy_drift_relative", std::abs(b[2] - a[2]) / std::abs(a[2])),
                               info_row("Z", z.Z),
                               info_row("Zcal", z.Zcal),
                               info_row("Y_floor", z.Y_floor),
                               info_row("window_ok", z.window_ok ? 1.0 : 0.0)};
    art.write("euler.csv", tab.text());
    art.write("euler_profile.csv", prof.text());
    art.write("euler_checks.csv", checks_csv(rows));
    art.finish();
    print_rows(rows);
    return {rows, art.outputs()};
}

SubcommandResult run_hilbert_build(const RunConfig& cfg) {
    Artifacts art(cfg.output_dir, "hilbert-build", cfg);
    const SpatialGrid sg(cfg.space_cells, cfg.space_length);
    const auto ts = resolve_time_step(sg.h(), cfg.solver_dt, cfg.solver_t_final);
    const double tau = hilbert_level_spacing(cfg);
    if (tau > cfg.euler_cfl * sg.h())
        throw ConfigError("hilbert level spacing " + format_double(tau) + " exceeds euler.cfl * h = " + format_double(cfg.euler_cfl * sg.h()));
    const int nlevels = std::max(5, ts.steps * 2 * cfg.solver_imex_order + 1);

    Workbench wb(cfg);
    const auto eu = make_euler(wb.grid, sg, cfg);
    HilbertOptions ho;
    ho.k = cfg.hilbert_k;
    ho.decay_exponent = cfg.hilbert_decay_exponent;
    HilbertBuilder hb(*wb.L, eu, ho);
    auto data = hb.build(wave_state(sg, cfg.euler_amplitude), tau, nlevels, wb.pre.get());
    data.amplitude = cfg.euler_amplitude;
    data.save(art.path("hilbert.bin"));
    art.adopt("hilbert.bin");

    // every interior level, every defining equation
    CsvTable rt({"level", "t", "n", "residual", "scale", "relative"});
    std::map<int, double> worst;
    for (int j = 1; j + 1 < nlevels; ++j)
        for (const auto& r : hb.residuals(data, j)) {
            rt.row({CsvTable::num(j), CsvTable::num(r.t), CsvTable::num(r.n), CsvTable::num(r.residual), CsvTable::num(r.scale),
                    CsvTable::num(r.relative())});
            worst[r.n] = std::max(worst[r.n], r.relative());
        }
    const double tol = sg.h() * sg.h() + cfg.linearized_cg_tol;
    std::vector<CheckRow> rows;
    for (const auto& [n, v] : worst) rows.push_back(check_le("hierarchy_residual_n=" + std::to_string(n), v, tol, 6));

    // decay: fitted constant over all levels against the first half; the bound must not keep growing
    HilbertData half;
    half.k = data.k;
    half.tau = data.tau;
    half.levels.assign(data.levels.begin(), data.levels.begin() + (nlevels + 1) / 2);
    CsvTable dt({"n", "C_fit", "C_fit_first_half", "t_at_max", "cell_at_max", "p_at_max", "at_boundary"});
    for (int n = 0; n + 1 < data.orders(); ++n) {
        const auto d = decay_check(data, n, cfg.hilbert_decay_exponent, wb.grid);
        const auto dh = decay_check(half, n, cfg.hilbert_decay_exponent, wb.grid);
        dt.row({CsvTable::num(n), CsvTable::num(d.C_fit), CsvTable::num(dh.C_fit), CsvTable::num(d.t_at_max), CsvTable::num(d.cell_at_max),
                CsvTable::num(d.p_at_max), CsvTable::num(d.at_boundary ? 1 : 0)});
        const double growth = (std::isfinite(d.C_fit) && dh.C_fit > 0.0) ? d.C_fit / dh.C_fit : (d.C_fit == 0.0 ? 1.0 : kNaN);
        rows.push_back(info_row("decay_C_n=" + std::to_string(n), d.C_fit));
        rows.push_back(check_le("decay_growth_n=" + std::to_string(n), growth, limits::decay_growth, 6));
    }
    art.write("hilbert_residuals.csv", rt.text());
    art.write("decay.csv", dt.text());
    art.write("hilbert_checks.csv", checks_csv(rows));
    art.finish();
    print_rows(rows);
    return {rows, art.outputs()};
}

std::vector<CheckRow> sweep_checks(const SweepResult& res) {
    std::vector<CheckRow> rows;
    rows.push_back(check_in("h2_slope", res.degenerate ? kNaN : res.slope, limits::slope_lo, limits::slope_hi, 7));
    double dmin = std::numeric_limits<double>::infinity(), f0 = dmin, fr = dmin;
    auto scan = [&](const RunSeries& r) {
        double dmax = 0.0, lo = std::numeric_limits<double>::infinity();
        for (const auto& er : r.energies)
            for (const auto& [name, v] : er.terms)
                if (name.rfind("D:", 0) == 0) {
                    dmax = std::max(dmax, std::abs(v));
                    lo = std::min(lo, v);
                }
        if (dmax > 0.0) dmin = std::min(dmin, lo / dmax);
        fr = std::min(fr, r.min_F / r.peak_M);
    };
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        const auto& r = res.runs[i];
        const std::string e = format_double(r.epsilon);
        rows.push_back(info_row("sup_h2_eps=" + e, r.sup_h2));
        rows.push_back(info_row("C_fit_eps=" + e, r.C_fit));
        rows.push_back(info_row("C_fit_ED_eps=" + e, r.C_fit_ED));
        if (i < res.halved.size()) {
            const double a = r.C_fit, b = res.halved[i].C_fit;
            double ratio = 1.0;
            if (a > 0.0 && b > 0.0)
                ratio = std::max(a, b) / std::min(a, b);
            else if (a > 0.0 || b > 0.0)
                ratio = std::numeric_limits<double>::infinity();
            rows.push_back(check_le("C_fit_halving_ratio_eps=" + e, ratio, limits::cfit_halving, 8));
            scan(res.halved[i]);
        }
        scan(r);
        f0 = std::min(f0, r.min_F0 / r.peak_M);
        double mac = 0.0;
        for (const auto& [k, v] : r.macro.macabc) mac = std::max(mac, std::abs(v));
        rows.push_back(info_row("macro_relative_eps=" + e, r.macro.macabc_scale > 0 ? mac / r.macro.macabc_scale : mac));
        double cons = 0.0;
        for (double c : r.macro.conservation) cons = std::max(cons, c);
        rows.push_back(info_row("macro_conservation_relative_eps=" + e,
                                r.macro.conservation_scale > 0 ? cons / r.macro.conservation_scale : cons));
        rows.push_back(info_row("md_ratio_eps=" + e, r.macro.md_ratio));
    }
    if (res.halved.size() < res.runs.size()) rows.push_back(check_le("C_fit_halving_ratio", kNaN, limits::cfit_halving, 8));
    rows.push_back(check_ge("min_D_term_relative", res.runs.empty() ? kNaN : dmin, limits::dissipation_floor, 8));
    rows.push_back(check_ge("min_F0_relative", res.runs.empty() ? kNaN : f0, 0.0, 9));
    rows.push_back(check_ge("min_F_relative", res.runs.empty() ? kNaN : fr, -limits::positivity, 9));
    return rows;
}

SubcommandResult run_knudsen_sweep(const RunConfig& cfg) {
    const std::string bin = (fs::path(cfg.output_dir) / "hilbert.bin").string();
    if (!fs::exists(bin)) throw PrerequisiteMissing(bin + " not found; run hilbert-build with the same config first");
    Artifacts art(cfg.output_dir, "knudsen-sweep", cfg);
    const auto data = HilbertData::load(bin);
    art.input("hilbert.bin");
    const double tau = hilbert_level_spacing(cfg);
    if (data.points_per_axis != cfg.momentum_points_per_axis || std::abs(data.radius - cfg.momentum_radius) > 1e-12 ||
        data.cells != cfg.space_cells || std::abs(data.length - cfg.space_length) > 1e-12 || data.k != cfg.hilbert_k ||
        std::abs(data.tau - tau) > 1e-12 * tau || std::abs(data.amplitude - cfg.euler_amplitude) > 1e-15 ||
        data.levels.empty() || data.levels.back().t < cfg.solver_t_final - 1e-9)
        throw PrerequisiteMissing(bin + " was built for a different configuration; rerun hilbert-build with this config");

    Workbench wb(cfg);
    const SpatialGrid sg(data.cells, data.length);
    const auto eu = make_euler(wb.grid, sg, cfg, data.nu);
    std::vector<EulerState> hist;
    double tsup = 0.0;
    for (const auto& lv : data.levels) {
        hist.push_back(eu.make_state(lv.prim, lv.t));
        for (double T : lv.prim.T0) tsup = std::max(tsup, T);
    }
    const double Tw = cfg.weights_T_margin * tsup;
    const auto z = diagnostics_Z(eu, hist, Tw, 0.0);

    SweepOptions so;
    so.epsilons = cfg.sweep_epsilons;
    so.base.dt = cfg.solver_dt;
    so.base.t_final = cfg.solver_t_final;
    so.base.imex_order = cfg.solver_imex_order;
    so.base.tau_init = cfg.solver_tau_init;
    so.base.weights = WeightSpec{cfg.weights_N0, Tw, 0};
    so.base.Zcal = z.Zcal;
    so.dt_halving = true;
    {
        // configuration problems surface here (exit 2), before any run
        RemainderOptions o = so.base;
        o.epsilon = so.epsilons.front();
        RemainderSolver probe(*wb.L, data, o, wb.pre.get());
        o.dt = probe.dt() / 2.0;
        RemainderSolver probe_half(*wb.L, data, o, wb.pre.get());
    }
    const auto res = knudsen_sweep(*wb.L, data, so, wb.pre.get(), [](const RunSeries& r, bool halved) {
        std::printf("  eps=%s%s sup_h2=%s\n", format_double(r.epsilon).c_str(), halved ? " (dt/2)" : "", format_double(r.sup_h2).c_str());
        std::fflush(stdout);
    });

    const std::vector<std::string> series_cols{"epsilon", "t", "h2_norm", "E", "D_integral", "min_F"};
    CsvTable main(series_cols), halved(series_cols);
    CsvTable terms({"epsilon", "dt", "t", "term", "value"});
    auto add_series = [&](CsvTable& tab, const RunSeries& r) {
        for (std::size_t s = 0; s < r.records.size(); ++s) {
            const auto& rec = r.records[s];
            tab.row({CsvTable::num(r.epsilon), CsvTable::num(rec.t), CsvTable::num(rec.h2_norm), CsvTable::num(rec.E),
                     CsvTable::num(rec.D_integral), CsvTable::num(rec.min_F)});
            for (const auto& [name, v] : r.energies[s].terms)
                terms.row({CsvTable::num(r.epsilon), CsvTable::num(r.dt), CsvTable::num(rec.t), name, CsvTable::num(v)});
        }
    };
    CsvTable summary({"epsilon", "dt", "sup_h2", "max_E", "E0", "min_F", "min_F0", "peak_M", "C_fit", "C_fit_ED", "halved_dt",
                      "halved_sup_h2", "halved_C_fit", "halved_C_fit_ED", "halved_min_F"});
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        const auto& r = res.runs[i];
        add_series(main, r);
        std::vector<std::string> row{CsvTable::num(r.epsilon), CsvTable::num(r.dt),     CsvTable::num(r.sup_h2),
                                     CsvTable::num(r.max_E),   CsvTable::num(r.records.front().E), CsvTable::num(r.min_F),
                                     CsvTable::num(r.min_F0),  CsvTable::num(r.peak_M), CsvTable::num(r.C_fit),
                                     CsvTable::num(r.C_fit_ED)};
        if (i < res.halved.size()) {
            const auto& hr = res.halved[i];
            add_series(halved, hr);
            for (double v : {hr.dt, hr.sup_h2, hr.C_fit, hr.C_fit_ED, hr.min_F}) row.push_back(CsvTable::num(v));
        } else {
            for (int k = 0; k < 5; ++k) row.push_back(CsvTable::num(kNaN));
        }
        summary.row(row);
    }
    std::string slope = "slope = " + (res.degenerate ? std::string("nan") : format_double(res.slope)) + "\n";
    if (res.degenerate && !res.failed) slope += "degenerate: all norms zero\n";
    if (res.failed) slope += "incomplete: " + res.error + "\n";

    auto rows = sweep_checks(res);
    rows.push_back(info_row("Zcal", z.Zcal));
    rows.push_back(info_row("window_ok", z.window_ok ? 1.0 : 0.0));
    rows.push_back(info_row("weight_temperature", Tw));

    art.write("sweep_result.csv", main.text());
    art.write("sweep_halved.csv", halved.text());
    art.write("energy_terms.csv", terms.text());
    art.write("sweep_summary.csv", summary.text());
    art.write("slope.txt", slope);
    art.write("sweep_checks.csv", checks_csv(rows));
    render_sweep_plots(art, summary.text(), main.text(), slope);
    art.finish();
    print_rows(rows);
    if (res.failed) throw NumericalFailure("knudsen sweep aborted (partial results written): " + res.error);
    return {rows, art.outputs()};
}

SubcommandResult run_report(const RunConfig& cfg) {
    Artifacts art(cfg.output_dir, "report", cfg);
    static const std::vector<std::pair<std::string, std::string>> suites{{"kernel_checks.csv", "Collision kernel"},
                                                                         {"linearized_checks.csv", "Linearized operator"},
                                                                         {"euler_checks.csv", "Euler backbone"},
                                                                         {"hilbert_checks.csv", "Hilbert hierarchy"},
                                                                         {"sweep_checks.csv", "Knudsen sweep"}};
    SubcommandResult out;
    std::string md = "# Run summary\n\nconfig hash `" + config_hash(cfg) + "`\n";
    int found = 0;
    for (const auto& [file, title] : suites) {
        if (!fs::exists(art.path(file))) continue;
        ++found;
        art.input(file);
        const auto rows = parse_checks_csv(read_file(art.path(file)));
        out.checks.insert(out.checks.end(), rows.begin(), rows.end());
        md += "\n## " + title + "\n\n" + md_table(rows);
    }
    const bool have_sweep = fs::exists(art.path("sweep_summary.csv")) && fs::exists(art.path("sweep_result.csv")) &&
                            fs::exists(art.path("slope.txt"));
    if (have_sweep) {
        for (const char* f : {"sweep_summary.csv", "sweep_result.csv", "slope.txt"}) art.input(f);
        const auto summary = read_file(art.path("sweep_summary.csv"));
        const auto slope = read_file(art.path("slope.txt"));
        render_sweep_plots(art, summary, read_file(art.path("sweep_result.csv")), slope);
        md += "\n## Convergence\n\nFitted log-log slope of sup_t |F - M|_H2 against epsilon: " + slope.substr(0, slope.find('\n')) +
              " (accepted range [" + format_double(limits::slope_lo) + ", " + format_double(limits::slope_hi) + "])\n\n";
        const auto rows = parse_csv(summary);
        if (!rows.empty()) {
            const auto c = columns(rows[0]);
            md += "| epsilon | dt | sup_h2 | max_E | C_fit | min_F |\n|---|---|---|---|---|---|\n";
            for (std::size_t i = 1; i < rows.size(); ++i)
                md += "| " + rows[i][c.at("epsilon")] + " | " + rows[i][c.at("dt")] + " | " + rows[i][c.at("sup_h2")] + " | " +
                      rows[i][c.at("max_E")] + " | " + rows[i][c.at("C_fit")] + " | " + rows[i][c.at("min_F")] + " |\n";
        }
        md += "\nPlots: convergence.svg, h2_series.svg, energy.svg\n";
        ++found;
    }
    if (!found) throw PrerequisiteMissing("nothing to report in " + cfg.output_dir + "; run a check or sweep subcommand first");
    // pass/fail per criterion over all rows seen
    std::map<int, std::string> verdict;
    for (const auto& r : out.checks) {
        if (!r.criterion) continue;
        auto& v = verdict[r.criterion];
        if (v.empty()) v = "pass";
        if (r.pass != "pass") v = "fail";
    }
    md += "\n## Criteria\n\n| criterion | result |\n|---|---|\n";
    for (const auto& [k, v] : verdict) md += "| " + std::to_string(k) + " | " + v + " |\n";
    art.write("summary.md", md);
    art.finish();
    for (const auto& [k, v] : verdict) std::printf("  criterion %d: %s\n", k, v.c_str());
    out.files = art.outputs();
    return out;
}

const std::vector<std::pair<std::string, std::function<SubcommandResult(const RunConfig&)>>>& subcommands() {
    static const std::vector<std::pair<std::string, std::function<SubcommandResult(const RunConfig&)>>> s{
        {"check-kernel", run_check_kernel},   {"check-linearized", run_check_linearized}, {"euler-solve", run_euler_solve},
        {"hilbert-build", run_hilbert_build}, {"knudsen-sweep", run_knudsen_sweep},       {"report", run_report}};
    return s;
}

}  // namespace landau
