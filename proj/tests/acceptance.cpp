// Acceptance run: one line per criterion, nonzero exit when any fails.
// Runs in the build directory; artifacts go to acceptance_*/ there.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "landau/config.hpp"
#include "landau/errors.hpp"
#include "landau/harness.hpp"
#include "landau/parallel.hpp"

using namespace landau;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;
    void add(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::map<int, Verdict> verdicts;

void absorb(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows) {
        if (!r.criterion) continue;
        auto& v = verdicts[r.criterion];
        v.pass = v.pass && r.pass == "pass";
        v.add(r.check + "=" + format_double(r.value) + (r.pass == "pass" ? "" : " (FAIL " + r.threshold + ")"));
    }
}

void runtime(int criterion, const std::string& what, double secs, double limit) {
    auto& v = verdicts[criterion];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s %.1fs (limit %.0fs)", what.c_str(), secs, limit);
    v.add(buf);
    if (secs > limit) v.pass = false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small chain through the real CLI, twice, compared byte for byte
Verdict determinism(const fs::path& cli) {
    Verdict v;
    const std::string ini =
        "[momentum]\npoints_per_axis = 8\n[space]\ncells = 16\n[solver]\nt_final = 0.2\n"
        "[sweep]\nepsilons = 0.1, 0.05, 0.025\n";
    {
        std::ofstream("acceptance_small.ini") << ini;
    }
    const std::vector<std::string> dirs{"acceptance_repeat_a", "acceptance_repeat_b"};
    for (const auto& d : dirs) {
        fs::remove_all(d);
        for (const auto& [name, fn] : subcommands()) {
            const std::string cmd = cli.string() + " " + name + " --config acceptance_small.ini --output-dir " + d + " > /dev/null";
            const int rc = std::system(cmd.c_str());
            if (rc != 0) {
                v.pass = false;
                v.add(name + " exited with status " + std::to_string(rc));
                return v;
            }
        }
    }
    int compared = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
        const auto name = e.path().filename().string();
        const auto ext = e.path().extension().string();
        if (ext != ".csv" && ext != ".txt" && ext != ".svg" && ext != ".json" && ext != ".md" && ext != ".bin") continue;
        ++compared;
        if (slurp(e.path()) != slurp(fs::path(dirs[1]) / name)) {
            v.pass = false;
            v.add(name + " differs");
        }
    }
    v.add(std::to_string(compared) + " files compared");
    if (compared == 0) v.pass = false;
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    select_blas_kernel(argv);
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    configure_blas_threads();
    const fs::path self = fs::absolute(argv[0]).parent_path();

    RunConfig cfg;
    cfg.output_dir = "acceptance_out";
    fs::remove_all(cfg.output_dir);

    try {
        auto t0 = std::chrono::steady_clock::now();
        const auto ks = kernel_pair_stats(cfg);
        runtime(1, "kernel pairs", ks.seconds, 10.0);

        t0 = std::chrono::steady_clock::now();
        absorb(run_check_kernel(cfg).checks);
        runtime(2, "kernel suite", seconds_since(t0), 60.0);

        t0 = std::chrono::steady_clock::now();
        absorb(run_check_linearized(cfg).checks);
        runtime(5, "linearized suite", seconds_since(t0), 120.0);

        run_euler_solve(cfg);
        absorb(run_hilbert_build(cfg).checks);

        t0 = std::chrono::steady_clock::now();
        absorb(run_knudsen_sweep(cfg).checks);
        runtime(7, "sweep", seconds_since(t0), 1800.0);
        run_report(cfg);

        // supplementary: the same sweep from initial data closer to M (tau_init = 0.9)
        RunConfig alt = cfg;
        alt.solver_tau_init = 0.9;
        alt.output_dir = "acceptance_tau09";
        fs::remove_all(alt.output_dir);
        fs::create_directories(alt.output_dir);
        fs::copy_file(fs::path(cfg.output_dir) / "hilbert.bin", fs::path(alt.output_dir) / "hilbert.bin");
        for (const auto& r : run_knudsen_sweep(alt).checks)
            if (r.check == "h2_slope") verdicts[7].add("supplementary tau_init=0.9 slope " + format_double(r.value));
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }

    verdicts[10] = determinism(self / "landau_cli");

    bool all = true;
    std::printf("\n");
    for (int c = 1; c <= 10; ++c) {
        const auto it = verdicts.find(c);
        const bool pass = it != verdicts.end() && it->second.pass;
        all = all && pass;
        std::printf("criterion %2d: %s  %s\n", c, pass ? "PASS" : "FAIL", it == verdicts.end() ? "not evaluated" : it->second.detail.c_str());
    }
    return all ? 0 : 1;
}
