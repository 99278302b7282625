#pragma once
// Run configuration: flat INI with sections, every key typed and validated.
// Unknown keys are an error so that archived configs never silently drift.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace landau {

struct RunConfig {
    double momentum_radius = 6.0;
    int momentum_points_per_axis = 12;
    int space_cells = 32;
    double space_length = 6.283185307179586;
    double collision_eta_reg = 1e-3;
    std::string collision_table_cache_path;  // directory; empty disables the disk cache
    double linearized_cg_tol = 1e-8;
    int linearized_cg_max_iter = 200;
    double linearized_ortho_tol = 1e-6;
    int weights_N0 = 3;
    double weights_T_margin = 1.05;  // weight temperature T = T_margin * sup T0
    double euler_amplitude = 1e-3;
    double euler_cfl = 0.4;
    double euler_t_final = 0.5;
    int hilbert_k = 2;
    double hilbert_decay_exponent = 0.9;
    std::vector<double> sweep_epsilons{0.1, 0.05, 0.025};
    double solver_dt = 0.0;  // 0: min(0.4 h, 0.1) rounded to divide t_final
    double solver_t_final = 0.5;
    int solver_imex_order = 1;
    double solver_tau_init = 0.5;  // F_R(0) = M^tau G(x)
    std::uint64_t seed = 20240611;
    std::string output_dir = "out";
};

/// Parses INI text; throws ConfigError on unknown keys, bad values or failed validation.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Throws ConfigError when a value is out of range.
void validate(const RunConfig& c);
/// Canonical "section.key = value" listing (sorted, full precision, output_dir left out); the hash is taken over it.
std::string canonical_text(const RunConfig& c);
std::string config_hash(const RunConfig& c);
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);
/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace landau
