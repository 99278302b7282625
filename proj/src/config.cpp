#include "landau/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v)) throw ConfigError(key + ": not a number: '" + s + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& s) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key + ": not an integer: '" + s + "'");
    return v;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field>& schema() {
    static const std::map<std::string, Field> s = [] {
        std::map<std::string, Field> m;
        auto dbl = [&m](const char* key, double RunConfig::*mem) {
            std::string k = key;
            m[k] = {[k, mem](RunConfig& c, const std::string& v) { c.*mem = to_double(k, v); },
                    [mem](const RunConfig& c) { return format_double(c.*mem); }};
        };
        auto integer = [&m](const char* key, int RunConfig::*mem) {
            std::string k = key;
            m[k] = {[k, mem](RunConfig& c, const std::string& v) {
                        const auto x = to_int(k, v);
                        if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(k + ": out of range");
                        c.*mem = static_cast<int>(x);
                    },
                    [mem](const RunConfig& c) { return std::to_string(c.*mem); }};
        };
        auto str = [&m](const char* key, std::string RunConfig::*mem) {
            m[key] = {[mem](RunConfig& c, const std::string& v) { c.*mem = v; }, [mem](const RunConfig& c) { return c.*mem; }};
        };
        dbl("momentum.radius", &RunConfig::momentum_radius);
        integer("momentum.points_per_axis", &RunConfig::momentum_points_per_axis);
        integer("space.cells", &RunConfig::space_cells);
        dbl("space.length", &RunConfig::space_length);
        dbl("collision.eta_reg", &RunConfig::collision_eta_reg);
        str("collision.table_cache_path", &RunConfig::collision_table_cache_path);
        dbl("linearized.cg_tol", &RunConfig::linearized_cg_tol);
        integer("linearized.cg_max_iter", &RunConfig::linearized_cg_max_iter);
        dbl("linearized.ortho_tol", &RunConfig::linearized_ortho_tol);
        integer("weights.N0", &RunConfig::weights_N0);
        dbl("weights.T_margin", &RunConfig::weights_T_margin);
        dbl("euler.amplitude", &RunConfig::euler_amplitude);
        dbl("euler.cfl", &RunConfig::euler_cfl);
        dbl("euler.t_final", &RunConfig::euler_t_final);
        integer("hilbert.k", &RunConfig::hilbert_k);
        dbl("hilbert.decay_exponent", &RunConfig::hilbert_decay_exponent);
        m["sweep.epsilons"] = {[](RunConfig& c, const std::string& v) {
                                   c.sweep_epsilons.clear();
                                   std::stringstream ss(v);
                                   std::string item;
                                   while (std::getline(ss, item, ',')) c.sweep_epsilons.push_back(to_double("sweep.epsilons", trim(item)));
                               },
                               [](const RunConfig& c) {
                                   std::string s;
                                   for (std::size_t i = 0; i < c.sweep_epsilons.size(); ++i)
                                       s += (i ? "," : "") + format_double(c.sweep_epsilons[i]);
                                   return s;
                               }};
        dbl("solver.dt", &RunConfig::solver_dt);
        dbl("solver.t_final", &RunConfig::solver_t_final);
        integer("solver.imex_order", &RunConfig::solver_imex_order);
        dbl("solver.tau_init", &RunConfig::solver_tau_init);
        m["seed"] = {[](RunConfig& c, const std::string& v) {
                         const auto x = to_int("seed", v);
                         if (x < 0) throw ConfigError("seed must be non-negative");
                         c.seed = static_cast<std::uint64_t>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
        str("output_dir", &RunConfig::output_dir);
        return m;
    }();
    return s;
}

void walk(const boost::property_tree::ptree& pt, const std::string& prefix, RunConfig& c) {
    for (const auto& [name, child] : pt) {
        const std::string key = prefix.empty() ? name : prefix + "." + name;
        if (!child.empty()) {
            if (!prefix.empty()) throw ConfigError("nested section not supported: " + key);
            walk(child, key, c);
            continue;
        }
        const auto& sc = schema();
        auto it = sc.find(key);
        if (it == sc.end()) throw ConfigError("unknown config key: " + key);
        it->second.set(c, trim(child.get_value<std::string>()));
    }
}

}  // namespace

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(c.momentum_radius > 0.0, "momentum.radius must be positive");
    need(c.momentum_points_per_axis >= 4 && c.momentum_points_per_axis % 2 == 0,
         "momentum.points_per_axis must be even and >= 4");
    need(c.space_cells >= 5, "space.cells must be >= 5");
    need(c.space_length > 0.0, "space.length must be positive");
    need(c.collision_eta_reg > 0.0 && c.collision_eta_reg < 0.5, "collision.eta_reg must lie in (0, 0.5)");
    need(c.linearized_cg_tol > 0.0 && c.linearized_cg_tol < 1.0, "linearized.cg_tol must lie in (0, 1)");
    need(c.linearized_cg_max_iter >= 1, "linearized.cg_max_iter must be >= 1");
    need(c.linearized_ortho_tol > 0.0, "linearized.ortho_tol must be positive");
    need(c.weights_N0 >= 3, "weights.N0 must be >= 3");
    need(c.weights_T_margin >= 1.0, "weights.T_margin must be >= 1 (T >= sup T0)");
    need(c.euler_amplitude >= 0.0 && c.euler_amplitude < 0.05, "euler.amplitude must lie in [0, 0.05)");
    need(c.euler_cfl > 0.0 && c.euler_cfl <= 1.0, "euler.cfl must lie in (0, 1]");
    need(c.euler_t_final > 0.0, "euler.t_final must be positive");
    need(c.hilbert_k >= 2, "hilbert.k must be >= 2");
    need(c.hilbert_decay_exponent > 0.0 && c.hilbert_decay_exponent < 1.0, "hilbert.decay_exponent must lie in (0, 1)");
    need(c.sweep_epsilons.size() >= 3, "sweep.epsilons needs at least 3 entries");
    for (std::size_t i = 0; i < c.sweep_epsilons.size(); ++i) {
        need(c.sweep_epsilons[i] > 0.0 && c.sweep_epsilons[i] <= 1.0, "sweep.epsilons entries must lie in (0, 1]");
        if (i) need(c.sweep_epsilons[i] < c.sweep_epsilons[i - 1], "sweep.epsilons must be strictly decreasing");
    }
    need(c.solver_dt >= 0.0 && c.solver_dt <= 0.1, "solver.dt must lie in [0, 0.1] (0 = automatic)");
    need(c.solver_t_final > 0.0, "solver.t_final must be positive");
    need(c.solver_imex_order == 1 || c.solver_imex_order == 2, "solver.imex_order must be 1 or 2");
    need(c.solver_tau_init > 0.0 && c.solver_tau_init < 1.0, "solver.tau_init must lie in (0, 1)");
    need(!c.output_dir.empty(), "output_dir must not be empty");
}

RunConfig parse_config(std::string_view text) {
    boost::property_tree::ptree pt;
    std::istringstream is{std::string(text)};
    try {
        boost::property_tree::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    RunConfig c;
    walk(pt, "", c);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_text(const RunConfig& c) {
    std::string out;
    // where results go is not part of the run's identity
    for (const auto& [key, f] : schema())
        if (key != "output_dir") out += key + " = " + f.get(c) + "\n";
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PrerequisiteMissing("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string config_hash(const RunConfig& c) { return sha256_hex(canonical_text(c)); }

}  // namespace landau
