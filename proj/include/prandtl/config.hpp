#pragma once

// Run configuration: an INI file with sections grid, profile, perturbation,
// solver, norms, verify, output. Every key is listed in config_keys(), which
// also produces the key reference.

#include "cutoffs.hpp"
#include "norms.hpp"
#include "profiles.hpp"
#include "solver.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace prandtl {

inline const std::vector<std::string>& all_checks() {
    static const std::vector<std::string> names = {
        "compatibility", "cancellation", "residuals", "boundary", "sobolev",   "inequalities",
        "condi",         "energy",       "sandwich",  "radius",   "contraction", "cross_validation"};
    return names;
}

struct RunConfig {
    struct {
        int nx = 128, ny = 257;
        double lx = 2.0 * std::numbers::pi, ymax = 30.0;
    } grid;
    struct {
        double y0 = 2.0, alpha = 2.0;
    } profile;
    struct {
        double amp = 1e-3;
        int kx = 1;
    } perturbation;
    SolverConfig solver;
    struct {
        double rho = 0.3, rho_tilde = 0.4, rho_star = 0.5, rho0 = 0.5;
        double sigma = 1.75, ell = 2.25, far_band = 5.0;
        int Mmax = 10;
    } norms;
    struct {
        std::vector<std::string> checks = all_checks();
        int stride = 1;
        int levels = 3;
        std::vector<int> orders{1, 2, 3};
        double window = 0.25; // residual window starts at window * T
        int sobolev_count = 100;
        std::uint64_t seed = 42;
    } verify;
    struct {
        std::string directory = "out";
        std::vector<std::string> formats{"json", "csv"};
        int trajectory_stride = 8;
    } output;
    std::vector<std::string> warnings;

    Grid2D make_grid() const { return Grid2D(grid.nx, grid.ny, grid.lx, grid.ymax); }
    GevreyParams gevrey() const {
        GevreyParams p;
        p.rho = norms.rho;
        p.sigma = norms.sigma;
        p.ell = norms.ell;
        p.alpha = profile.alpha;
        p.Mmax = norms.Mmax;
        p.far_band = norms.far_band;
        return p;
    }
    bool enabled(const std::string& check) const {
        return std::find(verify.checks.begin(), verify.checks.end(), check) != verify.checks.end();
    }
    bool writes(const std::string& format) const {
        return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
    }
};

// Thrown with every violation found, one per line.
class ConfigViolations : public ConfigError {
public:
    explicit ConfigViolations(std::vector<std::string> v) : ConfigError(join(v)), violations(std::move(v)) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : "\n") + x;
        return s;
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_real(const std::string& raw) {
    std::string s = trim(raw);
    // "2pi", "pi", "0.5pi"
    double factor = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        factor = std::numbers::pi;
        s = trim(s.substr(0, s.size() - 2));
        if (s.empty()) return factor;
        if (s.back() == '*') s.pop_back();
    }
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(raw);
    return v * factor;
}

inline long long parse_int(const std::string& raw) {
    const std::string s = trim(raw);
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(raw);
    return v;
}

} // namespace detail

struct ConfigKey {
    std::string section, key, type, doc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
    using detail::parse_int;
    using detail::parse_real;
    // Shortest text that reads back to the same double.
    auto fmt = [](double v) {
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    auto join = [](const auto& v) {
        std::string s;
        for (const auto& x : v) {
            std::ostringstream o;
            o << x;
            s += (s.empty() ? "" : ",") + o.str();
        }
        return s;
    };
#define PRANDTL_REAL(sec, name, field, doc)                                                                            \
    ConfigKey {                                                                                                        \
        sec, name, "real", doc, [](RunConfig& c, const std::string& v) { c.field = parse_real(v); },                   \
            [fmt](const RunConfig& c) { return fmt(c.field); }                                                         \
    }
#define PRANDTL_INT(sec, name, field, doc)                                                                             \
    ConfigKey {                                                                                                        \
        sec, name, "integer", doc, [](RunConfig& c, const std::string& v) { c.field = parse_int(v); },                 \
            [](const RunConfig& c) { return std::to_string(c.field); }                                                 \
    }
    static const std::vector<ConfigKey> keys = {
        PRANDTL_INT("grid", "nx", grid.nx, "points in x (power of two >= 8)"),
        PRANDTL_INT("grid", "ny", grid.ny, "points in y including both ends (>= 32)"),
        PRANDTL_REAL("grid", "lx", grid.lx, "period in x; accepts a multiple of pi such as 2pi"),
        PRANDTL_REAL("grid", "ymax", grid.ymax, "height of the truncated half-line"),
        PRANDTL_REAL("profile", "y0", profile.y0, "critical point of the initial shear, in (0, ymax/3)"),
        PRANDTL_REAL("profile", "alpha", profile.alpha, "vorticity decay exponent, > 1"),
        PRANDTL_REAL("perturbation", "amp", perturbation.amp, "perturbation amplitude, >= 0"),
        PRANDTL_INT("perturbation", "kx", perturbation.kx, "x-harmonic of the perturbation, in [1, nx/8]"),
        PRANDTL_REAL("solver", "eps", solver.eps, "tangential diffusion, in (0, 1]"),
        PRANDTL_REAL("solver", "T", solver.T, "horizon, > 0; a warning is issued when T > eps/4"),
        PRANDTL_INT("solver", "Nt", solver.Nt, "time steps, >= 4"),
        PRANDTL_INT("solver", "jmax", solver.jmax, "Picard iteration cap, >= 2"),
        PRANDTL_REAL("solver", "tol", solver.tol, "Picard stop once the update norm falls below tol times the norm of u0"),
        ConfigKey{"solver", "scheme", "picard or imex", "time integrator",
                  [](RunConfig& c, const std::string& v) {
                      const std::string s = detail::trim(v);
                      if (s == "picard") c.solver.scheme = Scheme::picard;
                      else if (s == "imex") c.solver.scheme = Scheme::imex;
                      else throw std::invalid_argument(v);
                  },
                  [](const RunConfig& c) { return to_string(c.solver.scheme); }},
        PRANDTL_REAL("norms", "rho", norms.rho, "Gevrey radius of the norms and of the energy monitor"),
        PRANDTL_REAL("norms", "rho_tilde", norms.rho_tilde, "larger radius of the energy monitor, rho < rho_tilde < rho0"),
        PRANDTL_REAL("norms", "rho_star", norms.rho_star, "larger radius of the norm sandwich, > rho"),
        PRANDTL_REAL("norms", "rho0", norms.rho0, "initial radius of the lifespan norm"),
        PRANDTL_REAL("norms", "sigma", norms.sigma, "Gevrey index, in [1.5, 2]"),
        PRANDTL_REAL("norms", "ell", norms.ell, "weight exponent, alpha <= ell < alpha + 1/2"),
        PRANDTL_INT("norms", "Mmax", norms.Mmax, "truncation of the m-suprema, in [7, nx/4]"),
        PRANDTL_REAL("norms", "far_band", norms.far_band, "band below ymax left out of the weighted norms"),
        ConfigKey{"verify", "checks", "list", "enabled checks, comma separated, or all",
                  [](RunConfig& c, const std::string& v) {
                      auto l = detail::split_list(v);
                      c.verify.checks = (l.size() == 1 && l[0] == "all") ? all_checks() : l;
                  },
                  [join](const RunConfig& c) { return join(c.verify.checks); }},
        PRANDTL_INT("verify", "stride", verify.stride, "stored-snapshot stride used by the checks"),
        PRANDTL_INT("verify", "levels", verify.levels, "refinement levels for residual and wall checks, >= 2"),
        ConfigKey{"verify", "orders", "list", "derivative orders m of the residual and wall checks",
                  [](RunConfig& c, const std::string& v) {
                      c.verify.orders.clear();
                      for (const auto& s : detail::split_list(v)) c.verify.orders.push_back(detail::parse_int(s));
                  },
                  [join](const RunConfig& c) { return join(c.verify.orders); }},
        PRANDTL_REAL("verify", "window", verify.window, "residuals are taken over t >= window * T, in [0, 0.5]"),
        PRANDTL_INT("verify", "sobolev_count", verify.sobolev_count, "random fields in the Sobolev check"),
        PRANDTL_INT("verify", "seed", verify.seed, "random seed (overridden by --seed)"),
        ConfigKey{"output", "directory", "path", "artifact directory (overridden by --out)",
                  [](RunConfig& c, const std::string& v) { c.output.directory = detail::trim(v); },
                  [](const RunConfig& c) { return c.output.directory; }},
        ConfigKey{"output", "formats", "list", "json and/or csv",
                  [](RunConfig& c, const std::string& v) { c.output.formats = detail::split_list(v); },
                  [join](const RunConfig& c) { return join(c.output.formats); }},
        PRANDTL_INT("output", "trajectory_stride", output.trajectory_stride, "write every n-th stored time as CSV"),
    };
#undef PRANDTL_REAL
#undef PRANDTL_INT
    return keys;
}

// Markdown table of every key with its default.
inline std::string config_reference() {
    const RunConfig d;
    std::ostringstream o;
    o << "| section | key | type | default | meaning |\n|---|---|---|---|---|\n";
    for (const auto& k : config_keys())
        o << "| " << k.section << " | " << k.key << " | " << k.type << " | " << k.get(d) << " | " << k.doc << " |\n";
    return o.str();
}

// Cross-field constraints of every module; returns all violations.
inline std::vector<std::string> config_violations(RunConfig& c) {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) v.push_back(msg);
    };
    const auto& g = c.grid;
    need(g.nx >= 8 && (g.nx & (g.nx - 1)) == 0, "grid.nx: must be a power of two >= 8");
    need(g.ny >= 32, "grid.ny: must be at least 32");
    need(g.lx > 0.0 && g.ymax > 0.0, "grid.lx, grid.ymax: must be positive");
    need(c.profile.alpha > 1.0, "profile.alpha: must exceed 1");
    need(c.profile.y0 > 0.0 && c.profile.y0 < g.ymax / 3.0, "profile.y0: must lie in (0, ymax/3)");
    need(c.perturbation.amp >= 0.0, "perturbation.amp: must be non-negative");
    need(c.perturbation.kx >= 1 && c.perturbation.kx <= g.nx / 8, "perturbation.kx: must lie in [1, nx/8]");
    try {
        c.solver.validate();
    } catch (const Error& e) {
        v.push_back(e.what());
    }
    const auto& n = c.norms;
    need(n.sigma >= 1.5 && n.sigma <= 2.0,
         "norms.sigma: sigma must lie in [1.5, 2], the Gevrey range of the local well-posedness result");
    need(c.profile.alpha <= n.ell && n.ell < c.profile.alpha + 0.5,
         "norms.ell: ell must satisfy alpha <= ell < alpha + 1/2, the weight-exponent relation tied to the decay of "
         "the shear vorticity");
    need(n.ell > 1.5, "norms.ell: must exceed 3/2");
    need(n.Mmax >= 7, "norms.Mmax: must be at least 7");
    need(n.Mmax <= g.nx / 4, "norms.Mmax: must not exceed nx/4");
    need(n.rho > 0.0 && n.rho < n.rho_tilde && n.rho_tilde < n.rho0,
         "norms.rho, norms.rho_tilde, norms.rho0: need 0 < rho < rho_tilde < rho0");
    need(n.rho < n.rho_star, "norms.rho_star: must exceed rho");
    need(n.far_band >= 0.0 && n.far_band < 0.5 * g.ymax, "norms.far_band: must lie in [0, ymax/2)");
    const auto& vf = c.verify;
    for (const auto& name : vf.checks)
        need(std::find(all_checks().begin(), all_checks().end(), name) != all_checks().end(),
             "verify.checks: unknown check '" + name + "'");
    need(vf.stride >= 1, "verify.stride: must be at least 1");
    need(vf.levels >= 2 && vf.levels <= 4, "verify.levels: must lie in [2, 4]");
    need(!vf.orders.empty(), "verify.orders: must list at least one order");
    for (int m : vf.orders)
        need(m >= 1 && m + 2 <= n.Mmax, "verify.orders: each order must lie in [1, Mmax - 2]");
    need(vf.window >= 0.0 && vf.window <= 0.5, "verify.window: must lie in [0, 0.5]");
    need(vf.sobolev_count >= 1, "verify.sobolev_count: must be at least 1");
    for (const auto& f : c.output.formats)
        need(f == "json" || f == "csv", "output.formats: unknown format '" + f + "'");
    need(c.output.trajectory_stride >= 1, "output.trajectory_stride: must be at least 1");

    // The cut-off bands need the assumption constants of the built profile.
    if (v.empty()) {
        try {
            const Grid2D grid = c.make_grid();
            const ShearProfile p = build_shear_profile(grid, c.profile.y0, c.profile.alpha);
            const AssumptionReport rep = validate_assumption(p);
            if (!rep.all()) v.push_back("profile: built profile fails its assumption check (" + rep.failure + ")");
            else if (!(c.profile.y0 + 3.0 * rep.delta < g.ymax - n.far_band))
                v.push_back("profile.y0: delta band does not fit, need y0 + 3 delta < ymax - far_band");
        } catch (const Error& e) {
            v.push_back(e.what());
        }
    }
    if (v.empty() && c.solver.T > c.solver.eps / 4.0)
        c.warnings.push_back("solver.T exceeds eps/4; the fixed-point time may be too long for this eps");
    return v;
}

// Parses INI text; unknown sections or keys are errors naming them.
inline RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("cannot parse: ") + e.what());
    }
    RunConfig c;
    std::vector<std::string> v;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            v.push_back("unknown key '" + section + "' outside any section");
            continue;
        }
        for (const auto& [key, value] : body) {
            const auto& keys = config_keys();
            auto it = std::find_if(keys.begin(), keys.end(),
                                   [&](const ConfigKey& k) { return k.section == section && k.key == key; });
            if (it == keys.end()) {
                v.push_back("unknown key '" + section + "." + key + "'");
                continue;
            }
            try {
                it->set(c, value.data());
            } catch (const std::exception&) {
                v.push_back(section + "." + key + ": cannot read '" + value.data() + "' as " + it->type);
            }
        }
    }
    if (!v.empty()) throw ConfigViolations(v);
    auto cv = config_violations(c);
    if (!cv.empty()) throw ConfigViolations(cv);
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return parse_config(in);
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// Canonical INI text of a configuration (the config echo of a manifest).
inline std::string config_to_ini(const RunConfig& c) {
    std::ostringstream o;
    std::string section;
    for (const auto& k : config_keys()) {
        if (k.section != section) {
            o << (section.empty() ? "" : "\n") << "[" << k.section << "]\n";
            section = k.section;
        }
        o << k.key << " = " << k.get(c) << "\n";
    }
    return o.str();
}

} // namespace prandtl
