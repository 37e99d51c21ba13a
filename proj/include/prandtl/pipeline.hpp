#pragma once

// Orchestration of the subcommands shear-check, solve, norms, verify and full.
// Every subcommand writes its artifacts under the output directory and a
// manifest.json with the config echo, versions and one entry per report.

#include "io.hpp"

#include <fftw3.h>

#include <boost/version.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace prandtl {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_divergence = 3 };

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"shear-check", "solve", "verify", "norms", "full"};
    return s;
}

struct RunResult {
    int exit_code = exit_pass;
    std::vector<io::Check> reports;
    std::string error;
    std::filesystem::path manifest;
};

namespace detail {

inline io::json versions() {
    return {{"prandtl_lab", kVersion},
            {"fftw", std::string(fftw_version)},
            {"boost", BOOST_LIB_VERSION},
            {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                         "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}};
}

class Pipeline {
public:
    Pipeline(RunConfig cfg, std::ostream& log)
        : cfg_(std::move(cfg)), log_(log), out_(cfg_.output.directory), grid_(cfg_.make_grid()),
          profile_(build_shear_profile(grid_, cfg_.profile.y0, cfg_.profile.alpha)),
          rep_(validate_assumption(profile_)) {
        if (rep_.all()) cut_ = build_cutoffs(grid_, cfg_.profile.y0, rep_.delta);
    }

    std::vector<io::Check> reports;

    void shear_check() {
        log_ << "shear-check\n";
        reports.push_back({"assumption", rep_.all(), io::to_json(rep_)});
        PropositionReport pr;
        if (rep_.all()) pr = check_proposition_shear(profile_, rep_);
        reports.push_back({"proposition_shear", rep_.all() && !pr.inconsistent && pr.Ts >= 0.1, io::to_json(pr)});
        if (cfg_.writes("csv")) {
            std::ostringstream a, b;
            write_profile_csv(a, profile_);
            io::write_text(out_ / "profile.csv", a.str());
            write_shear_csv(b, evolve_shear(profile_, cfg_.solver.T), grid_);
            io::write_text(out_ / "shear_T.csv", b.str());
        }
    }

    void solve() {
        const Trajectory& tr = trajectory();
        reports.push_back({"solve", tr.converged || tr.scheme == Scheme::imex,
                           {{"scheme", to_string(tr.scheme)},
                            {"converged", tr.converged},
                            {"contraction", tr.contraction},
                            {"times", tr.times},
                            {"warnings", tr.warnings}}});
        if (cfg_.writes("json"))
            io::write_json(out_ / "trajectory.json", {{"times", tr.times},
                                                      {"config", io::config_json(cfg_)},
                                                      {"contraction", tr.contraction},
                                                      {"converged", tr.converged}});
        if (cfg_.writes("csv"))
            for (size_t n = 0; n < tr.size(); n += cfg_.output.trajectory_stride) {
                std::ostringstream os, name;
                io::write_field_csv(os, tr.u[n], tr.v[n]);
                name << "u_" << std::setw(4) << std::setfill('0') << n << ".csv";
                io::write_text(out_ / "trajectory" / name.str(), os.str());
            }
    }

    // Norm time series; the running lifespan value uses lambda = rho0 / (2T),
    // so the shrinking radius stays positive over the whole horizon.
    void norms() {
        const Trajectory& tr = trajectory();
        const auto& terms = norm_terms();
        const double rho = cfg_.norms.rho, sigma = cfg_.norms.sigma, rho0 = cfg_.norms.rho0;
        const double lambda = rho0 / (2.0 * cfg_.solver.T);
        std::vector<io::NormSeriesRow> rows;
        bool finite = true;
        double tail = 0.0;
        for (size_t n = 0; n < tr.size(); ++n) {
            const NormReport r = terms[n].evaluate(rho, sigma);
            const double life = lifespan_norm(std::vector<NormTerms>(terms.begin(), terms.begin() + n + 1),
                                              std::vector<double>(tr.times.begin(), tr.times.begin() + n + 1), lambda,
                                              tr.times[n], sigma, rho0)
                                    .value;
            rows.push_back({tr.times[n], r.gevrey, r.total, life});
            finite = finite && std::isfinite(r.total) && std::isfinite(life);
            tail = std::max(tail, r.tail_ratio);
        }
        reports.push_back({"norms", finite && tail < 1.0,
                           {{"initial", io::to_json(terms.front().evaluate(rho, sigma))},
                            {"final", io::to_json(terms.back().evaluate(rho, sigma))},
                            {"lambda", lambda},
                            {"max_tail_ratio", tail}}});
        if (cfg_.writes("csv")) {
            std::ostringstream os;
            io::write_norms_csv(os, rows);
            io::write_text(out_ / "norms.csv", os.str());
        }
    }

    void verify() {
        using namespace prandtl::verify;
        const GevreyParams gp = cfg_.gevrey();
        const auto& nb = cfg_.norms;
        if (cfg_.enabled("compatibility")) {
            log_ << "verify: compatibility\n";
            auto r = compatibility_check(initial(), profile_, cfg_.perturbation.amp);
            reports.push_back({"compatibility", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("sobolev")) {
            log_ << "verify: sobolev\n";
            auto r = sobolev_check(grid_, cfg_.verify.sobolev_count, cfg_.verify.seed);
            reports.push_back({"sobolev", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("inequalities")) {
            log_ << "verify: inequalities\n";
            auto r = inequality_suite();
            reports.push_back({"inequalities", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("condi")) {
            log_ << "verify: condi\n";
            auto r = condi_monitor(checked(), profile_, rep_, gp);
            reports.push_back({"condi", r.pass, io::to_json(r)});
        }
        std::optional<EnergyReport> energy;
        if (cfg_.enabled("energy") || cfg_.enabled("radius")) {
            log_ << "verify: energy\n";
            energy = energy_monitor(checked_terms(), checked().times, nb.rho, nb.rho_tilde, nb.sigma);
            if (cfg_.enabled("energy")) reports.push_back({"energy", energy->pass, io::to_json(*energy)});
        }
        if (cfg_.enabled("sandwich")) {
            log_ << "verify: sandwich\n";
            auto r = sandwich_fit(checked_terms(), nb.rho, nb.rho_star, nb.sigma);
            reports.push_back({"sandwich", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("radius")) {
            log_ << "verify: radius\n";
            auto r = radius_decay_check(checked_terms(), checked().times, energy->max_C, nb.sigma, nb.rho0);
            reports.push_back({"radius", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("contraction")) {
            log_ << "verify: contraction\n";
            auto r = picard_contraction_check(picard());
            reports.push_back({"contraction", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("cross_validation")) {
            log_ << "verify: cross_validation\n";
            SolverConfig sc = cfg_.solver;
            sc.scheme = Scheme::imex;
            const Trajectory& P = picard();
            const Trajectory I = imex_solve(initial(), profile_, sc, &P.shear);
            auto r = cross_validate(P, I);
            reports.push_back({"cross_validation", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("residuals") || cfg_.enabled("boundary") || cfg_.enabled("cancellation")) leveled();
    }

private:
    RunConfig cfg_;
    std::ostream& log_;
    std::filesystem::path out_;
    Grid2D grid_;
    ShearProfile profile_;
    AssumptionReport rep_;
    CutoffSet cut_;
    std::optional<Field> u0_;
    std::optional<Trajectory> tr_, picard_, checked_;
    std::optional<std::vector<NormTerms>> terms_, checked_terms_;

    const Field& initial() {
        if (!u0_) u0_ = build_perturbation(grid_, cfg_.perturbation.amp, cfg_.perturbation.kx, profile_);
        return *u0_;
    }
    void need_cutoffs() const {
        if (!rep_.all()) throw Error("profiles", "built profile fails its assumption check: " + rep_.failure);
    }
    const Trajectory& trajectory() {
        if (!tr_) {
            log_ << "solve: " << to_string(cfg_.solver.scheme) << " Nx=" << grid_.nx << " Ny=" << grid_.ny
                 << " Nt=" << cfg_.solver.Nt << "\n";
            tr_ = prandtl::solve(initial(), profile_, cfg_.solver);
        }
        return *tr_;
    }
    const Trajectory& picard() {
        if (cfg_.solver.scheme == Scheme::picard) return trajectory();
        if (!picard_) {
            SolverConfig sc = cfg_.solver;
            sc.scheme = Scheme::picard;
            picard_ = picard_solve(initial(), profile_, sc);
        }
        return *picard_;
    }
    // The trajectory the monitors see: every stride-th stored time.
    const Trajectory& checked() {
        if (!checked_) checked_ = trajectory().strided(cfg_.verify.stride);
        return *checked_;
    }
    const std::vector<NormTerms>& norm_terms() {
        need_cutoffs();
        if (!terms_) terms_ = trajectory_norm_terms(trajectory(), cut_, cfg_.gevrey());
        return *terms_;
    }
    const std::vector<NormTerms>& checked_terms() {
        need_cutoffs();
        if (cfg_.verify.stride == 1) return norm_terms();
        if (!checked_terms_) checked_terms_ = trajectory_norm_terms(checked(), cut_, cfg_.gevrey());
        return *checked_terms_;
    }

    // Residuals, wall identities and the two forms of f_m on successive
    // levels that halve dt and dy together. The cut-offs keep the reference
    // band width on every level.
    void leveled() {
        using namespace prandtl::verify;
        need_cutoffs();
        const auto& orders = cfg_.verify.orders;
        std::vector<ResidualKey> keys;
        for (int m : orders)
            for (AuxKind k : {AuxKind::f, AuxKind::h, AuxKind::g}) keys.push_back({k, m});
        std::map<ResidualKey, std::vector<ResidualSample>> samples;
        std::vector<ResidualSample> ablation;
        std::vector<ResidualReport::Level> levels;
        std::vector<BoundaryLevel> wall;
        std::vector<CancellationLevel> gaps;
        for (int l = 0; l < cfg_.verify.levels; ++l) {
            const int f = 1 << l;
            const Grid2D g(grid_.nx, (grid_.ny - 1) * f + 1, grid_.lx, grid_.ymax);
            SolverConfig sc = cfg_.solver;
            sc.scheme = Scheme::picard;
            sc.Nt = cfg_.solver.Nt * f;
            log_ << "verify: level " << l << " Ny=" << g.ny << " Nt=" << sc.Nt << "\n";
            const ShearProfile p = l == 0 ? profile_ : build_shear_profile(g, cfg_.profile.y0, cfg_.profile.alpha);
            const CutoffSet cut = l == 0 ? cut_ : build_cutoffs(g, cfg_.profile.y0, rep_.delta);
            std::optional<Trajectory> solved, thinned;
            if (l > 0) solved = picard_solve(build_perturbation(g, cfg_.perturbation.amp, cfg_.perturbation.kx, p), p, sc);
            const Trajectory& full = l == 0 ? picard() : *solved;
            if (cfg_.verify.stride > 1) thinned = full.strided(cfg_.verify.stride);
            const Trajectory& tr = thinned ? *thinned : full;
            levels.push_back({tr.times[1] - tr.times[0], g.dy(), g.nx});
            if (cfg_.enabled("residuals")) {
                ResidualOptions o;
                o.eps = sc.eps;
                o.t_min = cfg_.verify.window * sc.T;
                for (auto& [k, s] : evaluate_residuals(tr, cut, keys, o)) samples[k].push_back(s);
                o.drop_h_g_term = true;
                ablation.push_back(evaluate_residuals(tr, cut, {{AuxKind::h, orders.front()}}, o).begin()->second);
            }
            if (cfg_.enabled("boundary")) wall.push_back(boundary_level(tr, orders, sc.eps));
            if (cfg_.enabled("cancellation"))
                gaps.push_back(cancellation_level(tr, cut, orders, {0, tr.size() / 2, tr.size() - 1}));
        }
        if (cfg_.enabled("residuals")) {
            std::vector<ResidualReport> all;
            for (const auto& [k, s] : samples) {
                auto r = make_residual_report("residual_" + to_string(k.kind) + "_" + std::to_string(k.m), levels, s, 1.0);
                io::json ev = io::to_json(r);
                // Wiring evidence: dropping -chi2 g_{m+1} from the h equation
                // leaves a residual of the size of that term.
                if (k.kind == AuxKind::h && k.m == orders.front()) {
                    std::vector<double> drop, term;
                    for (size_t l = 0; l < ablation.size(); ++l) {
                        drop.push_back(ablation[l].residual);
                        term.push_back(s[l].groups.at("g_next"));
                    }
                    ev["ablation_residual"] = drop;
                    ev["ablation_term"] = term;
                }
                reports.push_back({r.name, r.pass, ev});
                all.push_back(std::move(r));
            }
            if (cfg_.writes("csv")) {
                std::ostringstream os;
                io::write_residual_csv(os, all);
                io::write_text(out_ / "residuals.csv", os.str());
            }
        }
        if (cfg_.enabled("boundary")) {
            auto r = summarize_boundary(wall);
            reports.push_back({"boundary", r.pass, io::to_json(r)});
        }
        if (cfg_.enabled("cancellation")) {
            auto r = summarize_cancellation(gaps);
            reports.push_back({"cancellation", r.pass, io::to_json(r)});
        }
    }
};

} // namespace detail

inline bool all_pass(const std::vector<io::Check>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

inline io::json manifest_json(const RunConfig& cfg, const std::string& subcommand, const std::vector<io::Check>& reports,
                              const std::string& error) {
    io::json list = io::json::array();
    for (const auto& r : reports) list.push_back({{"name", r.name}, {"pass", r.pass}, {"evidence", r.evidence}});
    io::json m = {{"subcommand", subcommand},
                  {"config", io::config_json(cfg)},
                  {"versions", detail::versions()},
                  {"warnings", cfg.warnings},
                  {"reports", list},
                  {"pass", error.empty() && all_pass(reports)}};
    if (!error.empty()) m["error"] = error;
    return m;
}

// Runs one subcommand on a validated configuration.
inline RunResult run(const RunConfig& cfg, const std::string& subcommand, std::ostream& log) {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    RunResult res;
    std::optional<detail::Pipeline> pipe;
    try {
        pipe.emplace(cfg, log);
        const bool all = subcommand == "full";
        if (all || subcommand == "shear-check") pipe->shear_check();
        if (all || subcommand == "solve") pipe->solve();
        if (all || subcommand == "norms") pipe->norms();
        if (all || subcommand == "verify") pipe->verify();
        res.exit_code = all_pass(pipe->reports) ? exit_pass : exit_check_failure;
    } catch (const DivergenceError& e) {
        res.error = e.what();
        res.exit_code = exit_divergence;
    } catch (const ConfigError& e) {
        res.error = e.what();
        res.exit_code = exit_config_error;
    } catch (const Error& e) {
        res.error = e.what();
        res.exit_code = exit_check_failure;
    }
    if (pipe) res.reports = std::move(pipe->reports);
    if (cfg.writes("json")) {
        res.manifest = std::filesystem::path(cfg.output.directory) / "manifest.json";
        io::write_json(res.manifest, manifest_json(cfg, subcommand, res.reports, res.error));
    }
    return res;
}

} // namespace prandtl
