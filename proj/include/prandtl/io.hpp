#pragma once

// JSON evidence for every report and the CSV writers for time series.
// Doubles are written with 17 significant digits so files round-trip and
// repeat byte for byte.

#include "config.hpp"
#include "verify/boundary.hpp"
#include "verify/identities.hpp"
#include "verify/inequalities.hpp"
#include "verify/monitors.hpp"
#include "verify/residuals.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

namespace prandtl::io {

using json = nlohmann::json;

// One entry of a manifest.
struct Check {
    std::string name;
    bool pass = false;
    json evidence;
};

inline json to_json(const AssumptionReport& r) {
    return {{"c0", r.c0}, {"c1", r.c1}, {"delta", r.delta}, {"passes", r.passes}, {"failure", r.failure}};
}

inline json to_json(const PropositionReport& r) {
    json scan = json::array();
    for (const auto& c : r.scan) scan.push_back({{"t", c.t}, {"slack", c.slack}, {"holds", c.holds}});
    return {{"Ts", r.Ts}, {"inconsistent", r.inconsistent}, {"T_scan", r.T_scan}, {"step", r.step}, {"scan", scan}};
}

inline json to_json(const verify::CompatibilityCheck& r) {
    return {{"trace", r.residuals.trace}, {"curvature", r.residuals.curvature}, {"third", r.residuals.third},
            {"amp", r.amp},               {"tolerance", r.tolerance}};
}

inline json to_json(const verify::CancellationReport& r) {
    json lv = json::array();
    for (const auto& l : r.levels) lv.push_back({{"dy", l.dy}, {"relative_gap", l.gap}});
    return {{"levels", lv}, {"orders", r.orders}, {"tolerance", r.tolerance}, {"required_order", r.required_order}};
}

inline json to_json(const verify::ResidualReport& r) {
    json lv = json::array();
    for (const auto& l : r.grid_levels) lv.push_back({{"dt", l.dt}, {"dy", l.dy}, {"nx", l.nx}});
    return {{"grid_levels", lv},     {"residual_norms", r.residual_norms}, {"scales", r.scales},
            {"orders", r.orders},    {"observed_order", r.observed_order}, {"groups", r.groups},
            {"rounding_level", r.rounding_level}};
}

inline json to_json(const verify::BoundaryReport& r) {
    json out = json::array();
    for (const auto& s : r.summary)
        out.push_back({{"name", s.name},
                       {"residuals", s.residuals},
                       {"orders", s.orders},
                       {"scale", s.scale},
                       {"estimate", s.estimate},
                       {"required_order", s.required_order},
                       {"pass", s.pass}});
    json dy = json::array();
    for (const auto& l : r.levels) dy.push_back(l.dy);
    return {{"identities", out}, {"dy", dy}};
}

inline json to_json(const verify::SobolevReport& r) {
    return {{"count", r.count}, {"violations", r.violations}, {"max_ratio", r.max_ratio}};
}

inline json to_json(const verify::InequalityReport& r) {
    return {{"factorial_checked", r.factorial_checked}, {"factorial_violations", r.factorial_violations},
            {"ratio_checked", r.ratio_checked},         {"ratio_violations", r.ratio_violations},
            {"ratio_max_margin_used", r.ratio_max_margin_used}};
}

inline json to_json(const verify::CondiReport& r) {
    return {{"failure_time", r.failure_time ? json(*r.failure_time) : json(nullptr)},
            {"failed_clause", r.failed_clause},
            {"min_slack", r.min_slack},
            {"max_derivative_sum", r.max_derivative_sum}};
}

inline json to_json(const verify::EnergyReport& r) {
    return {{"rho", r.rho},         {"rho_tilde", r.rho_tilde}, {"times", r.times},     {"lhs", r.lhs},
            {"initial", r.initial}, {"nonlinear", r.nonlinear}, {"loss", r.loss},       {"C", r.C},
            {"max_C", r.max_C},     {"vacuous", r.vacuous}};
}

inline json to_json(const verify::SandwichReport& r) {
    return {{"rho", r.rho}, {"rho_star", r.rho_star}, {"C", r.C}, {"lower_violations", r.lower_violations},
            {"members", r.members}};
}

inline json to_json(const verify::RadiusReport& r) {
    return {{"C_star", r.C_star},       {"C_hat", r.C_hat},         {"R", r.R},
            {"lambda", r.lambda},       {"T_allowed", r.T_allowed}, {"T_checked", r.T_checked},
            {"restricted", r.restricted}, {"lifespan", r.lifespan}, {"margin", r.margin}};
}

inline json to_json(const verify::ContractionReport& r) {
    return {{"ratios", r.ratios},
            {"rate", r.rate},
            {"max_ratio", r.max_ratio},
            {"inconclusive", r.inconclusive},
            {"converged", r.converged}};
}

inline json to_json(const verify::CrossValidationReport& r) {
    return {{"difference", r.difference}, {"u_max", r.u_max}, {"dt", r.dt}, {"threshold", r.threshold}};
}

inline json to_json(const NormReport& r) {
    json g = json::object();
    for (const auto& [k, v] : r.groups) g[k] = v;
    return {{"total", r.total},
            {"gevrey", r.gevrey},
            {"groups", g},
            {"argmax", {{"group", r.argmax.group}, {"i", r.argmax.i}, {"j", r.argmax.j}, {"value", r.argmax.value}}},
            {"tail_ratio", r.tail_ratio},
            {"Mmax", r.Mmax}};
}

inline json config_json(const RunConfig& c) {
    json out = json::object();
    for (const auto& k : config_keys()) out[k.section][k.key] = k.get(c);
    return out;
}

// ------------------------------------------------------------ files

// Written to a temporary name first, then renamed into place.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw Error("io", "cannot write " + tmp);
        os << text;
    }
    std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline void write_field_csv(std::ostream& os, const Field& u, const Field& v) {
    os.precision(17);
    os << "x,y,u,v\n";
    const Grid2D& g = u.grid;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) os << g.x(ix) << ',' << g.y(iy) << ',' << u(ix, iy) << ',' << v(ix, iy) << '\n';
}

struct NormSeriesRow {
    double t, gevrey, full, lifespan;
};

inline void write_norms_csv(std::ostream& os, const std::vector<NormSeriesRow>& rows) {
    os.precision(17);
    os << "t,gevrey_norm,full_norm,lifespan\n";
    for (const auto& r : rows) os << r.t << ',' << r.gevrey << ',' << r.full << ',' << r.lifespan << '\n';
}

// Residual-vs-level table of every residual report.
inline void write_residual_csv(std::ostream& os, const std::vector<verify::ResidualReport>& reports) {
    os.precision(17);
    os << "name,level,dt,dy,nx,residual,scale\n";
    for (const auto& r : reports)
        for (size_t l = 0; l < r.grid_levels.size(); ++l)
            os << r.name << ',' << l << ',' << r.grid_levels[l].dt << ',' << r.grid_levels[l].dy << ','
               << r.grid_levels[l].nx << ',' << r.residual_norms[l] << ',' << r.scales[l] << '\n';
}

} // namespace prandtl::io
