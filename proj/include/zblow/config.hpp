#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "zblow/constants.hpp"
#include "zblow/csv.hpp"
#include "zblow/error.hpp"
#include "zblow/expression.hpp"
#include "zblow/grid.hpp"
#include "zblow/physical_solver.hpp"
#include "zblow/quadrature.hpp"

namespace zblow {

inline const std::vector<std::string>& scenario_kinds() {
    static const std::vector<std::string> kinds{"remark33", "remark33_perturbed", "theorem11", "theorem12",
                                                "ode_constant", "mode_rates", "custom"};
    return kinds;
}

struct InitialSection {
    /// ode_constant
    double a0 = 2.0;
    double b0 = 0.0;
    /// theorem11: a0 = amplitude e^{-x^2}, b0 = level, checked against a0 < A b0
    double amplitude = 1.0;
    double level = 1.0;
    double ratio_A = 2.0;
    /// theorem12
    double M = 2.0;
    double N = 1.0;
    double L = 3.0;
    double width = 1.0;
    /// remark33 family: data evaluated at x - shift
    double shift = 0.0;
    /// remark33_perturbed: b0 += perturbation * c * e^{-x^2}, c uniform in [-1, 1] from the seed
    double perturbation = 0.05;
    /// custom
    std::string a_expr = "constant(0)";
    std::string b_expr = "constant(0)";

    bool operator==(const InitialSection&) const = default;
};

struct GridSection {
    std::size_t n_points = 2001;
    double half_width = 8.0;
    bool operator==(const GridSection&) const = default;
};

struct SolverSection {
    double t_end = 2.0;
    double blowup_threshold = 1e8;
    double dt_safety = 0.25;
    std::size_t rate_fit_window = 40;
    double sample_interval = 1e-3;
    double sample_growth = 1.1;
    int workers = 1;
    bool operator==(const SolverSection&) const = default;
};

struct AnalysisSection {
    bool zeros = true;
    bool quotient = false;
    bool selfsimilar = false;
    bool modes = false;
    double quotient_x_lo = -2.0;
    double quotient_x_hi = 2.0;
    /// floor on b as a fraction of the initial sup of b
    double delta_floor_factor = 1e-3;
    double quotient_tolerance = 1e-3;
    std::size_t resolved_peak_nodes = 16;
    double profile_tolerance = 0.15;
    bool operator==(const AnalysisSection&) const = default;
};

struct ModesSection {
    double y_half_width = 20.0;
    std::size_t y_n_points = 2001;
    /// s-length of every rescaled run
    double s_span = 2.0;
    double seed_amplitude = 1e-6;
    double sample_ds = 0.01;
    double delta_bar = 0.05;
    double R_bar = 5.0;
    double rate_tolerance = 0.05;
    double eta_bar = 2.0;
    double zeta_bar = 0.5;
    double eps_bar = 0.01;
    double eps1 = 5.0;
    bool operator==(const ModesSection&) const = default;
};

struct ScenarioConfig {
    std::string name = "remark33";
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    InitialSection initial;
    GridSection grid;
    SolverSection solver;
    AnalysisSection analysis;
    ModesSection modes;

    bool operator==(const ScenarioConfig&) const = default;

    SpatialGrid spatial_grid() const { return SpatialGrid::make(grid.half_width, grid.n_points); }

    SolverConfig solver_config() const {
        SolverConfig c;
        c.grid = spatial_grid();
        c.t_end = solver.t_end;
        c.blowup_threshold = solver.blowup_threshold;
        c.dt_safety = solver.dt_safety;
        c.rate_fit_window = solver.rate_fit_window;
        c.sample_interval = solver.sample_interval;
        c.sample_growth = solver.sample_growth;
        c.workers = solver.workers;
        c.resolved_peak_nodes = analysis.resolved_peak_nodes;
        return c;
    }

    ConstantsLedger ledger() const { return {modes.eta_bar, modes.zeta_bar, modes.eps_bar, modes.eps1}; }

    /// Checks every parameter against the preconditions of the modules it
    /// feeds; throws ConfigError listing the first problem found.
    void validate() const;
};

/// Catalog defaults for a scenario kind.
inline ScenarioConfig defaults_for(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    c.output_dir = "out/" + name;
    if (name == "remark33" || name == "remark33_perturbed") {
        c.grid = {2001, 8.0};
        c.solver.t_end = 2.0;
    } else if (name == "theorem11") {
        c.grid = {1001, 10.0};
        c.solver.t_end = 20.0;
        c.solver.sample_interval = 0.05;
        c.analysis.quotient = true;
    } else if (name == "theorem12") {
        c.grid = {1001, 10.0};
        c.solver.t_end = 20.0;
        c.solver.sample_interval = 0.05;
        c.initial.width = 1.0;
    } else if (name == "ode_constant") {
        c.grid = {1001, 10.0};
        c.solver.t_end = 1.0;
        c.analysis.zeros = false;
    } else if (name == "mode_rates") {
        c.analysis.zeros = false;
        c.analysis.modes = true;
    } else if (name == "custom") {
        c.grid = {1001, 10.0};
        c.solver.t_end = 1.0;
    }
    return c;
}

namespace detail {

class IniReader {
public:
    explicit IniReader(const boost::property_tree::ptree& pt) : pt_(pt) {
        for (const auto& [section, body] : pt_) {
            if (body.empty() && !body.data().empty())
                throw ConfigError("key '" + section + "' must sit inside a [section]");
            for (const auto& kv : body) keys_.insert(section + "." + kv.first);
        }
    }

    bool has(const std::string& key) const { return keys_.count(key) > 0; }

    void get(const std::string& key, double& out) {
        if (!take(key)) return;
        const std::string v = trimmed(key);
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ConfigError(key + ": '" + v + "' is not a number");
    }
    void get(const std::string& key, std::size_t& out) {
        if (!take(key)) return;
        const std::string v = trimmed(key);
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ConfigError(key + ": '" + v + "' is not a nonnegative integer");
    }
    void get(const std::string& key, std::uint64_t& out, int) {
        if (!take(key)) return;
        const std::string v = trimmed(key);
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ConfigError(key + ": '" + v + "' is not a nonnegative integer");
    }
    void get(const std::string& key, int& out) {
        if (!take(key)) return;
        const std::string v = trimmed(key);
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ConfigError(key + ": '" + v + "' is not an integer");
    }
    void get(const std::string& key, bool& out) {
        if (!take(key)) return;
        const std::string v = trimmed(key);
        if (v == "true" || v == "1") out = true;
        else if (v == "false" || v == "0") out = false;
        else throw ConfigError(key + ": '" + v + "' is not a boolean");
    }
    void get(const std::string& key, std::string& out) {
        if (take(key)) out = trimmed(key);
    }

    void reject_unknown() const {
        for (const auto& k : keys_)
            if (!used_.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
    }

private:
    bool take(const std::string& key) {
        if (!has(key)) return false;
        used_.insert(key);
        return true;
    }
    std::string trimmed(const std::string& key) const {
        std::string v = pt_.get<std::string>(key);
        const auto b = v.find_first_not_of(" \t");
        const auto e = v.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    }

    const boost::property_tree::ptree& pt_;
    std::set<std::string> keys_;
    std::set<std::string> used_;
};

} // namespace detail

inline ScenarioConfig parse_config_text(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.message() + " at line " +
                          std::to_string(e.line()));
    }
    detail::IniReader r(pt);
    std::string name;
    if (!r.has("scenario.name")) throw ConfigError("missing scenario.name");
    r.get("scenario.name", name);
    bool known = false;
    for (const auto& k : scenario_kinds()) known = known || k == name;
    if (!known) throw ConfigError("unknown scenario '" + name + "'");

    ScenarioConfig c = defaults_for(name);
    r.get("scenario.output_dir", c.output_dir);
    r.get("scenario.seed", c.seed, 0);

    auto& i = c.initial;
    r.get("initial.a0", i.a0);
    r.get("initial.b0", i.b0);
    r.get("initial.amplitude", i.amplitude);
    r.get("initial.level", i.level);
    r.get("initial.ratio_A", i.ratio_A);
    r.get("initial.M", i.M);
    r.get("initial.N", i.N);
    r.get("initial.L", i.L);
    r.get("initial.width", i.width);
    r.get("initial.shift", i.shift);
    r.get("initial.perturbation", i.perturbation);
    r.get("initial.a_expr", i.a_expr);
    r.get("initial.b_expr", i.b_expr);

    r.get("grid.n_points", c.grid.n_points);
    r.get("grid.half_width", c.grid.half_width);

    auto& s = c.solver;
    r.get("solver.t_end", s.t_end);
    r.get("solver.blowup_threshold", s.blowup_threshold);
    r.get("solver.dt_safety", s.dt_safety);
    r.get("solver.rate_fit_window", s.rate_fit_window);
    r.get("solver.sample_interval", s.sample_interval);
    r.get("solver.sample_growth", s.sample_growth);
    r.get("solver.workers", s.workers);

    auto& a = c.analysis;
    r.get("analysis.zeros", a.zeros);
    r.get("analysis.quotient", a.quotient);
    r.get("analysis.selfsimilar", a.selfsimilar);
    r.get("analysis.modes", a.modes);
    r.get("analysis.quotient_x_lo", a.quotient_x_lo);
    r.get("analysis.quotient_x_hi", a.quotient_x_hi);
    r.get("analysis.delta_floor_factor", a.delta_floor_factor);
    r.get("analysis.quotient_tolerance", a.quotient_tolerance);
    r.get("analysis.resolved_peak_nodes", a.resolved_peak_nodes);
    r.get("analysis.profile_tolerance", a.profile_tolerance);

    auto& m = c.modes;
    r.get("modes.y_half_width", m.y_half_width);
    r.get("modes.y_n_points", m.y_n_points);
    r.get("modes.s_span", m.s_span);
    r.get("modes.seed_amplitude", m.seed_amplitude);
    r.get("modes.sample_ds", m.sample_ds);
    r.get("modes.delta_bar", m.delta_bar);
    r.get("modes.R_bar", m.R_bar);
    r.get("modes.rate_tolerance", m.rate_tolerance);
    r.get("modes.eta_bar", m.eta_bar);
    r.get("modes.zeta_bar", m.zeta_bar);
    r.get("modes.eps_bar", m.eps_bar);
    r.get("modes.eps1", m.eps1);

    r.reject_unknown();
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Full INI text of a configuration; parse_config_text of it gives back an equal value.
inline std::string to_ini(const ScenarioConfig& c) {
    std::ostringstream o;
    auto d = [](double v) { return format_double(v); };
    auto b = [](bool v) { return v ? "true" : "false"; };
    o << "[scenario]\nname = " << c.name << "\noutput_dir = " << c.output_dir << "\nseed = " << c.seed << "\n\n";
    const auto& i = c.initial;
    o << "[initial]\na0 = " << d(i.a0) << "\nb0 = " << d(i.b0) << "\namplitude = " << d(i.amplitude)
      << "\nlevel = " << d(i.level) << "\nratio_A = " << d(i.ratio_A) << "\nM = " << d(i.M) << "\nN = " << d(i.N)
      << "\nL = " << d(i.L) << "\nwidth = " << d(i.width) << "\nshift = " << d(i.shift)
      << "\nperturbation = " << d(i.perturbation) << "\na_expr = " << i.a_expr << "\nb_expr = " << i.b_expr
      << "\n\n";
    o << "[grid]\nn_points = " << c.grid.n_points << "\nhalf_width = " << d(c.grid.half_width) << "\n\n";
    const auto& s = c.solver;
    o << "[solver]\nt_end = " << d(s.t_end) << "\nblowup_threshold = " << d(s.blowup_threshold)
      << "\ndt_safety = " << d(s.dt_safety) << "\nrate_fit_window = " << s.rate_fit_window
      << "\nsample_interval = " << d(s.sample_interval) << "\nsample_growth = " << d(s.sample_growth)
      << "\nworkers = " << s.workers << "\n\n";
    const auto& a = c.analysis;
    o << "[analysis]\nzeros = " << b(a.zeros) << "\nquotient = " << b(a.quotient)
      << "\nselfsimilar = " << b(a.selfsimilar) << "\nmodes = " << b(a.modes)
      << "\nquotient_x_lo = " << d(a.quotient_x_lo) << "\nquotient_x_hi = " << d(a.quotient_x_hi)
      << "\ndelta_floor_factor = " << d(a.delta_floor_factor) << "\nquotient_tolerance = " << d(a.quotient_tolerance)
      << "\nresolved_peak_nodes = " << a.resolved_peak_nodes << "\nprofile_tolerance = " << d(a.profile_tolerance)
      << "\n\n";
    const auto& m = c.modes;
    o << "[modes]\ny_half_width = " << d(m.y_half_width) << "\ny_n_points = " << m.y_n_points
      << "\ns_span = " << d(m.s_span) << "\nseed_amplitude = " << d(m.seed_amplitude)
      << "\nsample_ds = " << d(m.sample_ds) << "\ndelta_bar = " << d(m.delta_bar) << "\nR_bar = " << d(m.R_bar)
      << "\nrate_tolerance = " << d(m.rate_tolerance) << "\neta_bar = " << d(m.eta_bar)
      << "\nzeta_bar = " << d(m.zeta_bar) << "\neps_bar = " << d(m.eps_bar) << "\neps1 = " << d(m.eps1) << "\n";
    return o.str();
}

inline void ScenarioConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    try {
        const auto g = spatial_grid();
        if (name != "mode_rates") solver_config().validate();
        (void)g;
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
    if (output_dir.empty()) fail("output_dir must not be empty");
    const auto& i = initial;
    if (name == "ode_constant" && !(std::isfinite(i.a0) && std::isfinite(i.b0)))
        fail("ode_constant needs finite a0 and b0");
    if (name == "theorem11") {
        if (!(i.ratio_A > 0.0)) fail("theorem11 needs ratio_A > 0");
        if (!(i.level > 0.0)) fail("theorem11 needs level > 0");
        if (!(i.amplitude >= 0.0)) fail("theorem11 needs amplitude >= 0");
    }
    if (name == "theorem12") {
        if (!(i.N > 0.0 && i.M > i.N)) fail("theorem12 needs M > N > 0");
        if (!(i.L > 0.0)) fail("theorem12 needs L > 0");
        if (!(i.width > 0.0)) fail("theorem12 needs width > 0");
    }
    if ((name == "remark33" || name == "remark33_perturbed") && !std::isfinite(i.shift)) fail("shift must be finite");
    if (name == "remark33_perturbed" && !(i.perturbation >= 0.0)) fail("perturbation must be >= 0");
    if (name == "custom") {
        Expression::parse(i.a_expr);
        Expression::parse(i.b_expr);
    }
    const auto& a = analysis;
    if (a.quotient && !(a.quotient_x_hi > a.quotient_x_lo)) fail("quotient region needs x_lo < x_hi");
    if (!(a.delta_floor_factor > 0.0)) fail("delta_floor_factor must be positive");
    if (!(a.quotient_tolerance >= 0.0)) fail("quotient_tolerance must be >= 0");
    if (a.resolved_peak_nodes < 3) fail("resolved_peak_nodes must be >= 3");
    if (!(a.profile_tolerance > 0.0)) fail("profile_tolerance must be positive");
    if (a.modes || name == "mode_rates") {
        const auto& m = modes;
        try {
            build_quadrature(m.y_half_width, m.y_n_points);
        } catch (const Error& e) {
            fail(std::string("modes grid: ") + e.what());
        }
        if (!(m.s_span > 0.0)) fail("s_span must be positive");
        if (!(m.seed_amplitude > 0.0)) fail("seed_amplitude must be positive");
        if (!(m.sample_ds > 0.0)) fail("sample_ds must be positive");
        if (!(m.delta_bar > 0.0 && m.R_bar > 0.0)) fail("delta_bar and R_bar must be positive");
        if (!(m.rate_tolerance > 0.0)) fail("rate_tolerance must be positive");
        if (!(m.eta_bar > 0.0 && m.zeta_bar > 0.0 && m.eps_bar > 0.0 && m.eps1 > 0.0))
            fail("constants must be positive");
        const auto chk = validate_constants(m.eta_bar, m.zeta_bar, m.eps_bar, m.eps1);
        if (!chk.valid()) fail("constants not admissible: " + chk.describe());
    }
}

} // namespace zblow
