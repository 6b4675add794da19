#include "boxdyn/scenario.hpp"
#include "boxdyn/theta.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace boxdyn {

using nlohmann::json;

namespace {

constexpr const char* kEngineName = "boxdyn";
constexpr const char* kEngineVersion = "1.0.0";

// ---- config parsing --------------------------------------------------------

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: " + where + ": " + what);
}

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) config_error(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            config_error(where + "." + it.key(), "unknown key");
}

double get_num(const json& j, const std::string& where, const std::string& key,
               bool required, double fallback = 0.0) {
    if (!j.contains(key)) {
        if (required) config_error(where + "." + key, "missing");
        return fallback;
    }
    if (!j[key].is_number()) config_error(where + "." + key, "expected a number");
    return j[key].get<double>();
}

ScenarioKind parse_kind(const std::string& s) {
    if (s == "strong-check") return ScenarioKind::StrongCheck;
    if (s == "weak-scan") return ScenarioKind::WeakScan;
    if (s == "oracle-compare") return ScenarioKind::OracleCompare;
    if (s == "theta-selftest") return ScenarioKind::ThetaSelftest;
    if (s == "reversal") return ScenarioKind::Reversal;
    config_error("scenario", "unknown scenario '" + s + "'");
}

std::string kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::StrongCheck: return "strong-check";
        case ScenarioKind::WeakScan: return "weak-scan";
        case ScenarioKind::OracleCompare: return "oracle-compare";
        case ScenarioKind::ThetaSelftest: return "theta-selftest";
        case ScenarioKind::Reversal: return "reversal";
    }
    return "?";
}

WallTrajectory parse_traj(const json& j) {
    reject_unknown(j, "trajectory", {"variant", "L0", "q", "beta", "T"});
    if (!j.contains("variant") || !j["variant"].is_string())
        config_error("trajectory.variant", "missing or not a string");
    const std::string v = j["variant"].get<std::string>();
    const double L0 = get_num(j, "trajectory", "L0", true);
    if (v == "static") {
        if (j.contains("q") || j.contains("beta") || j.contains("T"))
            config_error("trajectory", "static takes only L0");
        return WallTrajectory::make_static(L0);
    }
    const double q = get_num(j, "trajectory", "q", true);
    if (v == "linear") {
        if (j.contains("beta") || j.contains("T"))
            config_error("trajectory", "linear takes L0 and q only");
        return WallTrajectory::linear(L0, q);
    }
    if (v == "smooth-turn-on") {
        if (j.contains("T")) config_error("trajectory.T", "not a smooth-turn-on parameter");
        return WallTrajectory::smooth_turn_on(L0, q, get_num(j, "trajectory", "beta", true));
    }
    if (v == "piecewise-reversal") {
        if (j.contains("beta")) config_error("trajectory.beta", "not a reversal parameter");
        return WallTrajectory::piecewise_reversal(L0, q, get_num(j, "trajectory", "T", true));
    }
    config_error("trajectory.variant", "unknown variant '" + v + "'");
}

InitialState parse_state(const json& j) {
    InitialState st;
    if (!j.contains("type") || !j["type"].is_string())
        config_error("initial_state.type", "missing or not a string");
    const std::string t = j["type"].get<std::string>();
    if (t == "gaussian") {
        reject_unknown(j, "initial_state", {"type", "d"});
        st.kind = InitialState::Kind::Gaussian;
        st.gaussian.d = get_num(j, "initial_state", "d", true);
    } else if (t == "basis") {
        reject_unknown(j, "initial_state", {"type", "n"});
        st.kind = InitialState::Kind::Basis;
        st.basis.n = static_cast<std::size_t>(get_num(j, "initial_state", "n", true));
    } else if (t == "superposition") {
        reject_unknown(j, "initial_state", {"type", "terms"});
        st.kind = InitialState::Kind::Superposition;
        if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
            config_error("initial_state.terms", "missing or empty");
        double nrm = 0.0;
        for (const auto& term : j["terms"]) {
            reject_unknown(term, "initial_state.terms[]", {"n", "parity", "re", "im"});
            SuperpositionTerm s;
            s.idx.n = static_cast<std::size_t>(get_num(term, "terms[]", "n", true));
            if (term.contains("parity")) {
                const std::string p = term["parity"].get<std::string>();
                if (p == "even") s.idx.parity = Parity::Even;
                else if (p == "odd") s.idx.parity = Parity::Odd;
                else config_error("initial_state.terms[].parity", "expected even|odd");
            }
            s.weight = cplx(get_num(term, "terms[]", "re", true),
                            get_num(term, "terms[]", "im", false, 0.0));
            nrm += std::norm(s.weight);
            st.terms.push_back(s);
        }
        if (std::abs(nrm - 1.0) > 1e-12)
            config_error("initial_state.terms", "weights must normalize to 1 within 1e-12");
    } else {
        config_error("initial_state.type", "unknown type '" + t + "'");
    }
    return st;
}

std::vector<double> parse_times(const json& j) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) config_error("times[]", "expected numbers");
            out.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        reject_unknown(j, "times", {"start", "stop", "step"});
        const double a = get_num(j, "times", "start", true);
        const double b = get_num(j, "times", "stop", true);
        const double h = get_num(j, "times", "step", true);
        if (!(h > 0.0) || !(b >= a)) config_error("times", "need step > 0 and stop >= start");
        const auto nsteps = static_cast<std::size_t>(std::llround((b - a) / h));
        for (std::size_t i = 0; i <= nsteps; ++i) out.push_back(a + static_cast<double>(i) * h);
    } else {
        config_error("times", "expected an array or {start, stop, step}");
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) config_error("times", "must be strictly increasing");
    return out;
}

}  // namespace

void ScenarioConfig::validate() const {
    params.validate();
    traj.validate();
    propagator.validate();
    if (grid_points < 8) config_error("grid.n_points", "too small");
    switch (scenario) {
        case ScenarioKind::StrongCheck:
            if (!traj.is_linear_family())
                config_error("trajectory", "strong-check requires linear or static walls");
            if (initial_state.kind != InitialState::Kind::Gaussian)
                config_error("initial_state", "strong-check requires a gaussian state");
            if (times.empty() || probes.empty())
                config_error("times/probes", "strong-check needs t samples and x samples");
            break;
        case ScenarioKind::WeakScan:
            if (times.empty() || probes.empty())
                config_error("times/probes", "weak-scan needs probes and times");
            if (times.front() != 0.0) config_error("times", "weak-scan times must start at 0");
            break;
        case ScenarioKind::OracleCompare:
            if (traj.kind != TrajectoryKind::Linear && traj.kind != TrajectoryKind::Static)
                config_error("trajectory", "oracle-compare requires linear or static walls");
            if (initial_state.kind == InitialState::Kind::Superposition)
                config_error("initial_state", "oracle-compare takes basis or gaussian states");
            if (times.empty()) config_error("times", "oracle-compare needs output times");
            break;
        case ScenarioKind::Reversal:
            if (traj.kind != TrajectoryKind::PiecewiseReversal)
                config_error("trajectory", "reversal requires a piecewise-reversal trajectory");
            break;
        case ScenarioKind::ThetaSelftest:
            break;
    }
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        config_error("(root)", std::string("JSON parse failure: ") + e.what());
    }
    reject_unknown(j, "(root)",
                   {"scenario", "params", "trajectory", "initial_state", "grid", "propagator",
                    "probes", "times", "output_dir", "seed", "samples"});
    ScenarioConfig cfg;
    if (!j.contains("scenario") || !j["scenario"].is_string())
        config_error("scenario", "missing or not a string");
    cfg.scenario = parse_kind(j["scenario"].get<std::string>());

    if (j.contains("params")) {
        reject_unknown(j["params"], "params", {"m", "hbar", "c"});
        cfg.params.m = get_num(j["params"], "params", "m", false, 1.0);
        cfg.params.hbar = get_num(j["params"], "params", "hbar", false, 1.0);
        cfg.params.c = get_num(j["params"], "params", "c", false, 137.035999);
    }
    if (j.contains("trajectory")) cfg.traj = parse_traj(j["trajectory"]);
    else if (cfg.scenario != ScenarioKind::ThetaSelftest)
        config_error("trajectory", "missing");
    if (j.contains("initial_state")) cfg.initial_state = parse_state(j["initial_state"]);
    if (j.contains("grid")) {
        reject_unknown(j["grid"], "grid", {"n_points"});
        cfg.grid_points = static_cast<std::size_t>(get_num(j["grid"], "grid", "n_points", true));
    }
    if (j.contains("propagator")) {
        reject_unknown(j["propagator"], "propagator", {"dt", "n_points", "spatial_order"});
        cfg.propagator.dt = get_num(j["propagator"], "propagator", "dt", false, 0.0);
        cfg.propagator.n_points = static_cast<std::size_t>(
            get_num(j["propagator"], "propagator", "n_points", false,
                    static_cast<double>(cfg.grid_points)));
        cfg.propagator.spatial_order =
            static_cast<int>(get_num(j["propagator"], "propagator", "spatial_order", false, 4.0));
    } else {
        cfg.propagator.n_points = cfg.grid_points;
    }
    if (j.contains("probes")) {
        if (!j["probes"].is_array()) config_error("probes", "expected an array");
        for (const auto& v : j["probes"]) cfg.probes.push_back(v.get<double>());
    }
    if (j.contains("times")) cfg.times = parse_times(j["times"]);
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) cfg.samples = j["samples"].get<std::size_t>();
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("config: cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(std::string& json_text, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override: expected key.path=value, got '" + key_value + "'");
    const std::string path = key_value.substr(0, eq);
    const std::string value = key_value.substr(eq + 1);
    json j = json::parse(json_text);
    json* node = &j;
    std::size_t pos = 0;
    std::vector<std::string> parts;
    while (pos != std::string::npos) {
        const auto dot = path.find('.', pos);
        parts.push_back(path.substr(pos, dot == std::string::npos ? dot : dot - pos));
        pos = (dot == std::string::npos) ? dot : dot + 1;
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;   // plain string
    }
    (*node)[parts.back()] = parsed;
    json_text = j.dump(2);
}

// ---- emission ---------------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("io: short write to " + p.string());
}

std::string series_rows(const ObservableSeries& s) {
    std::string text;
    for (const auto& r : s.records) {
        text += format_double(r.t); text += ',';
        text += format_double(s.probe.x); text += ',';
        text += format_double(r.density); text += ',';
        text += format_double(r.j); text += ',';
        text += format_double(r.v); text += ',';
        text += format_double(r.re_pw); text += ',';
        text += r.inside_light_cone ? '1' : '0'; text += ',';
        text += r.defined ? '1' : '0'; text += '\n';
    }
    return text;
}

constexpr const char* kSeriesHeader = "t,x,density,j,v,re_pw,inside_light_cone,defined\n";

std::string probe_file_name(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "probe_%g.csv", x);
    for (char& ch : buf) if (ch == '.' || ch == '-') ch = (ch == '.') ? 'p' : 'm';
    std::string s(buf);
    const auto dot = s.rfind("pcsv");
    if (dot != std::string::npos) s.replace(dot, 4, ".csv");
    return s;
}

json config_json(const ScenarioConfig& cfg, double resolved_dt) {
    json t;
    switch (cfg.traj.kind) {
        case TrajectoryKind::Static: t = {{"variant", "static"}, {"L0", cfg.traj.L0}}; break;
        case TrajectoryKind::Linear:
            t = {{"variant", "linear"}, {"L0", cfg.traj.L0}, {"q", cfg.traj.q}}; break;
        case TrajectoryKind::SmoothTurnOn:
            t = {{"variant", "smooth-turn-on"}, {"L0", cfg.traj.L0}, {"q", cfg.traj.q},
                 {"beta", cfg.traj.beta}};
            break;
        case TrajectoryKind::PiecewiseReversal:
            t = {{"variant", "piecewise-reversal"}, {"L0", cfg.traj.L0}, {"q", cfg.traj.q},
                 {"T", cfg.traj.T}};
            break;
    }
    json st;
    switch (cfg.initial_state.kind) {
        case InitialState::Kind::Gaussian:
            st = {{"type", "gaussian"}, {"d", cfg.initial_state.gaussian.d}}; break;
        case InitialState::Kind::Basis:
            st = {{"type", "basis"}, {"n", cfg.initial_state.basis.n}}; break;
        case InitialState::Kind::Superposition: {
            st["type"] = "superposition";
            st["terms"] = json::array();
            for (const auto& term : cfg.initial_state.terms)
                st["terms"].push_back({{"n", term.idx.n},
                                       {"parity", term.idx.parity == Parity::Even ? "even" : "odd"},
                                       {"re", term.weight.real()},
                                       {"im", term.weight.imag()}});
            break;
        }
    }
    return json{{"scenario", kind_name(cfg.scenario)},
                {"params", {{"m", cfg.params.m}, {"hbar", cfg.params.hbar}, {"c", cfg.params.c}}},
                {"trajectory", t},
                {"initial_state", st},
                {"grid", {{"n_points", cfg.grid_points}}},
                {"propagator", {{"dt", cfg.propagator.dt}, {"resolved_dt", resolved_dt},
                                {"n_points", cfg.propagator.n_points},
                                {"spatial_order", cfg.propagator.spatial_order}}},
                {"probes", cfg.probes},
                {"times", cfg.times},
                {"seed", cfg.seed},
                {"samples", cfg.samples},
                {"output_dir", cfg.output_dir.string()}};
}

void write_manifest(const ScenarioConfig& cfg, double resolved_dt, const json& achieved) {
    json m{{"config", config_json(cfg, resolved_dt)},
           {"engine", {{"name", kEngineName}, {"version", kEngineVersion}}},
           {"tolerances_achieved", achieved}};
    write_text(cfg.output_dir / "manifest.json", m.dump(2) + "\n");
}

void write_report(const ScenarioConfig& cfg, const std::vector<std::string>& lines) {
    std::string text;
    for (const auto& l : lines) { text += l; text += '\n'; }
    write_text(cfg.output_dir / "report.txt", text);
}

// initial state on the transformed grid at t = 0
WaveField build_initial(const ScenarioConfig& cfg) {
    const Grid grid = Grid::transformed(cfg.traj.L0, cfg.grid_points);
    switch (cfg.initial_state.kind) {
        case InitialState::Kind::Gaussian:
            return gaussian_initial(cfg.initial_state.gaussian, grid);
        case InitialState::Kind::Basis:
            return eigenstate(cfg.initial_state.basis, cfg.traj.L0, grid);
        case InitialState::Kind::Superposition: {
            WaveField acc(grid, 0.0);
            for (const auto& term : cfg.initial_state.terms) {
                const WaveField e = eigenstate(term.idx, cfg.traj.L0, grid);
                for (std::size_t i = 0; i < grid.n(); ++i)
                    acc.samples[i] += term.weight * e.samples[i];
            }
            acc.enforce_dirichlet();
            return acc;
        }
    }
    throw std::logic_error("build_initial: unreachable");
}

// ---- scenarios ---------------------------------------------------------------

RunResult run_theta_selftest(const ScenarioConfig& cfg) {
    RunResult res;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double max_transform = 0.0, max_parity = 0.0, max_quasi = 0.0;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const double im_k = 0.05 * std::pow(50.0 / 0.05, u01(rng));
        const cplx kappa(2.0 * u01(rng) - 1.0, im_k);
        const cplx z((2.0 * u01(rng) - 1.0) * M_PI, 2.0 * u01(rng) - 1.0);
        const ThetaArgument arg{z, kappa};
        const cplx direct = theta2_direct(arg);
        const cplx trans = jacobi_transform_theta2(arg);
        max_transform = std::max(max_transform,
                                 std::abs(direct - trans) / std::max(1.0, std::abs(direct)));
        const cplx p2 = theta2_direct({-z, kappa});
        const cplx p4 = theta4_direct({-z, kappa});
        const cplx q4 = theta4_direct({z, kappa});
        max_parity = std::max({max_parity,
                               std::abs(direct - p2) / std::max(1.0, std::abs(direct)),
                               std::abs(q4 - p4) / std::max(1.0, std::abs(q4))});
        const cplx dual = -1.0 / kappa;
        if (dual.imag() >= 20.0) {
            const cplx zz = z / kappa;
            const double bound =
                3.0 * std::exp(-M_PI * dual.imag()) * std::exp(2.0 * std::abs(zz.imag()));
            const double dev = std::abs(theta4_direct({zz, dual}) - 1.0);
            if (dev > bound) max_quasi = std::max(max_quasi, dev - bound);
        }
    }
    const double tol = 1e-12;
    json achieved{{"max_transform_residual", max_transform},
                  {"max_parity_residual", max_parity},
                  {"max_quasi_periodicity_excess", max_quasi}};
    res.report_lines.push_back(
        std::string(max_transform < tol ? "PASS" : "FAIL") +
        " theta transformation identity: max rel residual = " + format_double(max_transform) +
        " (bound " + format_double(tol) + ", samples " + std::to_string(cfg.samples) + ")");
    res.report_lines.push_back(std::string(max_parity < tol ? "PASS" : "FAIL") +
                               " theta parity: max rel residual = " + format_double(max_parity) +
                               " (bound " + format_double(tol) + ")");
    res.report_lines.push_back(std::string(max_quasi == 0.0 ? "PASS" : "FAIL") +
                               " theta4 quasi-periodicity tail bound: max excess = " +
                               format_double(max_quasi));
    std::string csv = "check,value\n";
    csv += "max_transform_residual," + format_double(max_transform) + "\n";
    csv += "max_parity_residual," + format_double(max_parity) + "\n";
    csv += "max_quasi_periodicity_excess," + format_double(max_quasi) + "\n";
    write_text(cfg.output_dir / "theta.csv", csv);
    write_manifest(cfg, 0.0, achieved);
    write_report(cfg, res.report_lines);
    const bool ok = max_transform < tol && max_parity < tol && max_quasi == 0.0;
    res.exit_code = ok ? kOk : kToleranceError;
    res.summary = res.report_lines.front();
    return res;
}

RunResult run_strong_check(const ScenarioConfig& cfg) {
    RunResult res;
    const double ratio_tol = 1e-8, route_tol = 1e-12;
    double max_dev = 0.0, max_route = 0.0;
    std::size_t skipped = 0;
    std::string csv = "t,x,ratio_re,ratio_im,abs_ratio_minus_1,route_disagreement\n";
    for (double t : cfg.times) {
        for (double x : cfg.probes) {
            StaticMovingRatio r;
            try {
                r = ratio_static_moving(cfg.initial_state.gaussian, cfg.traj, x, t, cfg.params);
            } catch (const std::domain_error&) {
                ++skipped;   // wavefunction node
                continue;
            }
            const double dev = std::abs(r.theta4_route - 1.0);
            max_dev = std::max(max_dev, dev);
            max_route = std::max(max_route, r.route_disagreement /
                                                std::max(1.0, std::abs(r.theta4_route)));
            csv += format_double(t); csv += ',';
            csv += format_double(x); csv += ',';
            csv += format_double(r.theta4_route.real()); csv += ',';
            csv += format_double(r.theta4_route.imag()); csv += ',';
            csv += format_double(dev); csv += ',';
            csv += format_double(r.route_disagreement); csv += '\n';
        }
    }
    write_text(cfg.output_dir / "ratio.csv", csv);
    json achieved{{"max_abs_ratio_minus_1", max_dev},
                  {"max_route_disagreement", max_route},
                  {"skipped_nodes", skipped}};
    res.report_lines.push_back(std::string(max_dev < ratio_tol ? "PASS" : "FAIL") +
                               " static/moving ratio: max |ratio - 1| = " + format_double(max_dev) +
                               " (bound " + format_double(ratio_tol) + ")");
    res.report_lines.push_back(std::string(max_route < route_tol ? "PASS" : "FAIL") +
                               " theta2/theta4 route agreement: max = " + format_double(max_route) +
                               " (bound " + format_double(route_tol) + ")");
    write_manifest(cfg, 0.0, achieved);
    write_report(cfg, res.report_lines);
    res.exit_code = (max_dev < ratio_tol && max_route < route_tol) ? kOk : kToleranceError;
    res.summary = res.report_lines.front();
    return res;
}

RunResult run_weak_scan(const ScenarioConfig& cfg) {
    RunResult res;
    std::vector<ProbePoint> probes;
    for (double x : cfg.probes) probes.push_back(ProbePoint::make(x, cfg.traj.L0, cfg.params));
    std::vector<ObservableSeries> series;
    for (const auto& p : probes) series.push_back(ObservableSeries{p, {}});

    const WaveField psi0 = build_initial(cfg);
    PropagationStats stats;
    const bool analytic_engine = cfg.traj.is_linear_family();
    double resolved_dt = 0.0;
    if (analytic_engine) {
        const SpectralCoefficients coeffs =
            expand_initial(psi0, cfg.traj, 64, cfg.params);
        for (double t : cfg.times) {
            const Grid phys = Grid::physical(wall_length(cfg.traj, t), t, cfg.grid_points);
            scan_append(series, propagate_spectral(coeffs, t, phys, cfg.params), t, cfg.params);
        }
    } else {
        PropagatorConfig pc = cfg.propagator;
        pc.n_points = cfg.grid_points;
        resolved_dt = (pc.dt > 0.0)
                          ? pc.dt
                          : cfl_timestep(pc, cfg.params, cfg.traj, cfg.times.front(),
                                         cfg.times.back());
        pc.dt = resolved_dt;
        auto observer = [&](double t, const WaveField& psi_tilde) {
            const Grid phys = Grid::physical(wall_length(cfg.traj, t), t, psi_tilde.n());
            scan_append(series, to_physical(psi_tilde, cfg.traj, t, phys), t, cfg.params);
        };
        propagate_numeric(psi0, cfg.traj, cfg.times.front(), cfg.times.back(), pc, cfg.params,
                          &stats, &cfg.times, observer);
    }
    emit_series(series, cfg.output_dir);

    double max_repw_t0 = 0.0;
    for (const auto& s : series)
        if (!s.records.empty() && s.records.front().defined)
            max_repw_t0 = std::max(max_repw_t0, std::abs(s.records.front().re_pw));
    json achieved{{"max_re_pw_at_t0", max_repw_t0}};
    res.report_lines.push_back(std::string(max_repw_t0 == 0.0 ? "PASS" : "FAIL") +
                               " Re P_w(t=0) = 0 at every probe: max = " +
                               format_double(max_repw_t0));
    if (!analytic_engine) {
        achieved["norm_drift"] = stats.norm_drift;
        achieved["continuity_l1"] = stats.continuity_residual;
        res.report_lines.push_back(std::string(stats.norm_drift < 1e-8 ? "PASS" : "FAIL") +
                                   " norm drift = " + format_double(stats.norm_drift) +
                                   " (bound 1e-08)");
        res.report_lines.push_back(std::string(stats.continuity_residual < 1e-5 ? "PASS" : "FAIL") +
                                   " continuity L1 residual = " +
                                   format_double(stats.continuity_residual) + " (bound 1e-05)");
    }
    for (const auto& s : series) {
        std::size_t transitions = 0;
        for (std::size_t i = 1; i < s.records.size(); ++i)
            if (s.records[i].inside_light_cone != s.records[i - 1].inside_light_cone)
                ++transitions;
        res.report_lines.push_back("INFO probe x=" + format_double(s.probe.x) +
                                   " t_c=" + format_double(s.probe.t_c) +
                                   " light-cone transitions=" + std::to_string(transitions));
    }
    write_manifest(cfg, resolved_dt, achieved);
    write_report(cfg, res.report_lines);
    bool ok = max_repw_t0 == 0.0;
    if (!analytic_engine)
        ok = ok && stats.norm_drift < 1e-8 && stats.continuity_residual < 1e-5;
    res.exit_code = ok ? kOk : kToleranceError;
    res.summary = res.report_lines.front();
    return res;
}

RunResult run_oracle_compare(const ScenarioConfig& cfg) {
    RunResult res;
    const WaveField psi0 = build_initial(cfg);
    PropagatorConfig pc = cfg.propagator;
    pc.n_points = cfg.grid_points;
    const double resolved_dt =
        (pc.dt > 0.0) ? pc.dt
                      : cfl_timestep(pc, cfg.params, cfg.traj, 0.0, cfg.times.back());
    pc.dt = resolved_dt;

    double max_linf = 0.0;
    std::string csv = "t,linf_vs_analytic\n";
    auto observer = [&](double t, const WaveField& psi_tilde) {
        WaveField ref(psi_tilde.grid, t);
        if (cfg.initial_state.kind == InitialState::Kind::Basis) {
            ref = basis_tilde(cfg.initial_state.basis, cfg.traj, t, psi_tilde.grid, cfg.params);
        } else {
            const Grid phys = Grid::physical(wall_length(cfg.traj, t), t, psi_tilde.n());
            ref = to_transformed(
                gaussian_closed_form(cfg.initial_state.gaussian, cfg.traj, t, phys, cfg.params),
                cfg.traj, t);
        }
        double linf = 0.0;
        for (std::size_t i = 0; i < psi_tilde.n(); ++i)
            linf = std::max(linf, std::abs(psi_tilde.samples[i] - ref.samples[i]));
        max_linf = std::max(max_linf, linf);
        csv += format_double(t); csv += ',';
        csv += format_double(linf); csv += '\n';
    };
    PropagationStats stats;
    propagate_numeric(psi0, cfg.traj, 0.0, cfg.times.back(), pc, cfg.params, &stats, &cfg.times,
                      observer);
    write_text(cfg.output_dir / "oracle.csv", csv);

    json achieved{{"max_linf", max_linf},
                  {"norm_drift", stats.norm_drift},
                  {"continuity_l1", stats.continuity_residual},
                  {"steps", stats.steps}};
    res.report_lines.push_back(std::string(max_linf < 1e-6 ? "PASS" : "FAIL") +
                               " numeric vs analytic Linf = " + format_double(max_linf) +
                               " (bound 1e-06)");
    res.report_lines.push_back(std::string(stats.norm_drift < 1e-8 ? "PASS" : "FAIL") +
                               " norm drift = " + format_double(stats.norm_drift) +
                               " (bound 1e-08)");
    res.report_lines.push_back(std::string(stats.continuity_residual < 1e-5 ? "PASS" : "FAIL") +
                               " continuity L1 residual = " +
                               format_double(stats.continuity_residual) + " (bound 1e-05)");
    write_manifest(cfg, resolved_dt, achieved);
    write_report(cfg, res.report_lines);
    res.exit_code = (max_linf < 1e-6 && stats.norm_drift < 1e-8 &&
                     stats.continuity_residual < 1e-5)
                        ? kOk
                        : kToleranceError;
    res.summary = res.report_lines.front();
    return res;
}

RunResult run_reversal(const ScenarioConfig& cfg) {
    RunResult res;
    if (cfg.initial_state.kind != InitialState::Kind::Basis)
        config_error("initial_state", "reversal expects a basis state");
    SpectralCoefficients start;
    start.traj = WallTrajectory::linear(cfg.traj.L0, cfg.traj.q);
    start.coeffs.assign(cfg.initial_state.basis.n + 1, cplx(0.0));
    start.coeffs[cfg.initial_state.basis.n] = 1.0;

    const SpectralCoefficients rebased =
        rebase_at_reversal(start, cfg.traj, cfg.grid_points, cfg.params);
    std::string csv = "n,re,im,abs\n";
    std::size_t above = 0;
    for (std::size_t n = 0; n < rebased.coeffs.size(); ++n) {
        const cplx c = rebased.coeffs[n];
        if (std::abs(c) > 1e-6) ++above;
        csv += std::to_string(n); csv += ',';
        csv += format_double(c.real()); csv += ',';
        csv += format_double(c.imag()); csv += ',';
        csv += format_double(std::abs(c)); csv += '\n';
    }
    write_text(cfg.output_dir / "coefficients.csv", csv);
    const double norm = std::sqrt(rebased.norm_sq());
    json achieved{{"rebased_norm", norm}, {"coefficients_above_1e-6", above}};
    res.report_lines.push_back(std::string(above > 1 ? "PASS" : "FAIL") +
                               " reversal mixes basis states: " + std::to_string(above) +
                               " coefficients above 1e-6");
    res.report_lines.push_back(std::string(std::abs(norm - 1.0) < 1e-8 ? "PASS" : "FAIL") +
                               " rebased norm = " + format_double(norm) + " (1 within 1e-08)");
    write_manifest(cfg, 0.0, achieved);
    write_report(cfg, res.report_lines);
    res.exit_code = (above > 1 && std::abs(norm - 1.0) < 1e-8) ? kOk : kToleranceError;
    res.summary = res.report_lines.front();
    return res;
}

}  // namespace

void emit_series(const std::vector<ObservableSeries>& series,
                 const std::filesystem::path& dir) {
    std::string combined = kSeriesHeader;
    for (const auto& s : series) {
        const std::string rows = series_rows(s);
        write_text(dir / probe_file_name(s.probe.x), kSeriesHeader + rows);
        combined += rows;
    }
    write_text(dir / "series.csv", combined);
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    RunResult res;
    try {
        std::filesystem::create_directories(cfg.output_dir);
        switch (cfg.scenario) {
            case ScenarioKind::ThetaSelftest: return run_theta_selftest(cfg);
            case ScenarioKind::StrongCheck: return run_strong_check(cfg);
            case ScenarioKind::WeakScan: return run_weak_scan(cfg);
            case ScenarioKind::OracleCompare: return run_oracle_compare(cfg);
            case ScenarioKind::Reversal: return run_reversal(cfg);
        }
        res.exit_code = kConfigError;
        res.summary = "unknown scenario";
    } catch (const std::invalid_argument& e) {
        res.exit_code = kConfigError;
        res.summary = e.what();
    } catch (const std::filesystem::filesystem_error& e) {
        res.exit_code = kIoError;
        res.summary = e.what();
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        res.exit_code = (what.rfind("io:", 0) == 0) ? kIoError : kToleranceError;
        res.summary = what;
    }
    return res;
}

}  // namespace boxdyn
