#ifndef BOXDYN_SCENARIO_HPP
#define BOXDYN_SCENARIO_HPP

// Scenario configuration, orchestration and deterministic data emission.
// Configs are JSON with a strict schema: unknown keys are errors.  Every run
// writes its data CSVs, a resolved-config manifest and a human-readable
// report with one pass/fail line per check.

#include "boxdyn/analytic.hpp"
#include "boxdyn/model.hpp"
#include "boxdyn/numeric.hpp"
#include "boxdyn/observables.hpp"

#include <filesystem>
#include <string>

namespace boxdyn {

enum class ScenarioKind { StrongCheck, WeakScan, OracleCompare, ThetaSelftest, Reversal };

struct SuperpositionTerm {
    BasisIndex idx;
    cplx weight;
};

struct InitialState {
    enum class Kind { Gaussian, Superposition, Basis } kind = Kind::Gaussian;
    GaussianParams gaussian;
    std::vector<SuperpositionTerm> terms;
    BasisIndex basis;
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::ThetaSelftest;
    PhysicalParams params;
    WallTrajectory traj;
    InitialState initial_state;
    std::size_t grid_points = 4096;
    PropagatorConfig propagator;
    std::vector<double> probes;
    std::vector<double> times;          // output times
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 20170907;      // randomized self-tests
    std::size_t samples = 1000;         // randomized self-test sample count

    void validate() const;
};

// Parse a JSON config file / string; throws std::invalid_argument with the
// offending key path on schema violations.
ScenarioConfig load_config(const std::filesystem::path& file);
ScenarioConfig parse_config(const std::string& json_text);

// Apply a dotted-path override such as "trajectory.q=1e-3".
void apply_override(std::string& json_text, const std::string& key_value);

// Exit codes: 0 ok, 2 config error, 3 engine/tolerance failure, 4 I/O error.
enum ExitCode : int { kOk = 0, kConfigError = 2, kToleranceError = 3, kIoError = 4 };

struct RunResult {
    int exit_code = kOk;
    std::string summary;
    std::vector<std::string> report_lines;
};

RunResult run_scenario(const ScenarioConfig& cfg);

// CSV emission: columns t, x, density, j, v, re_pw, inside_light_cone,
// defined; one file per probe plus a combined file.  Floats are written in
// scientific notation with 17 significant digits so doubles round-trip
// exactly.
void emit_series(const std::vector<ObservableSeries>& series,
                 const std::filesystem::path& dir);

std::string format_double(double v);

}  // namespace boxdyn

#endif
