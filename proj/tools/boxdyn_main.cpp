// boxdyn CLI: scenario runner for the moving-wall box engines.
//
//   boxdyn <scenario> --config <file> [--out <dir>] [--override key=value ...]
//
// Exit codes: 0 success, 2 config error, 3 engine tolerance failure, 4 I/O.

#include "boxdyn/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int run(const std::string& scenario_name, const std::string& config_path,
        const std::string& out_dir, const std::vector<std::string>& overrides) {
    std::string text;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "boxdyn: cannot open config " << config_path << "\n";
            return boxdyn::kConfigError;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    boxdyn::ScenarioConfig cfg;
    try {
        for (const auto& ov : overrides) boxdyn::apply_override(text, ov);
        cfg = boxdyn::parse_config(text);
    } catch (const std::exception& e) {
        std::cerr << "boxdyn: " << e.what() << "\n";
        return boxdyn::kConfigError;
    }
    const std::map<std::string, boxdyn::ScenarioKind> names = {
        {"strong-check", boxdyn::ScenarioKind::StrongCheck},
        {"weak-scan", boxdyn::ScenarioKind::WeakScan},
        {"oracle-compare", boxdyn::ScenarioKind::OracleCompare},
        {"theta-selftest", boxdyn::ScenarioKind::ThetaSelftest},
        {"reversal", boxdyn::ScenarioKind::Reversal}};
    if (names.at(scenario_name) != cfg.scenario) {
        std::cerr << "boxdyn: config names a different scenario than the command line\n";
        return boxdyn::kConfigError;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const boxdyn::RunResult res = boxdyn::run_scenario(cfg);
    if (!res.summary.empty()) std::cout << res.summary << "\n";
    for (std::size_t i = 1; i < res.report_lines.size(); ++i)
        std::cout << res.report_lines[i] << "\n";
    if (res.exit_code != boxdyn::kOk)
        std::cerr << "boxdyn: scenario finished with exit code " << res.exit_code << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moving-wall quantum box simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::string chosen;
    for (const char* name :
         {"strong-check", "weak-scan", "oracle-compare", "theta-selftest", "reversal"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON scenario config")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--override", overrides, "dotted-path config override key=value");
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, config_path, out_dir, overrides);
}
