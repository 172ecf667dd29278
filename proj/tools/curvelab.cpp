// curvelab: run scenario files and the bundled examples.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "curvelab/error.hpp"
#include "curvelab/scenario.hpp"

namespace {

using namespace curvelab;

GridSpec parse_grid_flag(const std::string& text) {
    GridSpec g;
    const auto comma = text.find(',');
    try {
        std::size_t used = 0;
        g.nx = std::stoi(text.substr(0, comma), &used);
        if (used != text.substr(0, comma).size()) throw std::invalid_argument("trailing");
        g.ny = g.nx;
        if (comma != std::string::npos) {
            const std::string rest = text.substr(comma + 1);
            g.ny = std::stoi(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing");
        }
    } catch (const std::exception&) {
        throw ScenarioError("--grid expects NX or NX,NY");
    }
    if (g.nx < 32 || g.ny < 32) throw ScenarioError("--grid: resolution below 32x32");
    return g;
}

int run(const std::string& file, const std::string& grid, const std::string& out_dir) {
    std::ifstream in{file, std::ios::binary};
    if (!in) throw ScenarioError("cannot read " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string source = buf.str();

    Scenario s = parse_scenario(source);
    if (!grid.empty()) s.setup.grid = parse_grid_flag(grid);
    const RunReport r = run_scenario(s, source);

    std::filesystem::path dir = ".";
    if (!out_dir.empty()) {
        dir = out_dir;
    } else if (s.output_dir) {
        dir = std::filesystem::path{*s.output_dir};
        if (dir.is_relative()) dir = std::filesystem::path{file}.parent_path() / dir;
    }
    write_report(r, dir);
    std::cout << r.summary;
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return r.exit_code;
}

int examples(const std::string& only, const std::string& grid) {
    std::optional<std::string> filter;
    if (!only.empty()) filter = only;
    std::optional<GridSpec> g;
    if (!grid.empty()) g = parse_grid_flag(grid);
    const auto rows = run_builtin_examples(filter, g);
    bool all = true;
    for (const auto& row : rows) {
        std::cout << (row.matches ? "ok        " : "MISMATCH  ") << row.name << "  exit=" << row.exit_code;
        for (const auto& c : row.cells) std::cout << "  " << c;
        std::cout << "\n";
        for (const auto& m : row.mismatches) std::cout << "          " << m << "\n";
        all = all && row.matches;
    }
    std::cout << rows.size() << " example(s), " << (all ? "all match expectations" : "mismatch") << "\n";
    return all ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvelab: normality-criterion checkers and probes for holomorphic curves"};
    app.require_subcommand(1);

    std::string file, grid, out_dir, only;
    auto* run_cmd = app.add_subcommand("run", "check a scenario file, write report.json (and scan.csv)");
    run_cmd->add_option("file", file, "scenario JSON")->required();
    run_cmd->add_option("--grid", grid, "grid resolution NX[,NY]");
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* ex_cmd = app.add_subcommand("examples", "run the bundled examples against the expectation matrix");
    ex_cmd->add_option("--only", only, "run a single example by name");
    ex_cmd->add_option("--grid", grid, "grid resolution NX[,NY]");

    auto* version_cmd = app.add_subcommand("version", "print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return run(file, grid, out_dir);
        if (*ex_cmd) return examples(only, grid);
        if (*version_cmd) {
            std::cout << "curvelab " << CURVELAB_VERSION << "\n";
            return kExitOk;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
