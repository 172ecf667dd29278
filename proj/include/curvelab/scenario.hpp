#pragma once

// Scenario files (JSON) and run reports.
//
// A scenario names a criterion ("thm1", "thm2", "cor24", "thm5") or "probe",
// a family with its schedule, targets or hyperplanes, constants, region and
// grid. Complex numbers are [re, im] pairs or plain numbers.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curvelab/criteria.hpp"
#include "curvelab/probe.hpp"

namespace curvelab {

struct ProbeSpec {
    std::optional<Disk> region;  // defaults to the scenario region
    double xi_radius = 2.0;
    GridSpec xi_grid{21, 21};
};

struct Scenario {
    std::string name;
    std::string theorem;
    FamilyScenario setup;
    std::optional<ProbeSpec> probe;
    std::optional<std::string> output_dir;
};

/// Validates against the schema and builds the scenario. Every offending key
/// is listed in the ScenarioError message; expression errors carry their
/// JSON path and byte offset.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Exit-code contract of `curvelab run`.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitViolated = 2 };

struct RunReport {
    nlohmann::json json;      // full report; "wall_time_s" is the only nondeterministic field
    std::string summary;      // human-readable lines for standard output
    std::string scan_csv;     // empty unless a probe ran
    int exit_code = kExitOk;
    std::optional<CheckReport> check;
    std::optional<MartyScan> scan;
    std::optional<Verdict> verdict;
};

/// Runs the checker and/or probe. `source` is hashed into the report.
RunReport run_scenario(const Scenario& s, std::string_view source);

/// Writes report.json and, when a probe ran, scan.csv into `dir`.
void write_report(const RunReport& r, const std::filesystem::path& dir);

std::string fnv1a_hex(std::string_view bytes);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const MartyScan& s);
nlohmann::json to_json(const RescalingRecord& r);

/// One row of the bundled example matrix.
struct ExampleRow {
    std::string name;
    bool matches = true;
    std::vector<std::string> cells;       // "key=actual" for every expected cell
    std::vector<std::string> mismatches;  // "key: expected X, got Y"
    int exit_code = 0;
};

/// Runs the bundled scenarios against the shipped expectation matrix.
/// `only` filters by name (ScenarioError when unknown); `grid` overrides resolution.
std::vector<ExampleRow> run_builtin_examples(std::optional<std::string> only = {}, std::optional<GridSpec> grid = {});

/// Names and raw JSON of the bundled scenarios.
std::vector<std::pair<std::string, std::string>> builtin_scenarios();

}  // namespace curvelab
