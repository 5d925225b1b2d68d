#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forest/optimize.hpp"

namespace forest {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat scenario description mirroring the JSON configuration files.
// Units: months, per-month rates, euro.
struct ScenarioConfig {
    std::string label;
    double n0 = 0.0;
    double s0 = 0.0;
    double mortality = 0.0042;
    double lambda = 0.0;
    double alpha = 0.0;
    double alpha_p = 0.0;
    double delta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double cd = 0.0;
    double cs = 0.0;
    double h_max = 0.075;
    double T_min = 0.0;
    double T_max = 0.0;
    double T_step = 0.5;
    double dt = 0.05;
    std::optional<double> fixed_T;
    std::size_t mc_samples = 100000;
    std::uint64_t mc_seed = 20260809;

    static ScenarioConfig from_json_file(const std::string& path);
    static ScenarioConfig from_json_text(const std::string& text);
    void validate() const;  // throws ValidationError with the offending field

    Problem to_problem(ControlFamily family, bool with_risk) const;
};

struct ScenarioRow {
    std::string name;
    std::string thinning;          // human-readable schedule description
    double cutting_age = 0.0;
    double land_value = 0.0;
    double expected_effective_age = 0.0;
    double switch_time = 0.0;      // horizon when the schedule never thins
    bool with_risk = false;
    double inner_value = 0.0;
    double expected_basal_area = 0.0;
    double basal_area_second_moment = 0.0;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::vector<ScenarioRow> rows;
    std::vector<std::pair<double, double>> curve;  // (T, W0) of the headline run
    double mc_estimate = 0.0;
    double mc_standard_error = 0.0;
    std::vector<std::string> warnings;
};

// Runs the scenario and writes table.txt, curve.csv, trajectory.csv and
// result.json into out_dir (created if missing).
ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

std::string format_table(const ScenarioResult& result);
std::string result_to_json(const ScenarioResult& result);

}  // namespace forest
