#pragma once

#include <optional>
#include <string>
#include <vector>

namespace posner {

struct ResultRow {
    std::string name;
    double value;
    std::optional<double> paper_target;
    std::optional<double> tolerance;
    std::optional<bool> pass;
};

struct ExperimentResult {
    std::string experiment;
    std::string params_json;  // canonical (sorted keys)
    std::vector<ResultRow> rows;
    std::optional<std::uint64_t> seed;

    bool all_pass() const;
    std::string to_json() const;  // canonical
    std::string to_csv() const;
};

// Runs a named experiment from a JSON config {experiment, params?, seed?}.
// Unknown experiment names are rejected; stochastic experiments require a seed.
ExperimentResult run_experiment(const std::string& config_json);

std::vector<std::string> experiment_names();

}  // namespace posner
