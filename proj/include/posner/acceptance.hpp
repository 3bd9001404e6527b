#pragma once

#include <optional>
#include <string>
#include <vector>

namespace posner {

struct CriterionOutcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

// Runs the acceptance checks (all, or a single one). Each outcome carries a
// one-line detail string with the computed numbers.
std::vector<CriterionOutcome> run_acceptance(std::optional<int> only = std::nullopt);

}  // namespace posner
