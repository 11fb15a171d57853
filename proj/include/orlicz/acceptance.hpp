#pragma once

// The ten acceptance criteria with their pinned tolerances and time budgets.

#include <functional>
#include <string>
#include <vector>

namespace orlicz {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    bool within_budget = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string detail;
    [[nodiscard]] bool ok() const { return passed && within_budget; }
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    /// Returns pass/fail and fills a one-line detail.
    std::function<bool(std::string&)> body;
};

const std::vector<Criterion>& acceptance_criteria();

CriterionResult run_criterion(const Criterion& criterion);
std::vector<CriterionResult> run_acceptance();

/// "PASS [3] name (1.23 s / 10 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace orlicz
