#pragma once

#include <functional>
#include <string>
#include <vector>

namespace generacci::checks {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    bool fast;  // part of --selftest
    std::function<CheckResult(unsigned jobs)> run;
};

const std::vector<Criterion>& criteria();

struct Outcome {
    int id;
    std::string title;
    bool pass;  // check passed and finished inside the budget
    double seconds;
    double budget_seconds;
    std::string detail;
};

Outcome run_criterion(const Criterion& c, unsigned jobs);

// "PASS 3 title (1.23 s / 300 s): detail"
std::string format_line(const Outcome& o);

}  // namespace generacci::checks
