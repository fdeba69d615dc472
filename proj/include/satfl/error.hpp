#pragma once

#include <stdexcept>
#include <string>

namespace satfl {

// Argument outside the mathematical domain of an operation
// (non-positive altitude, coincident positions, empty dataset, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A scenario, configuration or schedule that cannot be run.
// The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario text that does not parse; carries the offending line.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& source, int line, const std::string& what)
        : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// Transmission requested while the link rate is zero (off-time).
class LinkUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A transmission schedule that does not fit into the contact plan.
class ScheduleError : public ValidationError {
public:
    ScheduleError(int satellite, int pass, double deficit_s)
        : ValidationError("infeasible schedule: satellite " + std::to_string(satellite) + ", pass " +
                          std::to_string(pass) + " is short by " + std::to_string(deficit_s) + " s"),
          satellite_(satellite), pass_(pass), deficit_s_(deficit_s) {}

    int satellite() const noexcept { return satellite_; }
    int pass() const noexcept { return pass_; }
    double deficit_s() const noexcept { return deficit_s_; }

private:
    int satellite_;
    int pass_;
    double deficit_s_;
};

}  // namespace satfl
