#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fkac/harness.hpp"

namespace fkac {

enum class Command { coeffs, solve, converge, stability };

/// Fully validated CLI configuration; every numeric range is checked before
/// any run starts.
struct RunConfig {
    Command command = Command::converge;

    std::string example = "1";          // built-in problem name
    std::string problem_file;           // key=value problem description
    int q = 1;
    std::vector<double> alphas{0.5};    // converge
    double alpha = 0.5;                 // coeffs / solve / stability
    std::optional<Complex> rho;         // overrides the problem's rho

    // converge
    RefinementAxis axis = RefinementAxis::temporal;
    double h_fixed = 1.0 / 1000.0;
    std::vector<double> taus{0.1};
    std::vector<double> hs;
    TauRule tau_rule;
    bool split_output = false;
    int jobs = 1;

    // solve
    int M = 1000;
    int N = 10;

    // coeffs
    int count = 16;

    // stability
    int trials = 20;
    double perturbation_scale = 0.01;
    std::uint64_t seed = 12345;

    std::string output;
};

/// Thrown for --help / --version; carries the text to print on stdout.
struct CliHelp {
    std::string text;
};

/// Thrown for malformed or inconsistent flags; exit code 2.
struct CliUsageError {
    std::string message;
};

/// Parses and validates argv (program name excluded). Throws CliHelp or
/// CliUsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Executes a validated configuration; returns the process exit status.
int run(const RunConfig& config);

/// Intermediate form of a key=value problem file.
struct ProblemFileSpec {
    std::string family;  // example1 | example2 | zero
    double alpha = 0.5;
    Complex rho{1.0, 1.0};
    double K_alpha = 0.5;
    PotentialKind potential = PotentialKind::constant_one;
    double l = 1.0;
    double T = 1.0;

    ManufacturedProblem to_problem() const;
    ManufacturedProblem with_alpha(double a) const;
};

ProblemFileSpec parse_problem_file(const std::string& path);

/// Entry point used by the binary: full parse/dispatch with diagnostics.
int run_cli(int argc, const char* const* argv);

}  // namespace fkac
