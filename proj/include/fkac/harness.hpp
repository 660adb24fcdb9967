#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fkac/problems.hpp"

namespace fkac {

enum class RefinementAxis { temporal, spatial, coupled };

std::string axis_name(RefinementAxis axis);

struct RateRow {
    double step;   // tau or h
    double error;  // max-norm error at the final time
    std::optional<double> rate;
};

/// Errors and observed orders for one refinement sequence.
struct RateTable {
    RefinementAxis axis;
    int q;
    double alpha;
    std::vector<RateRow> rows;
};

/// log(e_prev/e_cur) / log(s_prev/s_cur); supports non-dyadic step ratios.
double observed_rate(double error_prev, double error_cur, double step_prev, double step_cur);

using ProblemFactory = std::function<ManufacturedProblem(double alpha)>;

/// tau = c * h^p, snapped to an integer step count N = round(T / tau).
struct TauRule {
    double c = 1.0;
    double p = 4.0;
};

/// Nearest integer step count for a target step size; throws if the target is
/// not positive.
int steps_for(double horizon, double step_target);

/// Fixed h, refining tau over the given strictly decreasing list. One table
/// per alpha. jobs > 1 fans the (alpha, tau) runs across worker threads;
/// assembly order stays deterministic.
std::vector<RateTable> temporal_study(const ProblemFactory& factory, SchemeOrder q,
                                      const std::vector<double>& alphas, double h_fixed,
                                      const std::vector<double>& taus, int jobs = 1);

/// Refines h over the given strictly decreasing list with tau tied to h by the
/// rule. axis may be relabelled coupled (e.g. tau = h).
std::vector<RateTable> spatial_study(const ProblemFactory& factory, SchemeOrder q,
                                     const std::vector<double>& alphas, const std::vector<double>& hs,
                                     TauRule rule, RefinementAxis axis = RefinementAxis::spatial,
                                     int jobs = 1);

struct StabilityViolation {
    int trial;
    int n;
    double ratio;
};

struct StabilityReport {
    double bound_constant;  // sqrt(3 l / 8)
    double worst_ratio;     // max over trials and time levels of ||eps^n||_inf / (bound * ||delta_x eps^0||)
    int trials;
    std::vector<StabilityViolation> violations;

    bool pass() const { return violations.empty(); }
};

/// Perturbs the initial data by random zero-boundary noise, reruns the q = 1
/// march and checks ||eps^n||_inf <= sqrt(3 l / 8) ||delta_x eps^0|| at every
/// time level. Requires U == 1 at every node. Trials are seeded per index.
StabilityReport stability_study(const ProblemFactory& factory, double alpha, int M, int N,
                                double perturbation_scale, int trials, std::uint64_t seed);

/// CSV with header axis,q,alpha,step,error,rate; errors in scientific
/// notation with 5 significant digits, rates with 4 decimals, first rate
/// blank. Steps and alphas print in shortest exact form.
std::string format_csv(const std::vector<RateTable>& tables);

/// Writes format_csv output via a temporary file and rename, so failures
/// leave no partial file.
void emit_csv(const std::vector<RateTable>& tables, const std::string& path);

/// Human-readable fixed-width rendering for the terminal.
std::string format_table(const RateTable& table);

}  // namespace fkac
