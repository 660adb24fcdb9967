#pragma once

#include <string>

#include "fkac/solver.hpp"

namespace fkac {

/// Problem with a known exact solution, for error measurement.
struct ManufacturedProblem {
    ProblemSpec spec;
    SpaceTimeFn exact;
};

enum class PotentialKind { constant_one, coordinate };

/// Smooth manufactured family
///   P(x,t) = e^{-rho U(x) t} (t^{3+alpha} + 1) sin(pi x / l)
/// with the forcing derived in closed form. U is either 1 or x.
ManufacturedProblem manufactured_problem(PotentialKind kind, double alpha, Complex rho = {1.0, 1.0},
                                         double K_alpha = 0.5, double l = 1.0, double T = 1.0);

/// U(x) = 1 benchmark on (0,1), T = 1, K_alpha = 0.5, rho = 1+i.
ManufacturedProblem example1(double alpha, Complex rho = {1.0, 1.0}, double K_alpha = 0.5);

/// U(x) = x benchmark, same data otherwise.
ManufacturedProblem example2(double alpha, Complex rho = {1.0, 1.0}, double K_alpha = 0.5);

/// All-zero data (phi = f = psi = 0); exact solution is identically zero.
ManufacturedProblem zero_problem(double alpha, Complex rho = {1.0, 1.0}, double K_alpha = 0.5,
                                 PotentialKind kind = PotentialKind::constant_one, double l = 1.0,
                                 double T = 1.0);

/// Lookup by name: "example1" / "example2".
ManufacturedProblem problem_by_name(const std::string& name, double alpha);

/// Max interior modulus of P_i^N - exact(x_i, T) over the final time slice.
double max_error(const SolverRun& run, const ManufacturedProblem& problem);

}  // namespace fkac
