#include "fkac/problems.hpp"

#include <cmath>
#include <numbers>

namespace fkac {

ManufacturedProblem manufactured_problem(PotentialKind kind, double alpha, Complex rho, double K_alpha,
                                         double l, double T) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("manufactured_problem: alpha must lie in (0,1)");
    }
    if (!(l > 0.0) || !(T > 0.0)) {
        throw std::invalid_argument("manufactured_problem: domain length and horizon must be positive");
    }
    const double omega = std::numbers::pi / l;
    const double gamma_ratio = std::tgamma(4.0 + alpha) / std::tgamma(4.0);

    SpaceTimeFn exact;
    SpaceTimeFn forcing;
    PotentialFn potential;
    if (kind == PotentialKind::constant_one) {
        potential = potential_one();
        exact = [rho, alpha, omega](double x, double t) {
            return std::exp(-rho * t) * (std::pow(t, 3.0 + alpha) + 1.0) * std::sin(omega * x);
        };
        forcing = [rho, alpha, omega, gamma_ratio, K_alpha](double x, double t) {
            const Complex damp = std::exp(-rho * t);
            const double s = std::sin(omega * x);
            return gamma_ratio * damp * (t * t * t) * s +
                   K_alpha * omega * omega * (std::pow(t, 3.0 + alpha) + 1.0) * damp * s;
        };
    } else {
        potential = potential_coordinate();
        exact = [rho, alpha, omega](double x, double t) {
            return std::exp(-rho * x * t) * (std::pow(t, 3.0 + alpha) + 1.0) * std::sin(omega * x);
        };
        forcing = [rho, alpha, omega, gamma_ratio, K_alpha](double x, double t) {
            const Complex damp = std::exp(-rho * x * t);
            const double s = std::sin(omega * x);
            const double c = std::cos(omega * x);
            const Complex second_derivative_part =
                rho * rho * (t * t) * s - 2.0 * omega * rho * t * c - omega * omega * s;
            return gamma_ratio * damp * (t * t * t) * s -
                   K_alpha * damp * (std::pow(t, 3.0 + alpha) + 1.0) * second_derivative_part;
        };
    }

    ProblemSpec spec;
    spec.alpha = alpha;
    spec.K_alpha = K_alpha;
    spec.rho = rho;
    spec.U = std::move(potential);
    spec.f = forcing;
    spec.phi = [exact](double x) { return exact(x, 0.0); };
    spec.psi1 = [exact](double t) { return exact(0.0, t); };
    spec.psi2 = [exact, l](double t) { return exact(l, t); };
    spec.l = l;
    spec.T = T;
    return ManufacturedProblem{std::move(spec), std::move(exact)};
}

ManufacturedProblem example1(double alpha, Complex rho, double K_alpha) {
    return manufactured_problem(PotentialKind::constant_one, alpha, rho, K_alpha, 1.0, 1.0);
}

ManufacturedProblem example2(double alpha, Complex rho, double K_alpha) {
    return manufactured_problem(PotentialKind::coordinate, alpha, rho, K_alpha, 1.0, 1.0);
}

ManufacturedProblem zero_problem(double alpha, Complex rho, double K_alpha, PotentialKind kind, double l,
                                 double T) {
    ProblemSpec spec;
    spec.alpha = alpha;
    spec.K_alpha = K_alpha;
    spec.rho = rho;
    spec.U = (kind == PotentialKind::constant_one) ? potential_one() : potential_coordinate();
    spec.f = [](double, double) { return Complex{}; };
    spec.phi = [](double) { return Complex{}; };
    spec.psi1 = [](double) { return Complex{}; };
    spec.psi2 = [](double) { return Complex{}; };
    spec.l = l;
    spec.T = T;
    return ManufacturedProblem{std::move(spec), [](double, double) { return Complex{}; }};
}

ManufacturedProblem problem_by_name(const std::string& name, double alpha) {
    if (name == "example1" || name == "1") {
        return example1(alpha);
    }
    if (name == "example2" || name == "2") {
        return example2(alpha);
    }
    throw std::invalid_argument("unknown problem name: " + name);
}

double max_error(const SolverRun& run, const ManufacturedProblem& problem) {
    if (static_cast<int>(run.history.size()) != run.tgrid.N + 1) {
        throw std::invalid_argument("max_error: run history is incomplete");
    }
    const GridFn& last = run.history.back();
    double worst = 0.0;
    for (int i = 1; i < run.grid.M; ++i) {
        const double err =
            std::abs(last.v[static_cast<std::size_t>(i)] - problem.exact(run.grid.node(i), run.tgrid.T));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace fkac
