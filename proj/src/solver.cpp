#include "fkac/solver.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace fkac {

PotentialFn potential_one() {
    return [](double) { return 1.0; };
}

PotentialFn potential_coordinate() {
    return [](double x) { return x; };
}

std::vector<std::string> validate_problem(const ProblemSpec& problem, const Grid1D& grid) {
    if (!(problem.alpha > 0.0) || !(problem.alpha < 1.0)) {
        throw std::invalid_argument("ProblemSpec: alpha must lie in (0,1)");
    }
    if (!(problem.K_alpha > 0.0)) {
        throw std::invalid_argument("ProblemSpec: diffusion coefficient must be positive");
    }
    if (!(problem.rho.real() > 0.0)) {
        throw std::invalid_argument("ProblemSpec: Re(rho) must be positive");
    }
    for (int i = 0; i <= grid.M; ++i) {
        if (problem.U(grid.node(i)) < 0.0) {
            throw std::invalid_argument("ProblemSpec: potential is negative at node " + std::to_string(i));
        }
    }
    std::vector<std::string> warnings;
    const double tol = 1e-12;
    const Complex left_gap = problem.phi(0.0) - problem.psi1(0.0);
    if (std::abs(left_gap) > tol * (1.0 + std::abs(problem.phi(0.0)))) {
        warnings.push_back("initial/boundary data incompatible at x = 0: |phi(0) - psi1(0)| = " +
                           std::to_string(std::abs(left_gap)));
    }
    const Complex right_gap = problem.phi(problem.l) - problem.psi2(0.0);
    if (std::abs(right_gap) > tol * (1.0 + std::abs(problem.phi(problem.l)))) {
        warnings.push_back("initial/boundary data incompatible at x = l: |phi(l) - psi2(0)| = " +
                           std::to_string(std::abs(right_gap)));
    }
    return warnings;
}

SolverRun configure_run(const ProblemSpec& problem, SchemeOrder q, int M, int N) {
    Grid1D grid(problem.l, M);
    TimeGrid tgrid(problem.T, N);
    for (const std::string& w : validate_problem(problem, grid)) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    SolverRun run{problem, q, grid, tgrid, {}, 0};
    run.history.reserve(static_cast<std::size_t>(N) + 1);
    run.history.push_back(GridFn::sample(grid, problem.phi));
    return run;
}

TridiagonalFactor::TridiagonalFactor(const TridiagonalSystem& sys) {
    const std::size_t n = sys.diag.size();
    if (n == 0 || sys.sub.size() + 1 != n || sys.super.size() + 1 != n) {
        throw std::invalid_argument("TridiagonalFactor: inconsistent band sizes");
    }
    sub_ = sys.sub;
    pivot_.resize(n);
    upper_.resize(n > 0 ? n - 1 : 0);
    Complex d = sys.diag[0];
    for (std::size_t i = 0;; ++i) {
        if (std::abs(d) < 1e-300) {
            throw std::runtime_error("singular tridiagonal system: zero pivot at index " + std::to_string(i));
        }
        pivot_[i] = d;
        if (i + 1 == n) {
            break;
        }
        upper_[i] = sys.super[i] / d;
        d = sys.diag[i + 1] - sys.sub[i] * upper_[i];
    }
}

std::vector<Complex> TridiagonalFactor::solve(const std::vector<Complex>& rhs) const {
    const std::size_t n = pivot_.size();
    if (rhs.size() != n) {
        throw std::invalid_argument("TridiagonalFactor::solve: rhs size mismatch");
    }
    std::vector<Complex> x(n);
    x[0] = rhs[0] / pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
        x[i] = (rhs[i] - sub_[i - 1] * x[i - 1]) / pivot_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= upper_[i] * x[i + 1];
    }
    return x;
}

TridiagonalSystem assemble_lhs(const SolverRun& run, const WeightTable& weights) {
    const int interior = run.grid.M - 1;
    const double l0 = weights[0];
    const double mu = run.problem.K_alpha * std::pow(run.tgrid.tau, run.problem.alpha) / (run.grid.h * run.grid.h);
    const Complex off{l0 / 12.0 - mu, 0.0};
    const Complex diag{10.0 * l0 / 12.0 + 2.0 * mu, 0.0};
    TridiagonalSystem sys;
    sys.sub.assign(static_cast<std::size_t>(interior) - 1, off);
    sys.super = sys.sub;
    sys.diag.assign(static_cast<std::size_t>(interior), diag);
    return sys;
}

std::vector<Complex> assemble_rhs(const SolverRun& run, const WeightTable& weights, int n) {
    if (n < 1 || n > run.tgrid.N) {
        throw std::invalid_argument("assemble_rhs: step index out of range");
    }
    if (static_cast<int>(run.history.size()) < n) {
        throw std::invalid_argument("assemble_rhs: history not populated up to step " + std::to_string(n - 1));
    }
    const Grid1D& grid = run.grid;
    const int M = grid.M;
    const double tau = run.tgrid.tau;
    const double tau_alpha = std::pow(tau, run.problem.alpha);
    const Complex rho = run.problem.rho;

    std::vector<double> U(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i <= M; ++i) {
        U[static_cast<std::size_t>(i)] = run.problem.U(grid.node(i));
    }
    const GridFn& initial = run.history.front();

    std::vector<Complex> acc(static_cast<std::size_t>(M) - 1);
    GridFn term = GridFn::zeros(grid);
    auto accumulate = [&](double sign) {
        const GridFn averaged = compact_apply(term);
        for (int i = 1; i < M; ++i) {
            acc[static_cast<std::size_t>(i) - 1] += sign * averaged.v[static_cast<std::size_t>(i)];
        }
    };

    // sum_{k=0}^{n-1} H_h( d_k e^{-rho U (n-k) tau} P^0 )
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i <= M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            const Complex damp_k = std::exp(-rho * U[s] * (static_cast<double>(k) * tau));
            const Complex damp_rest = std::exp(-rho * U[s] * (static_cast<double>(n - k) * tau));
            term.v[s] = damp_k * weights[k] * damp_rest * initial.v[s];
        }
        accumulate(1.0);
    }
    // - sum_{k=1}^{n-1} H_h( d_k P^{n-k} )
    for (int k = 1; k < n; ++k) {
        const GridFn& past = run.history[static_cast<std::size_t>(n - k)];
        for (int i = 0; i <= M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            const Complex damp_k = std::exp(-rho * U[s] * (static_cast<double>(k) * tau));
            term.v[s] = damp_k * weights[k] * past.v[s];
        }
        accumulate(-1.0);
    }
    // tau^alpha H_h f^n
    const double t_n = run.tgrid.node(n);
    for (int i = 0; i <= M; ++i) {
        term.v[static_cast<std::size_t>(i)] = tau_alpha * run.problem.f(grid.node(i), t_n);
    }
    accumulate(1.0);

    // Move the known boundary unknowns out of the stencil.
    const double mu = run.problem.K_alpha * tau_alpha / (grid.h * grid.h);
    const Complex off{weights[0] / 12.0 - mu, 0.0};
    acc.front() -= off * run.problem.psi1(t_n);
    acc.back() -= off * run.problem.psi2(t_n);
    return acc;
}

std::vector<Complex> thomas_solve(const TridiagonalSystem& sys) {
    return TridiagonalFactor(sys).solve(sys.rhs);
}

namespace {

/// Rows of e^{-rho U_i k tau}, grown one step at a time as running products
/// and refreshed from a direct exponential every kExpRefreshInterval rows.
class DampingTable {
  public:
    DampingTable(Complex rho, const std::vector<double>& U, double tau) : rho_(rho), tau_(tau) {
        const std::size_t width = U.size();
        step_.resize(width);
        exponent_.resize(width);
        for (std::size_t i = 0; i < width; ++i) {
            exponent_[i] = -rho_ * U[i] * tau_;
            step_[i] = std::exp(exponent_[i]);
        }
        rows_.emplace_back(width, Complex{1.0, 0.0});
    }

    const std::vector<Complex>& row(int k) const { return rows_[static_cast<std::size_t>(k)]; }

    void extend_to(int k) {
        while (static_cast<int>(rows_.size()) <= k) {
            const int next = static_cast<int>(rows_.size());
            const std::vector<Complex>& prev = rows_.back();
            std::vector<Complex> fresh(prev.size());
            if (next % kExpRefreshInterval == 0) {
                for (std::size_t i = 0; i < fresh.size(); ++i) {
                    fresh[i] = std::exp(exponent_[i] * static_cast<double>(next));
                }
            } else {
                for (std::size_t i = 0; i < fresh.size(); ++i) {
                    fresh[i] = prev[i] * step_[i];
                }
            }
            rows_.push_back(std::move(fresh));
        }
    }

  private:
    Complex rho_;
    double tau_;
    std::vector<Complex> step_;
    std::vector<Complex> exponent_;
    std::vector<std::vector<Complex>> rows_;
};

}  // namespace

SolverRun march(const ProblemSpec& problem, SchemeOrder q, int M, int N) {
    const WeightTable weights = fractional_power_weights(q, problem.alpha, N);
    return march(problem, q, M, N, weights);
}

SolverRun march(const ProblemSpec& problem, SchemeOrder q, int M, int N, const WeightTable& weights) {
    if (weights.q.q != q.q || weights.alpha != problem.alpha) {
        throw std::invalid_argument("march: weight table does not match (q, alpha)");
    }
    if (weights.count() < N) {
        throw std::invalid_argument("march: weight table shorter than the run");
    }
    SolverRun run = configure_run(problem, q, M, N);
    const Grid1D& grid = run.grid;
    const double tau = run.tgrid.tau;
    const double tau_alpha = std::pow(tau, problem.alpha);
    const int interior = M - 1;

    std::vector<double> U(static_cast<std::size_t>(M) + 1);
    std::vector<double> x(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i <= M; ++i) {
        x[static_cast<std::size_t>(i)] = grid.node(i);
        U[static_cast<std::size_t>(i)] = problem.U(x[static_cast<std::size_t>(i)]);
    }

    TridiagonalSystem lhs = assemble_lhs(run, weights);
    TridiagonalFactor factor(lhs);
    run.lhs_factorizations = 1;
    const double mu = problem.K_alpha * tau_alpha / (grid.h * grid.h);
    const Complex off{weights[0] / 12.0 - mu, 0.0};

    DampingTable damping(problem.rho, U, tau);
    const std::vector<Complex>& phi = run.history.front().v;

    std::vector<Complex> g(static_cast<std::size_t>(M) + 1);
    std::vector<Complex> rhs(static_cast<std::size_t>(interior));
    double weight_prefix = 0.0;  // sum_{k=0}^{n-1} l_k, updated per step

    for (int n = 1; n <= N; ++n) {
        damping.extend_to(n);
        weight_prefix += weights[n - 1];
        const double t_n = run.tgrid.node(n);

        // Initial-data sum collapses to e^{-rho U n tau} (sum_{k<n} l_k) phi.
        const std::vector<Complex>& full_damp = damping.row(n);
        for (int i = 0; i <= M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            g[s] = full_damp[s] * weight_prefix * phi[s] + tau_alpha * problem.f(x[s], t_n);
        }
        for (int k = 1; k < n; ++k) {
            const double lk = weights[k];
            const std::vector<Complex>& damp = damping.row(k);
            const std::vector<Complex>& past = run.history[static_cast<std::size_t>(n - k)].v;
            for (int i = 0; i <= M; ++i) {
                const std::size_t s = static_cast<std::size_t>(i);
                g[s] -= lk * damp[s] * past[s];
            }
        }
        for (int i = 1; i < M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            rhs[s - 1] = (g[s + 1] + 10.0 * g[s] + g[s - 1]) / 12.0;
        }
        const Complex left = problem.psi1(t_n);
        const Complex right = problem.psi2(t_n);
        rhs.front() -= off * left;
        rhs.back() -= off * right;

        std::vector<Complex> solution = factor.solve(rhs);
        GridFn slice = GridFn::zeros(grid);
        slice.v.front() = left;
        slice.v.back() = right;
        for (int i = 1; i < M; ++i) {
            slice.v[static_cast<std::size_t>(i)] = solution[static_cast<std::size_t>(i) - 1];
        }
        run.history.push_back(std::move(slice));
    }
    return run;
}

}  // namespace fkac
