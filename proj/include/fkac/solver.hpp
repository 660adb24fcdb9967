#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fkac/conv_quad.hpp"
#include "fkac/mesh_ops.hpp"

namespace fkac {

using SpaceFn = std::function<Complex(double)>;
using TimeFn = std::function<Complex(double)>;
using SpaceTimeFn = std::function<Complex(double, double)>;
using PotentialFn = std::function<double(double)>;

PotentialFn potential_one();
PotentialFn potential_coordinate();

/// Continuous problem data for
///   D_t^alpha [P - e^{-rho U x t} P(x,0)] = K_alpha P_xx + f on (0,l) x (0,T]
/// with P(x,0) = phi(x), P(0,t) = psi1(t), P(l,t) = psi2(t).
struct ProblemSpec {
    double alpha = 0.5;
    double K_alpha = 0.5;
    Complex rho{1.0, 0.0};
    PotentialFn U = potential_one();
    SpaceTimeFn f;
    SpaceFn phi;
    TimeFn psi1;
    TimeFn psi2;
    double l = 1.0;
    double T = 1.0;
};

/// Throws on hard violations (alpha range, K_alpha <= 0, Re(rho) <= 0,
/// negative potential at a node); returns warnings for soft ones
/// (initial/boundary compatibility beyond 1e-12).
std::vector<std::string> validate_problem(const ProblemSpec& problem, const Grid1D& grid);

/// One time-marched solve: configuration plus the full history P^0..P^N.
struct SolverRun {
    ProblemSpec problem;
    SchemeOrder q;
    Grid1D grid;
    TimeGrid tgrid;
    std::vector<GridFn> history;
    std::size_t lhs_factorizations = 0;
};

/// Configuration with history seeded at the initial slice only.
SolverRun configure_run(const ProblemSpec& problem, SchemeOrder q, int M, int N);

struct TridiagonalSystem {
    std::vector<Complex> sub;    // size n-1
    std::vector<Complex> diag;   // size n
    std::vector<Complex> super;  // size n-1
    std::vector<Complex> rhs;    // size n (may be empty for matrix-only use)
};

/// LU factors of a constant tridiagonal matrix, reusable across solves.
class TridiagonalFactor {
  public:
    explicit TridiagonalFactor(const TridiagonalSystem& sys);

    std::vector<Complex> solve(const std::vector<Complex>& rhs) const;

    int size() const { return static_cast<int>(pivot_.size()); }

  private:
    std::vector<Complex> sub_;
    std::vector<Complex> pivot_;
    std::vector<Complex> upper_;
};

/// Matrix part of the implicit step: sub = super = l_0/12 - mu,
/// diag = 10 l_0/12 + 2 mu with mu = K_alpha tau^alpha / h^2. Constant in n.
TridiagonalSystem assemble_lhs(const SolverRun& run, const WeightTable& weights);

/// Right-hand side of step n from the stored history, literal term by term:
/// initial-data sum, history sum, forcing, then the boundary lift at i = 1
/// and i = M-1. Exponentials are evaluated directly.
std::vector<Complex> assemble_rhs(const SolverRun& run, const WeightTable& weights, int n);

/// Solves the system by the Thomas algorithm (no pivoting); throws naming the
/// pivot index on a zero pivot.
std::vector<Complex> thomas_solve(const TridiagonalSystem& sys);

/// Marches the scheme over all N steps. The tridiagonal matrix is factored
/// once; per-node exponentials are maintained as running products.
SolverRun march(const ProblemSpec& problem, SchemeOrder q, int M, int N);

/// Same, reusing a precomputed weight table (must match q, alpha and cover N).
SolverRun march(const ProblemSpec& problem, SchemeOrder q, int M, int N, const WeightTable& weights);

}  // namespace fkac
