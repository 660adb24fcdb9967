#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fkac/problems.hpp"
#include "fkac/solver.hpp"
#include "support/dense_reference.hpp"
#include "support/matchers.hpp"

using fkac::Complex;
using fkac::Grid1D;
using fkac::GridFn;
using fkac::ProblemSpec;
using fkac::SchemeOrder;
using fkac::SolverRun;
using fkac::TimeGrid;
using fkac::TridiagonalSystem;
using fkac::WeightTable;

namespace {

SolverRun bare_run(const ProblemSpec& pb, SchemeOrder q, int M, int N) {
    // Skeleton without validation, for exercising assembly in isolation.
    Grid1D grid(pb.l, M);
    TimeGrid tgrid(pb.T, N);
    SolverRun run{pb, q, grid, tgrid, {}, 0};
    run.history.push_back(GridFn::sample(grid, pb.phi));
    return run;
}

ProblemSpec plain_problem() {
    ProblemSpec pb;
    pb.alpha = 0.5;
    pb.K_alpha = 0.5;
    pb.rho = Complex{1.0, 0.0};
    pb.U = fkac::potential_one();
    pb.f = [](double, double) { return Complex{}; };
    pb.phi = [](double) { return Complex{}; };
    pb.psi1 = [](double) { return Complex{}; };
    pb.psi2 = [](double) { return Complex{}; };
    return pb;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("lhs assembly") {
    SUBCASE("mu = 0 leaves the pure compact row") {
        ProblemSpec pb = plain_problem();
        pb.K_alpha = 0.0;  // bypasses validation on purpose: matrix-only check
        const SolverRun run = bare_run(pb, SchemeOrder(1), 8, 4);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), pb.alpha, 4);
        const TridiagonalSystem sys = fkac::assemble_lhs(run, w);
        CHECK(sys.diag[0] == Complex{10.0 / 12.0, 0.0});
        CHECK(sys.sub[0] == Complex{1.0 / 12.0, 0.0});
        CHECK(sys.super[0] == Complex{1.0 / 12.0, 0.0});
    }
    SUBCASE("worked numeric entries") {
        ProblemSpec pb = plain_problem();
        pb.l = 1.0;
        pb.T = 1.0;
        const SolverRun run = bare_run(pb, SchemeOrder(1), 10, 10);  // h = 0.1, tau = 0.1
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), 0.5, 10);
        const TridiagonalSystem sys = fkac::assemble_lhs(run, w);
        const double mu = 0.5 * std::sqrt(0.1) / 0.01;
        CHECK(mu == doctest::Approx(15.8113883).epsilon(1e-8));
        CHECK(sys.diag[0].real() == doctest::Approx(10.0 / 12.0 + 2.0 * mu).epsilon(1e-12));
        CHECK(sys.diag[0].real() == doctest::Approx(32.456).epsilon(1e-4));
        CHECK(sys.sub[0].real() == doctest::Approx(1.0 / 12.0 - mu).epsilon(1e-12));
    }
    SUBCASE("q = 2 uses l_0 = sqrt(3/2)") {
        ProblemSpec pb = plain_problem();
        const SolverRun run = bare_run(pb, SchemeOrder(2), 10, 10);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(2), 0.5, 10);
        const TridiagonalSystem sys = fkac::assemble_lhs(run, w);
        const double mu = 0.5 * std::sqrt(0.1) / 0.01;
        CHECK(sys.diag[0].real() ==
              doctest::Approx(10.0 * std::sqrt(1.5) / 12.0 + 2.0 * mu).epsilon(1e-12));
    }
}

TEST_CASE("tridiagonal solves") {
    SUBCASE("identity returns the rhs") {
        TridiagonalSystem sys;
        sys.diag.assign(5, Complex{1.0, 0.0});
        sys.sub.assign(4, Complex{});
        sys.super.assign(4, Complex{});
        sys.rhs = {Complex{1, 2}, Complex{-3, 0}, Complex{0, 0.5}, Complex{4, 4}, Complex{-1, -1}};
        const auto x = fkac::thomas_solve(sys);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(x[i] == sys.rhs[i]);
        }
    }
    SUBCASE("random complex systems against dense elimination") {
        std::uint64_t state = 99;
        for (int rep = 0; rep < 25; ++rep) {
            const int n = 1 + static_cast<int>(reference::splitmix64(state) % 8);
            TridiagonalSystem sys;
            sys.diag.resize(static_cast<std::size_t>(n));
            sys.sub.resize(static_cast<std::size_t>(n) - 1);
            sys.super.resize(static_cast<std::size_t>(n) - 1);
            sys.rhs.resize(static_cast<std::size_t>(n));
            std::vector<std::vector<Complex>> dense(static_cast<std::size_t>(n),
                                                    std::vector<Complex>(static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i) {
                sys.diag[static_cast<std::size_t>(i)] =
                    reference::random_unit_complex(state) + Complex{4.0, 0.0};
                sys.rhs[static_cast<std::size_t>(i)] = reference::random_unit_complex(state);
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
                    sys.diag[static_cast<std::size_t>(i)];
            }
            for (int i = 0; i + 1 < n; ++i) {
                sys.sub[static_cast<std::size_t>(i)] = reference::random_unit_complex(state);
                sys.super[static_cast<std::size_t>(i)] = reference::random_unit_complex(state);
                dense[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(i)] =
                    sys.sub[static_cast<std::size_t>(i)];
                dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(i) + 1] =
                    sys.super[static_cast<std::size_t>(i)];
            }
            const auto fast = fkac::thomas_solve(sys);
            const auto slow = reference::dense_solve(dense, sys.rhs);
            double rhs_inf = 0.0;
            for (const Complex& r : sys.rhs) {
                rhs_inf = std::max(rhs_inf, std::abs(r));
            }
            for (int i = 0; i < n; ++i) {
                REQUIRE(std::abs(fast[static_cast<std::size_t>(i)] - slow[static_cast<std::size_t>(i)]) <
                        1e-13 * (1.0 + rhs_inf));
            }
            // residual postcondition
            for (int i = 0; i < n; ++i) {
                Complex r = sys.rhs[static_cast<std::size_t>(i)];
                for (int j = 0; j < n; ++j) {
                    r -= dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         fast[static_cast<std::size_t>(j)];
                }
                REQUIRE(std::abs(r) <= 1e-12 * (1.0 + rhs_inf));
            }
        }
    }
    SUBCASE("zero pivot reports the index") {
        TridiagonalSystem sys;
        sys.diag = {Complex{1.0, 0.0}, Complex{1.0, 0.0}};
        sys.sub = {Complex{1.0, 0.0}};
        sys.super = {Complex{1.0, 0.0}};
        sys.rhs = {Complex{1.0, 0.0}, Complex{1.0, 0.0}};
        CHECK_THROWS_WITH_AS(fkac::thomas_solve(sys),
                             "singular tridiagonal system: zero pivot at index 1", std::runtime_error);
    }
    SUBCASE("compact stencil inverse consistency") {
        // mu = 0, q = 1: the matrix is the interior compact stencil; feeding it
        // H_h(u) for zero-boundary u must return u.
        ProblemSpec pb = plain_problem();
        pb.K_alpha = 0.0;
        const int M = 12;
        const SolverRun run = bare_run(pb, SchemeOrder(1), M, 2);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), pb.alpha, 2);
        TridiagonalSystem sys = fkac::assemble_lhs(run, w);
        std::uint64_t state = 5;
        GridFn u = GridFn::zeros(run.grid);
        for (int i = 1; i < M; ++i) {
            u.v[static_cast<std::size_t>(i)] = reference::random_unit_complex(state);
        }
        const GridFn hu = fkac::compact_apply(u);
        sys.rhs.assign(hu.v.begin() + 1, hu.v.end() - 1);
        const auto x = fkac::thomas_solve(sys);
        for (int i = 1; i < M; ++i) {
            REQUIRE(std::abs(x[static_cast<std::size_t>(i) - 1] - u.v[static_cast<std::size_t>(i)]) < 1e-13);
        }
    }
}

TEST_CASE("problem validation") {
    const Grid1D grid(1.0, 4);
    SUBCASE("alpha, diffusion, rho and potential are hard errors") {
        ProblemSpec pb = plain_problem();
        pb.alpha = 1.0;
        CHECK_THROWS_AS(fkac::validate_problem(pb, grid), std::invalid_argument);
        pb = plain_problem();
        pb.K_alpha = 0.0;
        CHECK_THROWS_AS(fkac::validate_problem(pb, grid), std::invalid_argument);
        pb = plain_problem();
        pb.rho = Complex{0.0, 2.0};
        CHECK_THROWS_AS(fkac::validate_problem(pb, grid), std::invalid_argument);
        pb = plain_problem();
        pb.U = [](double x) { return x - 0.5; };
        CHECK_THROWS_AS(fkac::validate_problem(pb, grid), std::invalid_argument);
    }
    SUBCASE("incompatible corner data only warns") {
        ProblemSpec pb = plain_problem();
        pb.phi = [](double) { return Complex{1.0, 0.0}; };
        const auto warnings = fkac::validate_problem(pb, grid);
        REQUIRE(warnings.size() == 2);
        CHECK(warnings[0].find("x = 0") != std::string::npos);
    }
    SUBCASE("clean problems warn about nothing") {
        CHECK(fkac::validate_problem(plain_problem(), grid).empty());
    }
}

TEST_CASE("march on all-zero data stays identically zero") {
    const fkac::ManufacturedProblem zp = fkac::zero_problem(0.5);
    const SolverRun run = fkac::march(zp.spec, SchemeOrder(1), 16, 8);
    REQUIRE(run.history.size() == 9);
    for (const GridFn& slice : run.history) {
        for (const Complex& value : slice.v) {
            REQUIRE(value == Complex{});
        }
    }
    CHECK(fkac::max_error(run, zp) == 0.0);
}

TEST_CASE("march seeds the history with the sampled data") {
    const fkac::ManufacturedProblem mp = fkac::example1(0.3);
    const SolverRun run = fkac::march(mp.spec, SchemeOrder(1), 8, 3);
    for (int i = 0; i <= run.grid.M; ++i) {
        CHECK(run.history[0].v[static_cast<std::size_t>(i)] == mp.spec.phi(run.grid.node(i)));
    }
    for (int n = 1; n <= run.tgrid.N; ++n) {
        CHECK(run.history[static_cast<std::size_t>(n)].v.front() == mp.spec.psi1(run.tgrid.node(n)));
        CHECK(run.history[static_cast<std::size_t>(n)].v.back() == mp.spec.psi2(run.tgrid.node(n)));
    }
    CHECK(run.lhs_factorizations == 1);
}

TEST_CASE("shared weight tables must match the run") {
    const fkac::ManufacturedProblem mp = fkac::example1(0.3);
    const WeightTable wrong_alpha = fkac::fractional_power_weights(SchemeOrder(1), 0.4, 10);
    CHECK_THROWS_AS(fkac::march(mp.spec, SchemeOrder(1), 8, 4, wrong_alpha), std::invalid_argument);
    const WeightTable wrong_q = fkac::fractional_power_weights(SchemeOrder(2), 0.3, 10);
    CHECK_THROWS_AS(fkac::march(mp.spec, SchemeOrder(1), 8, 4, wrong_q), std::invalid_argument);
    const WeightTable short_table = fkac::fractional_power_weights(SchemeOrder(1), 0.3, 3);
    CHECK_THROWS_AS(fkac::march(mp.spec, SchemeOrder(1), 8, 4, short_table), std::invalid_argument);
}

TEST_CASE("rhs assembly") {
    SUBCASE("zero data gives a zero vector at n = 1") {
        const fkac::ManufacturedProblem zp = fkac::zero_problem(0.4);
        const SolverRun run = bare_run(zp.spec, SchemeOrder(1), 8, 4);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), 0.4, 4);
        for (const Complex& r : fkac::assemble_rhs(run, w, 1)) {
            CHECK(r == Complex{});
        }
    }
    SUBCASE("n = 1 collapses to the damped initial term plus forcing") {
        const fkac::ManufacturedProblem mp = fkac::example1(0.5);
        const SolverRun run = bare_run(mp.spec, SchemeOrder(1), 8, 4);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), 0.5, 4);
        const auto rhs = fkac::assemble_rhs(run, w, 1);

        const double tau = run.tgrid.tau;
        const double tau_alpha = std::pow(tau, 0.5);
        const double mu = mp.spec.K_alpha * tau_alpha / (run.grid.h * run.grid.h);
        GridFn term = GridFn::zeros(run.grid);
        for (int i = 0; i <= run.grid.M; ++i) {
            const double x = run.grid.node(i);
            term.v[static_cast<std::size_t>(i)] =
                std::exp(-mp.spec.rho * mp.spec.U(x) * tau) * w[0] * mp.spec.phi(x) +
                tau_alpha * mp.spec.f(x, tau);
        }
        const GridFn averaged = fkac::compact_apply(term);
        for (int i = 1; i < run.grid.M; ++i) {
            Complex expected = averaged.v[static_cast<std::size_t>(i)];
            if (i == 1) {
                expected -= Complex{w[0] / 12.0 - mu, 0.0} * mp.spec.psi1(tau);
            }
            if (i == run.grid.M - 1) {
                expected -= Complex{w[0] / 12.0 - mu, 0.0} * mp.spec.psi2(tau);
            }
            REQUIRE(std::abs(rhs[static_cast<std::size_t>(i) - 1] - expected) <
                    1e-13 * (1.0 + std::abs(expected)));
        }
    }
    SUBCASE("n = 2 agrees with the undistilled form that keeps both k = n terms") {
        const fkac::ManufacturedProblem mp = fkac::example1(0.5);
        const int M = 8;
        const SolverRun run = fkac::march(mp.spec, SchemeOrder(1), M, 4);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), 0.5, 4);
        const int n = 2;
        const auto rhs = fkac::assemble_rhs(run, w, n);

        const double tau = run.tgrid.tau;
        const double t_n = run.tgrid.node(n);
        const double tau_alpha = std::pow(tau, 0.5);
        const double mu = mp.spec.K_alpha * tau_alpha / (run.grid.h * run.grid.h);
        auto damp = [&](int i, int k) {
            return std::exp(-mp.spec.rho * mp.spec.U(run.grid.node(i)) * (static_cast<double>(k) * tau));
        };
        GridFn history_sum = GridFn::zeros(run.grid);
        GridFn initial_sum = GridFn::zeros(run.grid);
        GridFn forcing = GridFn::zeros(run.grid);
        for (int i = 0; i <= M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            for (int k = 1; k <= n; ++k) {
                history_sum.v[s] += damp(i, k) * w[k] * run.history[static_cast<std::size_t>(n - k)].v[s];
            }
            for (int k = 0; k <= n; ++k) {
                initial_sum.v[s] += damp(i, k) * w[k] * damp(i, n - k) * run.history[0].v[s];
            }
            forcing.v[s] = mp.spec.f(run.grid.node(i), t_n);
        }
        const GridFn h_hist = fkac::compact_apply(history_sum);
        const GridFn h_init = fkac::compact_apply(initial_sum);
        const GridFn h_forc = fkac::compact_apply(forcing);
        for (int i = 1; i < M; ++i) {
            const std::size_t s = static_cast<std::size_t>(i);
            Complex expected = -h_hist.v[s] + h_init.v[s] + tau_alpha * h_forc.v[s];
            if (i == 1) {
                expected -= Complex{w[0] / 12.0 - mu, 0.0} * mp.spec.psi1(t_n);
            }
            if (i == M - 1) {
                expected -= Complex{w[0] / 12.0 - mu, 0.0} * mp.spec.psi2(t_n);
            }
            REQUIRE(std::abs(rhs[s - 1] - expected) < 1e-12 * (1.0 + std::abs(expected)));
        }
    }
    SUBCASE("missing history is rejected") {
        const fkac::ManufacturedProblem mp = fkac::example1(0.5);
        const SolverRun run = bare_run(mp.spec, SchemeOrder(1), 8, 4);
        const WeightTable w = fkac::fractional_power_weights(SchemeOrder(1), 0.5, 4);
        CHECK_THROWS_AS(fkac::assemble_rhs(run, w, 2), std::invalid_argument);
        CHECK_THROWS_AS(fkac::assemble_rhs(run, w, 0), std::invalid_argument);
        CHECK_THROWS_AS(fkac::assemble_rhs(run, w, 5), std::invalid_argument);
    }
}

TEST_CASE("marched slices satisfy the assembled equations") {
    const fkac::ManufacturedProblem mp = fkac::example2(0.35);
    const int M = 10;
    const int N = 6;
    const SolverRun run = fkac::march(mp.spec, SchemeOrder(2), M, N);
    const WeightTable w = fkac::fractional_power_weights(SchemeOrder(2), 0.35, N);
    const TridiagonalSystem lhs = fkac::assemble_lhs(run, w);
    for (int n = 1; n <= N; ++n) {
        const auto rhs = fkac::assemble_rhs(run, w, n);
        const auto& slice = run.history[static_cast<std::size_t>(n)].v;
        for (int i = 1; i < M; ++i) {
            const std::size_t r = static_cast<std::size_t>(i) - 1;
            Complex lhs_value = lhs.diag[r] * slice[static_cast<std::size_t>(i)];
            if (i > 1) {
                lhs_value += lhs.sub[r - 1] * slice[static_cast<std::size_t>(i) - 1];
            }
            if (i < M - 1) {
                lhs_value += lhs.super[r] * slice[static_cast<std::size_t>(i) + 1];
            }
            REQUIRE(std::abs(lhs_value - rhs[r]) < 1e-12 * (1.0 + std::abs(rhs[r])));
        }
    }
}

TEST_CASE("march equals the dense brute-force formulation") {
    for (std::uint64_t seed : {11ULL, 22ULL, 33ULL, 44ULL, 55ULL, 66ULL, 77ULL, 88ULL, 99ULL, 110ULL}) {
        const reference::RandomInstance inst = reference::make_random_instance(seed);
        const SolverRun run = fkac::march(inst.problem, inst.q, inst.M, inst.N);
        const auto dense = reference::dense_reference_solve(inst.problem, inst.q, inst.M, inst.N);
        REQUIRE(run.history.size() == dense.size());
        for (std::size_t n = 0; n < dense.size(); ++n) {
            for (std::size_t i = 0; i < dense[n].v.size(); ++i) {
                CAPTURE(seed);
                CAPTURE(n);
                CAPTURE(i);
                REQUIRE(std::abs(run.history[n].v[i] - dense[n].v[i]) <= 1e-11);
            }
        }
    }
}

TEST_CASE("benchmark errors match the published first-order and coupled runs") {
    SUBCASE("U = 1 problem, q = 1, h = 1/1000, tau = 1/10, alpha = 0.5") {
        const fkac::ManufacturedProblem mp = fkac::example1(0.5);
        const SolverRun run = fkac::march(mp.spec, SchemeOrder(1), 1000, 10);
        const double err = fkac::max_error(run, mp);
        CHECK(testutil::matches_sig_digits(err, 0.0080, 2));
    }
    SUBCASE("U = x problem, q = 4, tau = h = 1/10, alpha = 0.2") {
        const fkac::ManufacturedProblem mp = fkac::example2(0.2);
        const SolverRun run = fkac::march(mp.spec, SchemeOrder(4), 10, 10);
        const double err = fkac::max_error(run, mp);
        CHECK(testutil::matches_sig_digits(err, 1.0568e-4, 3));
    }
}

TEST_CASE("perturbing the initial data stays inside the energy bound") {
    const fkac::ManufacturedProblem mp = fkac::example1(0.5);
    const int M = 20;
    const int N = 20;
    const SolverRun base = fkac::march(mp.spec, SchemeOrder(1), M, N);
    std::uint64_t state = 314;
    for (int trial = 0; trial < 2; ++trial) {
        GridFn eps = GridFn::zeros(base.grid);
        for (int i = 1; i < M; ++i) {
            eps.v[static_cast<std::size_t>(i)] = 0.01 * reference::random_unit_complex(state);
        }
        fkac::ProblemSpec perturbed = mp.spec;
        const double h = base.grid.h;
        const fkac::SpaceFn base_phi = mp.spec.phi;
        perturbed.phi = [base_phi, eps, h](double x) {
            const int i = static_cast<int>(std::llround(x / h));
            return base_phi(x) + eps.v[static_cast<std::size_t>(i)];
        };
        const SolverRun run = fkac::march(perturbed, SchemeOrder(1), M, N);
        const double bound = std::sqrt(3.0 / 8.0) * fkac::norms(eps).grad;
        for (int n = 0; n <= N; ++n) {
            double inf = 0.0;
            for (int i = 1; i < M; ++i) {
                const std::size_t s = static_cast<std::size_t>(i);
                inf = std::max(inf, std::abs(run.history[static_cast<std::size_t>(n)].v[s] -
                                             base.history[static_cast<std::size_t>(n)].v[s]));
            }
            REQUIRE(inf <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("nonzero boundary data converges at full order") {
    // The U = 1 manufactured solution restricted to (0, 0.75): psi2 != 0.
    const fkac::ManufacturedProblem base = fkac::example1(0.5);
    fkac::ManufacturedProblem trunc{base.spec, base.exact};
    trunc.spec.l = 0.75;
    const fkac::SpaceTimeFn exact = base.exact;
    trunc.spec.psi2 = [exact](double t) { return exact(0.75, t); };

    double prev_err = 0.0;
    double rate = 0.0;
    int N = 8;
    for (int M : {8, 16, 32}) {
        const SolverRun run = fkac::march(trunc.spec, SchemeOrder(2), M, N);
        const double err = fkac::max_error(run, trunc);
        if (prev_err > 0.0) {
            rate = std::log2(prev_err / err);
        }
        prev_err = err;
        N *= 4;  // tau ~ h^2 keeps the temporal error subdominant
    }
    CHECK(rate > 3.5);
    CHECK(rate < 4.5);
}

}  // TEST_SUITE
