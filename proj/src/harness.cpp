#include "fkac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace fkac {

namespace {

void require_strictly_decreasing(const std::vector<double>& steps, const char* what) {
    if (steps.empty()) {
        throw std::invalid_argument(std::string(what) + " list must not be empty");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (!(steps[i] < steps[i - 1])) {
            throw std::invalid_argument(std::string(what) + " list must be strictly decreasing");
        }
    }
}

int cells_for(double length, double h) {
    const double ratio = length / h;
    const int M = static_cast<int>(std::llround(ratio));
    if (M < 2 || std::abs(ratio - M) > 1e-6 * std::max(1.0, ratio)) {
        throw std::invalid_argument("grid size h does not tile the domain");
    }
    return M;
}

void for_each_index(int count, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const int width = std::min(jobs, count);
    pool.reserve(static_cast<std::size_t>(width));
    for (int t = 0; t < width; ++t) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

struct RunPlan {
    std::size_t alpha_index;
    std::size_t step_index;
    double step;  // table step column (tau or h)
    int M;
    int N;
};

std::vector<RateTable> run_plans(const ProblemFactory& factory, SchemeOrder q,
                                 const std::vector<double>& alphas, const std::vector<RunPlan>& plans,
                                 RefinementAxis axis, std::size_t steps_per_alpha, int jobs) {
    std::vector<std::vector<double>> errors(alphas.size(), std::vector<double>(steps_per_alpha, 0.0));
    for_each_index(static_cast<int>(plans.size()), jobs, [&](int idx) {
        const RunPlan& plan = plans[static_cast<std::size_t>(idx)];
        const ManufacturedProblem problem = factory(alphas[plan.alpha_index]);
        const SolverRun run = march(problem.spec, q, plan.M, plan.N);
        errors[plan.alpha_index][plan.step_index] = max_error(run, problem);
    });
    std::vector<RateTable> tables;
    tables.reserve(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        RateTable table{axis, q.q, alphas[a], {}};
        for (std::size_t s = 0; s < steps_per_alpha; ++s) {
            const RunPlan& plan = plans[a * steps_per_alpha + s];
            RateRow row{plan.step, errors[a][s], std::nullopt};
            if (s > 0) {
                row.rate = observed_rate(errors[a][s - 1], errors[a][s], plans[a * steps_per_alpha + s - 1].step,
                                         plan.step);
            }
            table.rows.push_back(row);
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

void append_shortest(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

}  // namespace

std::string axis_name(RefinementAxis axis) {
    switch (axis) {
        case RefinementAxis::temporal: return "temporal";
        case RefinementAxis::spatial: return "spatial";
        case RefinementAxis::coupled: return "coupled";
    }
    return "?";
}

double observed_rate(double error_prev, double error_cur, double step_prev, double step_cur) {
    return std::log(error_prev / error_cur) / std::log(step_prev / step_cur);
}

int steps_for(double horizon, double step_target) {
    if (!(step_target > 0.0)) {
        throw std::invalid_argument("steps_for: step target must be positive");
    }
    const long long n = std::llround(horizon / step_target);
    return static_cast<int>(std::max(1LL, n));
}

std::vector<RateTable> temporal_study(const ProblemFactory& factory, SchemeOrder q,
                                      const std::vector<double>& alphas, double h_fixed,
                                      const std::vector<double>& taus, int jobs) {
    require_strictly_decreasing(taus, "tau");
    if (alphas.empty()) {
        throw std::invalid_argument("alpha list must not be empty");
    }
    std::vector<RunPlan> plans;
    plans.reserve(alphas.size() * taus.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const ManufacturedProblem probe = factory(alphas[a]);
        const int M = cells_for(probe.spec.l, h_fixed);
        for (std::size_t s = 0; s < taus.size(); ++s) {
            const double ratio = probe.spec.T / taus[s];
            const int N = static_cast<int>(std::llround(ratio));
            if (N < 1 || std::abs(ratio - N) > 1e-6 * std::max(1.0, ratio)) {
                throw std::invalid_argument("time step does not divide the horizon");
            }
            plans.push_back(RunPlan{a, s, taus[s], M, N});
        }
    }
    return run_plans(factory, q, alphas, plans, RefinementAxis::temporal, taus.size(), jobs);
}

std::vector<RateTable> spatial_study(const ProblemFactory& factory, SchemeOrder q,
                                     const std::vector<double>& alphas, const std::vector<double>& hs,
                                     TauRule rule, RefinementAxis axis, int jobs) {
    require_strictly_decreasing(hs, "h");
    if (alphas.empty()) {
        throw std::invalid_argument("alpha list must not be empty");
    }
    if (!(rule.c > 0.0)) {
        throw std::invalid_argument("tau rule constant must be positive");
    }
    std::vector<RunPlan> plans;
    plans.reserve(alphas.size() * hs.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const ManufacturedProblem probe = factory(alphas[a]);
        for (std::size_t s = 0; s < hs.size(); ++s) {
            const int M = cells_for(probe.spec.l, hs[s]);
            const int N = steps_for(probe.spec.T, rule.c * std::pow(hs[s], rule.p));
            plans.push_back(RunPlan{a, s, hs[s], M, N});
        }
    }
    return run_plans(factory, q, alphas, plans, axis, hs.size(), jobs);
}

namespace {

double canonical_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

StabilityReport stability_study(const ProblemFactory& factory, double alpha, int M, int N,
                                double perturbation_scale, int trials, std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("stability_study: at least one trial required");
    }
    const ManufacturedProblem base_problem = factory(alpha);
    const Grid1D grid(base_problem.spec.l, M);
    for (int i = 0; i <= M; ++i) {
        if (base_problem.spec.U(grid.node(i)) != 1.0) {
            throw std::invalid_argument("stability_study: requires U == 1 on the grid");
        }
    }
    const SchemeOrder q(1);
    const SolverRun base = march(base_problem.spec, q, M, N);
    const double bound_constant = std::sqrt(3.0 * base_problem.spec.l / 8.0);

    StabilityReport report{bound_constant, 0.0, trials, {}};
    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
        auto next_bits = [&state]() {
            // splitmix64: deterministic across standard libraries
            state += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = state;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        GridFn eps = GridFn::zeros(grid);
        for (int i = 1; i < M; ++i) {
            const double r = perturbation_scale * std::sqrt(canonical_double(next_bits()));
            const double theta = 2.0 * std::numbers::pi * canonical_double(next_bits());
            eps.v[static_cast<std::size_t>(i)] = Complex{r * std::cos(theta), r * std::sin(theta)};
        }
        const double bound = bound_constant * norms(eps).grad;

        ProblemSpec perturbed = base_problem.spec;
        const SpaceFn base_phi = base_problem.spec.phi;
        const double h = grid.h;
        perturbed.phi = [base_phi, eps, h](double x) {
            const int i = static_cast<int>(std::llround(x / h));
            return base_phi(x) + eps.v[static_cast<std::size_t>(i)];
        };
        const SolverRun run = march(perturbed, q, M, N);

        for (int n = 0; n <= N; ++n) {
            double inf = 0.0;
            for (int i = 1; i < M; ++i) {
                const std::size_t s = static_cast<std::size_t>(i);
                inf = std::max(inf,
                               std::abs(run.history[static_cast<std::size_t>(n)].v[s] -
                                        base.history[static_cast<std::size_t>(n)].v[s]));
            }
            double ratio = 0.0;
            if (bound > 0.0) {
                ratio = inf / bound;
            } else if (inf > 0.0) {
                ratio = std::numeric_limits<double>::infinity();
            }
            report.worst_ratio = std::max(report.worst_ratio, ratio);
            if (ratio > 1.0 + 1e-12) {
                report.violations.push_back(StabilityViolation{trial, n, ratio});
            }
        }
    }
    return report;
}

std::string format_csv(const std::vector<RateTable>& tables) {
    std::string out = "axis,q,alpha,step,error,rate\n";
    char buf[64];
    for (const RateTable& table : tables) {
        for (const RateRow& row : table.rows) {
            out += axis_name(table.axis);
            out += ',';
            out += std::to_string(table.q);
            out += ',';
            append_shortest(out, table.alpha);
            out += ',';
            append_shortest(out, row.step);
            out += ',';
            std::snprintf(buf, sizeof(buf), "%.4e", row.error);
            out += buf;
            out += ',';
            if (row.rate) {
                std::snprintf(buf, sizeof(buf), "%.4f", *row.rate);
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

void emit_csv(const std::vector<RateTable>& tables, const std::string& path) {
    const std::string payload = format_csv(tables);
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("emit_csv: cannot open " + tmp.string() + " for writing");
        }
        out << payload;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("emit_csv: write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("emit_csv: cannot move output into place at " + target.string());
    }
}

std::string format_table(const RateTable& table) {
    std::string out =
        "axis=" + axis_name(table.axis) + " q=" + std::to_string(table.q) + " alpha=";
    append_shortest(out, table.alpha);
    out += "\n";
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%14s %14s %10s\n", "step", "error", "rate");
    out += buf;
    for (const RateRow& row : table.rows) {
        std::string step;
        append_shortest(step, row.step);
        if (row.rate) {
            std::snprintf(buf, sizeof(buf), "%14s %14.4e %10.4f\n", step.c_str(), row.error, *row.rate);
        } else {
            std::snprintf(buf, sizeof(buf), "%14s %14.4e %10s\n", step.c_str(), row.error, "-");
        }
        out += buf;
    }
    return out;
}

}  // namespace fkac
