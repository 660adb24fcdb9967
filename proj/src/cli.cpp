#include "fkac/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fkac/parse.hpp"

namespace fkac {

namespace {

void append_shortest(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty()) {
        return path;
    }
    const std::filesystem::path p(path);
    if (p.is_absolute()) {
        return path;
    }
    if (const char* dir = std::getenv("FEYNKAC_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        return (std::filesystem::path(dir) / p).string();
    }
    return path;
}

void atomic_write_text(const std::string& path, const std::string& payload) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << payload;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + target.string());
    }
}

double checked_alpha(double a, const std::string& flag) {
    if (!(a > 0.0) || !(a < 1.0)) {
        throw CliUsageError{flag + ": alpha must lie in (0,1), got " + std::to_string(a)};
    }
    return a;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    return s.substr(b, e - b + 1);
}

}  // namespace

ManufacturedProblem ProblemFileSpec::with_alpha(double a) const {
    if (family == "zero") {
        return zero_problem(a, rho, K_alpha, potential, l, T);
    }
    if (family == "example1") {
        return example1(a, rho, K_alpha);
    }
    if (family == "example2") {
        return example2(a, rho, K_alpha);
    }
    throw std::invalid_argument("unknown problem family: " + family);
}

ManufacturedProblem ProblemFileSpec::to_problem() const { return with_alpha(alpha); }

ProblemFileSpec parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open problem file: " + path);
    }
    ProblemFileSpec spec;
    bool family_seen = false;
    bool potential_seen = false;
    bool domain_seen = false;
    bool horizon_seen = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "family") {
                if (value != "example1" && value != "example2" && value != "zero") {
                    throw std::invalid_argument("family must be example1, example2 or zero");
                }
                spec.family = value;
                family_seen = true;
            } else if (key == "alpha") {
                spec.alpha = parse_fraction(value).value();
            } else if (key == "rho") {
                spec.rho = parse_complex(value);
            } else if (key == "K_alpha") {
                spec.K_alpha = parse_fraction(value).value();
            } else if (key == "U") {
                if (value == "one") {
                    spec.potential = PotentialKind::constant_one;
                } else if (value == "x") {
                    spec.potential = PotentialKind::coordinate;
                } else {
                    throw std::invalid_argument("U must be 'one' or 'x'");
                }
                potential_seen = true;
            } else if (key == "l") {
                spec.l = parse_fraction(value).value();
                domain_seen = true;
            } else if (key == "T") {
                spec.T = parse_fraction(value).value();
                horizon_seen = true;
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!family_seen) {
        throw std::runtime_error(path + ": missing required key 'family'");
    }
    if (spec.family != "zero" && (potential_seen || domain_seen || horizon_seen)) {
        throw std::runtime_error(path + ": keys U, l, T apply to the zero family only");
    }
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0)) {
        throw std::runtime_error(path + ": alpha must lie in (0,1)");
    }
    return spec;
}

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"feynkac: compact-difference solver for the backward fractional Feynman-Kac equation"};
    app.require_subcommand(1);
    // frees the short name so converge can use --h for the spatial step
    app.set_help_flag("--help", "print this help message and exit");

    RunConfig cfg;
    std::string rho_text;
    std::string h_text = "1/1000";
    std::string taus_text = "1/10";
    std::string hs_text;
    std::string alphas_text = "0.5";
    std::string axis_text = "temporal";
    std::string c_text = "1";
    double p_value = 0.0;
    bool p_given = false;

    CLI::App* coeffs = app.add_subcommand("coeffs", "Dump convolution weights l_k as CSV");
    coeffs->add_option("--q", cfg.q, "temporal order, 1..4")->capture_default_str();
    coeffs->add_option("--alpha", cfg.alpha, "fractional order, in (0,1)")->capture_default_str();
    coeffs->add_option("--count", cfg.count, "highest weight index K")->capture_default_str();
    coeffs->add_option("--output", cfg.output, "CSV destination (default: stdout)");

    CLI::App* solve = app.add_subcommand("solve", "Run one march and report errors");
    solve->add_option("--example", cfg.example, "built-in problem, 1 or 2")->capture_default_str();
    solve->add_option("--problem", cfg.problem_file, "key=value problem file");
    solve->add_option("--q", cfg.q, "temporal order, 1..4")->capture_default_str();
    auto* solve_alpha = solve->add_option("--alpha", cfg.alpha, "fractional order, in (0,1)");
    solve_alpha->capture_default_str();
    solve->add_option("--M", cfg.M, "spatial cells (h = l/M)")->capture_default_str();
    solve->add_option("--N", cfg.N, "time steps (tau = T/N)")->capture_default_str();
    auto* solve_rho = solve->add_option("--rho", rho_text, "absorption parameter, a+bi (default: problem's)");
    solve->add_option("--output", cfg.output, "final-slice CSV destination");

    CLI::App* converge = app.add_subcommand("converge", "Refinement study and rate table");
    converge->set_help_flag("--help", "print this help message and exit");
    converge->add_option("--example", cfg.example, "built-in problem, 1 or 2")->capture_default_str();
    converge->add_option("--problem", cfg.problem_file, "key=value problem file");
    converge->add_option("--q", cfg.q, "temporal order, 1..4")->capture_default_str();
    converge->add_option("--axis", axis_text, "temporal | spatial | coupled")->capture_default_str();
    converge->add_option("--alphas", alphas_text, "comma list of fractional orders")->capture_default_str();
    converge->add_option("--h", h_text, "fixed spatial step for temporal studies (fraction ok)")
        ->capture_default_str();
    auto* taus_opt =
        converge->add_option("--taus", taus_text, "temporal steps, decreasing (fractions ok)");
    taus_opt->capture_default_str();
    auto* hs_opt = converge->add_option("--hs", hs_text, "spatial steps, decreasing (fractions ok)");
    auto* p_opt = converge->add_option("--p", p_value, "tau = c*h^p exponent (default 4/q; 1 for coupled)");
    converge->add_option("--c", c_text, "tau = c*h^p constant")->capture_default_str();
    converge->add_option("--jobs", cfg.jobs, "worker threads for independent runs")->capture_default_str();
    converge->add_flag("--split", cfg.split_output, "one CSV per (q, axis, alpha) table");
    converge->add_option("--output", cfg.output, "CSV destination");

    CLI::App* stability = app.add_subcommand("stability", "Random-perturbation stability experiment");
    stability->add_option("--alpha", cfg.alpha, "fractional order, in (0,1)")->capture_default_str();
    auto* stab_M = stability->add_option("--M", cfg.M, "spatial cells")->default_str("50");
    auto* stab_N = stability->add_option("--N", cfg.N, "time steps")->default_str("100");
    stability->add_option("--trials", cfg.trials, "number of random perturbations")->capture_default_str();
    stability->add_option("--scale", cfg.perturbation_scale, "perturbation disk radius")
        ->capture_default_str();
    stability->add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        throw CliHelp{app.help()};
    } catch (const CLI::ParseError& e) {
        throw CliUsageError{e.what()};
    }

    try {
        if (coeffs->parsed()) {
            cfg.command = Command::coeffs;
            static_cast<void>(SchemeOrder(cfg.q));
            if (!(cfg.alpha > 0.0) || cfg.alpha > 1.0) {
                throw CliUsageError{"--alpha: must lie in (0,1] for coeffs"};
            }
            if (cfg.count < 0) {
                throw CliUsageError{"--count: must be non-negative"};
            }
        } else if (solve->parsed()) {
            cfg.command = Command::solve;
            static_cast<void>(SchemeOrder(cfg.q));
            checked_alpha(cfg.alpha, "--alpha");
            if (cfg.M < 2) {
                throw CliUsageError{"--M: at least 2 cells required"};
            }
            if (cfg.N < 1) {
                throw CliUsageError{"--N: at least 1 step required"};
            }
            if (!cfg.problem_file.empty() && (solve_alpha->count() > 0 || solve_rho->count() > 0)) {
                throw CliUsageError{"--alpha/--rho conflict with --problem (both come from the file)"};
            }
            if (solve_rho->count() > 0) {
                cfg.rho = parse_complex(rho_text);
                if (!(cfg.rho->real() > 0.0)) {
                    throw CliUsageError{"--rho: Re(rho) must be positive"};
                }
            }
        } else if (converge->parsed()) {
            cfg.command = Command::converge;
            static_cast<void>(SchemeOrder(cfg.q));
            cfg.alphas = parse_number_list(alphas_text);
            for (double a : cfg.alphas) {
                checked_alpha(a, "--alphas");
            }
            if (axis_text == "temporal") {
                cfg.axis = RefinementAxis::temporal;
            } else if (axis_text == "spatial") {
                cfg.axis = RefinementAxis::spatial;
            } else if (axis_text == "coupled") {
                cfg.axis = RefinementAxis::coupled;
            } else {
                throw CliUsageError{"--axis: expected temporal, spatial or coupled"};
            }
            p_given = p_opt->count() > 0;
            if (cfg.axis == RefinementAxis::temporal) {
                if (hs_opt->count() > 0 || p_given) {
                    throw CliUsageError{"--hs/--p belong to spatial or coupled studies, not --axis temporal"};
                }
                cfg.h_fixed = parse_fraction(h_text).value();
                if (!(cfg.h_fixed > 0.0)) {
                    throw CliUsageError{"--h: must be positive"};
                }
                cfg.taus = parse_number_list(taus_text);
            } else {
                if (taus_opt->count() > 0) {
                    throw CliUsageError{"--taus belongs to temporal studies, not --axis " + axis_text};
                }
                if (hs_opt->count() == 0) {
                    throw CliUsageError{"--hs: required for spatial and coupled studies"};
                }
                cfg.hs = parse_number_list(hs_text);
                cfg.tau_rule.c = parse_fraction(c_text).value();
                if (!(cfg.tau_rule.c > 0.0)) {
                    throw CliUsageError{"--c: must be positive"};
                }
                if (cfg.axis == RefinementAxis::coupled) {
                    cfg.tau_rule.p = p_given ? p_value : 1.0;
                } else {
                    cfg.tau_rule.p = p_given ? p_value : 4.0 / cfg.q;
                }
                if (!(cfg.tau_rule.p > 0.0)) {
                    throw CliUsageError{"--p: must be positive"};
                }
            }
            if (cfg.jobs < 1) {
                throw CliUsageError{"--jobs: must be at least 1"};
            }
        } else if (stability->parsed()) {
            cfg.command = Command::stability;
            if (stab_M->count() == 0) {
                cfg.M = 50;
            }
            if (stab_N->count() == 0) {
                cfg.N = 100;
            }
            checked_alpha(cfg.alpha, "--alpha");
            if (cfg.M < 2 || cfg.N < 1) {
                throw CliUsageError{"--M/--N: need M >= 2 and N >= 1"};
            }
            if (cfg.trials < 1) {
                throw CliUsageError{"--trials: must be at least 1"};
            }
            if (!(cfg.perturbation_scale >= 0.0)) {
                throw CliUsageError{"--scale: must be non-negative"};
            }
        }
    } catch (const std::invalid_argument& e) {
        throw CliUsageError{e.what()};
    }
    cfg.output = resolve_output_path(cfg.output);
    return cfg;
}

namespace {

ProblemFactory make_factory(const RunConfig& cfg) {
    if (!cfg.problem_file.empty()) {
        const ProblemFileSpec file = parse_problem_file(cfg.problem_file);
        return [file](double alpha) { return file.with_alpha(alpha); };
    }
    const std::string name = cfg.example;
    const std::optional<Complex> rho = cfg.rho;
    return [name, rho](double alpha) {
        ManufacturedProblem p = problem_by_name(name, alpha);
        if (rho) {
            if (name == "example2" || name == "2") {
                p = example2(alpha, *rho);
            } else {
                p = example1(alpha, *rho);
            }
        }
        return p;
    };
}

int run_coeffs(const RunConfig& cfg) {
    const WeightTable table = fractional_power_weights(SchemeOrder(cfg.q), cfg.alpha, cfg.count);
    std::string csv = "k,l_k\n";
    char buf[40];
    for (int k = 0; k <= table.count(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", k, table[k]);
        csv += buf;
    }
    if (cfg.output.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        atomic_write_text(cfg.output, csv);
        std::printf("wrote %d weights to %s\n", table.count() + 1, cfg.output.c_str());
    }
    return 0;
}

int run_solve(const RunConfig& cfg) {
    ManufacturedProblem problem = cfg.problem_file.empty()
                                      ? make_factory(cfg)(cfg.alpha)
                                      : parse_problem_file(cfg.problem_file).to_problem();
    const SolverRun run = march(problem.spec, SchemeOrder(cfg.q), cfg.M, cfg.N);
    const GridFn& last = run.history.back();
    const double err = max_error(run, problem);
    double peak = 0.0;
    for (int i = 1; i < run.grid.M; ++i) {
        peak = std::max(peak, std::abs(last.v[static_cast<std::size_t>(i)]));
    }
    std::printf("march complete: q=%d alpha=%g M=%d N=%d rho=%g%+gi\n", cfg.q, problem.spec.alpha,
                run.grid.M, run.tgrid.N, problem.spec.rho.real(), problem.spec.rho.imag());
    std::printf("max interior |P^N| = %.6e\n", peak);
    std::printf("max interior error vs exact at T = %.6e\n", err);
    if (!cfg.output.empty()) {
        std::string csv = "x,re,im\n";
        for (int i = 0; i <= run.grid.M; ++i) {
            std::string line;
            append_shortest(line, run.grid.node(i));
            line += ',';
            append_shortest(line, last.v[static_cast<std::size_t>(i)].real());
            line += ',';
            append_shortest(line, last.v[static_cast<std::size_t>(i)].imag());
            line += '\n';
            csv += line;
        }
        atomic_write_text(cfg.output, csv);
        std::printf("wrote final slice to %s\n", cfg.output.c_str());
    }
    return 0;
}

std::string split_path(const std::string& base, const RateTable& table) {
    const std::filesystem::path p(base);
    std::string stem = (p.parent_path() / p.stem()).string();
    std::string ext = p.extension().string();
    if (ext.empty()) {
        ext = ".csv";
    }
    std::string alpha_text;
    append_shortest(alpha_text, table.alpha);
    for (char& c : alpha_text) {
        if (c == '.') {
            c = 'p';
        }
    }
    return stem + "-q" + std::to_string(table.q) + "-" + axis_name(table.axis) + "-alpha" + alpha_text + ext;
}

int run_converge(const RunConfig& cfg) {
    const ProblemFactory factory = make_factory(cfg);
    std::vector<RateTable> tables;
    if (cfg.axis == RefinementAxis::temporal) {
        tables = temporal_study(factory, SchemeOrder(cfg.q), cfg.alphas, cfg.h_fixed, cfg.taus, cfg.jobs);
    } else {
        tables = spatial_study(factory, SchemeOrder(cfg.q), cfg.alphas, cfg.hs, cfg.tau_rule, cfg.axis,
                               cfg.jobs);
    }
    for (const RateTable& table : tables) {
        std::fputs(format_table(table).c_str(), stdout);
        std::fputs("\n", stdout);
    }
    if (!cfg.output.empty()) {
        if (cfg.split_output) {
            for (const RateTable& table : tables) {
                const std::string path = split_path(cfg.output, table);
                emit_csv({table}, path);
                std::printf("wrote %s\n", path.c_str());
            }
        } else {
            emit_csv(tables, cfg.output);
            std::printf("wrote %s\n", cfg.output.c_str());
        }
    }
    return 0;
}

int run_stability(const RunConfig& cfg) {
    const ProblemFactory factory = [](double alpha) { return example1(alpha); };
    const StabilityReport report =
        stability_study(factory, cfg.alpha, cfg.M, cfg.N, cfg.perturbation_scale, cfg.trials, cfg.seed);
    std::printf("stability experiment: alpha=%g M=%d N=%d trials=%d scale=%g seed=%llu\n", cfg.alpha,
                cfg.M, cfg.N, cfg.trials, cfg.perturbation_scale,
                static_cast<unsigned long long>(cfg.seed));
    std::printf("bound constant sqrt(3l/8) = %.6f\n", report.bound_constant);
    std::printf("worst ratio ||eps^n||_inf / bound = %.6f\n", report.worst_ratio);
    if (report.pass()) {
        std::printf("all %d trials satisfied the bound at every time level\n", report.trials);
        return 0;
    }
    std::printf("%zu violations:\n", report.violations.size());
    for (const StabilityViolation& v : report.violations) {
        std::printf("  trial %d, time level %d: ratio %.6f\n", v.trial, v.n, v.ratio);
    }
    return 1;
}

}  // namespace

int run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::coeffs: return run_coeffs(cfg);
        case Command::solve: return run_solve(cfg);
        case Command::converge: return run_converge(cfg);
        case Command::stability: return run_stability(cfg);
    }
    return 1;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    try {
        const RunConfig cfg = parse_args(args);
        return run(cfg);
    } catch (const CliHelp& help) {
        std::fputs(help.text.c_str(), stdout);
        return 0;
    } catch (const CliUsageError& usage) {
        std::fprintf(stderr, "usage error: %s\n", usage.message.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace fkac
