#include "divhjb/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "divhjb/asymptotics.hpp"
#include "divhjb/config.hpp"
#include "divhjb/hjb.hpp"
#include "divhjb/shooting.hpp"
#include "divhjb/simulate.hpp"

namespace divhjb {

std::string format_number(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    std::string s(buf);
    if (s.find_first_of(".eninf") == std::string::npos)
        s += ".0";
    return s;
}

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--mu", "mu", "premium rate"},
    {"--lambda", "lambda", "claim intensity"},
    {"--xi", "xi", "claim rate parameter"},
    {"--k", "k", "Erlang shape"},
    {"--beta", "beta", "discount rate"},
    {"--utility", "utility", "power | log"},
    {"--alpha", "alpha", "power utility exponent"},
    {"--b", "b", "initial slope v_x(0)"},
    {"--xmax", "x_max", "integration range"},
    {"--step", "output_step", "output grid step"},
    {"--b-start", "b_start", "first candidate slope"},
    {"--d-start", "d_start", "initial scan step"},
    {"--epsilon", "epsilon", "gap tolerance"},
    {"--max-iters", "max_iters", "maximum rows"},
    {"--refine-factor", "refine_factor", "step refinement factor"},
    {"--n-fit", "n_fit", "fit points"},
    {"--x-fit-max", "x_fit_max", "end of fit window"},
    {"--convention", "convention", "payment | literal"},
    {"--strategy", "strategy", "constant:<c> | linear:<a1>,<b1> | grid | asymptotic"},
    {"--x0", "x0", "initial surplus"},
    {"--n-paths", "n_paths", "Monte Carlo paths"},
    {"--seed", "seed", "RNG seed"},
};

struct Invocation {
    std::string config_path;
    std::string out_path;
    std::map<std::string, std::string> overrides;
    std::vector<std::string> xs;
};

void add_common_options(CLI::App* cmd, Invocation& inv) {
    cmd->add_option("--config", inv.config_path, "key = value config file");
    cmd->add_option("--out", inv.out_path, "CSV output file (default: standard output)");
    for (const auto& spec : kFlags) {
        cmd->add_option_function<std::string>(
            spec.flag, [&inv, key = std::string(spec.key)](const std::string& v) { inv.overrides[key] = v; },
            spec.help);
    }
    cmd->add_option("--x", inv.xs, "surplus level(s); repeat or comma-separate")->delimiter(',');
}

RunConfig load_config(const Invocation& inv) {
    KeyValues values;
    if (!inv.config_path.empty()) {
        std::ifstream in(inv.config_path);
        if (!in)
            throw ValidationError("cannot open config file '" + inv.config_path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        values = parse_key_values(buffer.str());
    }
    for (const auto& [key, value] : inv.overrides)
        values[key] = value;
    if (!inv.xs.empty()) {
        std::string joined;
        for (const auto& x : inv.xs)
            joined += (joined.empty() ? "" : ",") + x;
        values["x"] = joined;
    }
    return config_from_key_values(values);
}

ModelParams checked_params(const RunConfig& cfg, std::ostream& err) {
    const ModelParams params = cfg.model_params();
    for (const auto& warning : validate_params(params))
        err << "warning: " << warning << "\n";
    return params;
}

SolutionGrid solve_grid(const RunConfig& cfg, const ModelParams& params, const Utility& utility) {
    if (!cfg.solve.b)
        throw ValidationError("missing initial slope b");
    IntegrateOptions options;
    options.output_step = cfg.solve.output_step;
    return integrate(params, utility, *cfg.solve.b, cfg.solve.x_max, options);
}

void write_row(std::ostream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first)
            os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams params = checked_params(cfg, err);
    const Utility utility = cfg.utility_function();
    const SolutionGrid grid = solve_grid(cfg, params, utility);
    out << "x,v,vx,c\n";
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        write_row(out, {format_number(grid.xs[i]), format_number(grid.v[i]), format_number(grid.vx[i]),
                        format_number(grid.c[i])});
    const SolutionClass cls = classify_solution(grid);
    err << "solve: b=" << format_number(grid.meta.b) << " v(0)=" << format_number(grid.v[0])
        << " points=" << grid.size() << " class=" << to_string(cls.kind) << " halt=" << to_string(grid.halt)
        << " x_reached=" << format_number(grid.x_reached) << "\n";
    return kExitOk;
}

int cmd_shoot(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams params = checked_params(cfg, err);
    const Utility utility = cfg.utility_function();
    ShootingOptions options;
    options.b_start = cfg.shoot.b_start;
    options.d_start = cfg.shoot.d_start;
    options.epsilon = cfg.shoot.epsilon;
    options.max_iters = cfg.shoot.max_iters;
    options.refine_factor = cfg.shoot.refine_factor;
    options.n_fit = cfg.shoot.n_fit;
    options.x_fit_max = cfg.shoot.x_fit_max;
    options.convention = cfg.shoot.convention;
    const ShootingReport report = find_initial_slope(params, utility, options);

    out << "iter,b,a,A,gap,class\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ShootingRow& row = report.rows[i];
        const std::string cls =
            row.status == RowStatus::Evaluated ? to_string(row.solution_class) : to_string(row.status);
        write_row(out, {std::to_string(i + 1), format_number(row.b), format_number(row.a), format_number(row.A),
                        format_number(row.gap), cls});
    }
    const ShootingRow& best = report.best();
    err << "shoot: best b=" << format_number(best.b) << " gap=" << format_number(best.gap)
        << " rows=" << report.rows.size() << " converged=" << (report.converged ? "yes" : "no") << "\n";
    return kExitOk;
}

Strategy parse_strategy(const RunConfig& cfg, const ModelParams& params, const Utility& utility) {
    const std::string& text = cfg.simulate.strategy;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "constant")
        return ConstantStrategy{parse_double("strategy", args)};
    if (kind == "linear") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ValidationError("linear strategy needs 'linear:<a1>,<b1>'");
        return LinearStrategy{parse_double("strategy", args.substr(0, comma)),
                              parse_double("strategy", args.substr(comma + 1))};
    }
    if (kind == "grid")
        return GridStrategy{std::make_shared<const SolutionGrid>(solve_grid(cfg, params, utility))};
    if (kind == "asymptotic") {
        if (utility.is_power())
            return AsymptoticPowerStrategy{utility.alpha()};
        return AsymptoticLogStrategy{};
    }
    throw ValidationError("unknown strategy '" + text + "'");
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams params = checked_params(cfg, err);
    const Utility utility = cfg.utility_function();
    const Strategy strategy = parse_strategy(cfg, params, utility);
    if (cfg.simulate.n_paths == 0)
        throw ValidationError("n_paths must be at least 1");
    const SimResult res =
        estimate_value(params, utility, strategy, cfg.simulate.x0, cfg.simulate.n_paths, cfg.simulate.seed);
    out << "x0,mean,stderr,n,ruin_fraction\n";
    write_row(out, {format_number(cfg.simulate.x0), format_number(res.mean), format_number(res.std_error),
                    std::to_string(res.n_paths), format_number(res.ruin_fraction)});
    err << "simulate: strategy=" << cfg.simulate.strategy << " mean=" << format_number(res.mean)
        << " stderr=" << format_number(res.std_error) << " mean_ruin_time=" << format_number(res.mean_ruin_time)
        << "\n";
    return kExitOk;
}

int cmd_asymptote(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.beta)
        throw ValidationError("asymptote requires beta");
    if (cfg.x.empty())
        throw ValidationError("asymptote requires at least one --x");
    ModelParams params;
    params.beta = *cfg.beta;
    if (!(params.beta > 0.0))
        throw ValidationError("beta must be positive");
    const Utility utility = cfg.utility_function();
    out << "x,v,vx,c\n";
    for (const auto& token : cfg.x) {
        const auto triple = asymptote(params, utility, parse_double("x", token));
        write_row(out, {token, format_number(triple.v), format_number(triple.vx), format_number(triple.c)});
    }
    err << "asymptote: " << cfg.x.size() << " level(s)\n";
    return kExitOk;
}

int cmd_residual(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams params = checked_params(cfg, err);
    const Utility utility = cfg.utility_function();
    const SolutionGrid grid = solve_grid(cfg, params, utility);
    out << "x,residual,normalized\n";
    double worst = 0.0;
    auto emit = [&](const std::string& label, double residual, double v) {
        const double normalized = std::abs(residual) / (1.0 + std::abs(v));
        worst = std::max(worst, normalized);
        write_row(out, {label, format_number(residual), format_number(normalized)});
    };
    if (cfg.x.empty()) {
        const Eigen::VectorXd residuals = hjb_residuals(grid);
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            emit(format_number(grid.xs[i]), residuals[i], grid.v[i]);
    } else {
        for (const auto& token : cfg.x) {
            const double x = parse_double("x", token);
            emit(token, hjb_residual(grid, x), grid.v_at(x));
        }
    }
    err << "residual: max normalized=" << format_number(worst) << "\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dividend value function for the Cramer-Lundberg model", "divhjb"};
    app.require_subcommand(1);
    Invocation inv;
    std::map<std::string, int (*)(const RunConfig&, std::ostream&, std::ostream&)> commands = {
        {"solve", cmd_solve},       {"shoot", cmd_shoot},       {"asymptote", cmd_asymptote},
        {"simulate", cmd_simulate}, {"residual", cmd_residual},
    };
    const std::map<std::string, std::string> descriptions = {
        {"solve", "integrate the value-function ODE for a given v_x(0)"},
        {"shoot", "search the initial slope by the first-jump self-consistency check"},
        {"asymptote", "closed-form large-surplus approximation"},
        {"simulate", "Monte Carlo value of a dividend strategy"},
        {"residual", "HJB residual of a solved grid"},
    };
    for (const auto& [name, _] : commands)
        add_common_options(app.add_subcommand(name, descriptions.at(name)), inv);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        err << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        const RunConfig cfg = load_config(inv);
        std::ofstream file;
        std::ostream* sink = &out;
        if (!inv.out_path.empty()) {
            file.open(inv.out_path);
            if (!file)
                throw ValidationError("cannot open output file '" + inv.out_path + "'");
            sink = &file;
        }
        return commands.at(name)(cfg, *sink, err);
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotSupportedError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RangeError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace divhjb
