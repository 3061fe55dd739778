#pragma once

// The varwave command-line front end. Each subcommand reads a config file,
// runs one pipeline stage, writes its structured output (to --out, else to the
// configured output path, else to stdout) and prints a one-line summary.
//
// Exit codes: 0 success, 1 hypothesis-check failure, 2 numerical failure,
// 3 configuration error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "varwave/config.hpp"
#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/io.hpp"
#include "varwave/solver.hpp"
#include "varwave/sturm_liouville.hpp"
#include "varwave/verification.hpp"
#include "varwave/wave_spectrum.hpp"

namespace varwave::cli {

enum ExitCode : int { kOk = 0, kHypothesis = 1, kNumerical = 2, kConfig = 3 };

struct Options {
    std::string command;
    std::string config;
    std::string out;
    std::optional<int> n_max;
    std::optional<int> m_max;
    std::optional<std::uint64_t> seed;
    bool force = false;
    std::string format;
    std::string solution;
};

struct Result {
    int code = kOk;
    std::string payload;
    std::string summary;
};

namespace detail {

inline RunConfig load(const Options& o) {
    RunConfig c = load_config(o.config);
    if (o.n_max) c.n_max = *o.n_max;
    if (o.m_max) c.m_max = *o.m_max;
    if (o.seed) c.seed = *o.seed;
    if (!o.format.empty()) c.format = output_format_from_string(o.format);
    if (!o.out.empty()) c.out_path = o.out;
    if (c.m_max < 1 || c.n_max < 1) throw ConfigError("--nmax and --mmax must be positive");
    return c;
}

inline OutputFormat format_or(const RunConfig& c, OutputFormat fallback) {
    return c.format.value_or(fallback);
}

inline void json_only(const RunConfig& c, const std::string& command) {
    if (format_or(c, OutputFormat::Json) != OutputFormat::Json)
        throw ConfigError("'" + command + "' only writes JSON");
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

struct Setup {
    std::shared_ptr<const EigenBasis> basis;
    SpaceRef space;
    GridRef grid;
};

inline Setup odd_setup(const RunConfig& c) {
    const RationalPeriod period = c.period();
    period.require_even_p();
    Setup s;
    s.basis = std::make_shared<const EigenBasis>(
        solve_eigenbasis(std::make_shared<const CoefficientProfile>(c.profile()), c.n_max));
    s.space = make_space(s.basis, period, c.m_max, c.n_max);
    s.grid = make_grid(s.space, c.dealias);
    return s;
}

inline NonresonanceOptions nonresonance_options(const RunConfig& c, bool margin) {
    NonresonanceOptions opt;
    opt.level = c.level;
    opt.weighted_gram = c.weighted_gram;
    opt.margin_delta_floor = c.margin_delta_floor;
    opt.compute_margin = margin;
    return opt;
}

inline Result spectrum(const RunConfig& c) {
    c.require({"coefficient"}, "spectrum");
    const EigenBasis basis = solve_eigenbasis(c.profile(), c.n_max);
    const double shift = basis.kappa() / kPi;
    Result r;
    if (format_or(c, OutputFormat::Csv) == OutputFormat::Csv) {
        std::ostringstream os;
        os << "n,lambda_sq,defect\n";
        for (int n = 1; n <= basis.n_max(); ++n) {
            const double l2 = basis.lambda_sq(n);
            os << n << ',' << io::fmt17(l2) << ',' << io::fmt17(l2 - n * n - shift) << '\n';
        }
        r.payload = os.str();
    } else {
        io::json l = io::json::array(), d = io::json::array();
        for (int n = 1; n <= basis.n_max(); ++n) {
            l.push_back(basis.lambda_sq(n));
            d.push_back(basis.lambda_sq(n) - n * n - shift);
        }
        r.payload = dump(io::json{{"kind", to_string(basis.profile().kind())},
                                  {"n_max", basis.n_max()},
                                  {"kappa", basis.kappa()},
                                  {"lambda_sq", std::move(l)},
                                  {"defect", std::move(d)}});
    }
    r.summary = fmt::format("spectrum: {} eigenvalues, kappa = {}, lambda_sq[1] = {}, lambda_sq[{}] = {}",
                            basis.n_max(), io::fmt17(basis.kappa()), io::fmt17(basis.lambda_sq(1)),
                            basis.n_max(), io::fmt17(basis.lambda_sq(basis.n_max())));
    return r;
}

inline Result gaps(const RunConfig& c) {
    c.require({"coefficient", "period", "spectrum"}, "gaps");
    const RationalPeriod period = c.period();
    const EigenBasis basis = solve_eigenbasis(c.profile(), c.n_max);
    const OperatorSpectrum spec = odd_spectrum(basis, period, c.m_max, c.n_max, c.kernel_tol);
    const double level = c.level.value_or(0.0);
    const ConsecutivePair pair = consecutive_pair(spec, level);
    Result r;
    if (format_or(c, OutputFormat::Json) == OutputFormat::Csv) {
        std::ostringstream os;
        io::write_gaps_csv(os, spec);
        r.payload = os.str();
    } else {
        io::json values = io::json::array();
        for (const auto& v : spec.distinct_values()) {
            values.push_back(io::json{{"value", v.value},
                                      {"modes", io::modes_json(kernel_basis(spec, v.value))}});
        }
        r.payload = dump(io::json{{"p", period.p},
                                  {"q", period.q},
                                  {"m_max", c.m_max},
                                  {"n_max", c.n_max},
                                  {"level", level},
                                  {"lambda_lower", pair.lower},
                                  {"lambda_upper", pair.upper},
                                  {"min_abs_mu", spec.min_abs_mu()},
                                  {"distinct_values", std::move(values)}});
    }
    r.summary = fmt::format("gaps: ({}, {}) brackets {}, min |mu| = {}", io::fmt17(pair.lower),
                            io::fmt17(pair.upper), io::fmt17(level), io::fmt17(spec.min_abs_mu()));
    return r;
}

inline NonresonanceReport run_check(const RunConfig& c, const Setup& s, bool margin) {
    const OperatorSpectrum spec = odd_spectrum(*s.basis, c.period(), c.m_max, c.n_max, c.kernel_tol);
    return check_nonresonance(SlopeField::constant(c.alpha), SlopeField::constant(c.beta), spec,
                              s.space, s.grid, nonresonance_options(c, margin));
}

inline Result check(const RunConfig& c) {
    c.require({"coefficient", "period", "spectrum", "solver"}, "check");
    json_only(c, "check");
    const Setup s = odd_setup(c);
    const NonresonanceReport rep = run_check(c, s, true);
    Result r;
    r.payload = dump(io::to_json(rep));
    r.code = rep.verdict ? kOk : kHypothesis;
    r.summary = fmt::format("check: verdict {} for [{}, {}] in ({}, {}), epsilon_margin = {}{}",
                            rep.verdict ? "pass" : "fail", c.alpha, c.beta,
                            io::fmt17(rep.lambda_lower), io::fmt17(rep.lambda_upper),
                            io::fmt17(rep.epsilon_margin),
                            rep.message.empty() ? "" : " (" + rep.message + ")");
    return r;
}

inline Result solve(const RunConfig& c, bool force) {
    c.require({"coefficient", "period", "spectrum", "nonlinearity", "solver"}, "solve");
    const Setup s = odd_setup(c);
    const NonresonanceReport rep = run_check(c, s, false);
    if (!rep.verdict && !force) {
        Result r;
        r.code = kHypothesis;
        r.payload = dump(io::to_json(rep));
        r.summary = "solve: refused, nonresonance check failed (" + rep.message +
                    "); rerun with --force to override";
        return r;
    }
    const NonlinearitySpec spec = c.nonlinearity(s.space);
    const SolveReport rep_solve = continuation_solve(spec, c.solve_config(), s.space);
    Result r;
    if (format_or(c, OutputFormat::Json) == OutputFormat::Csv) {
        std::ostringstream os;
        io::write_grid_csv(os, synthesize(rep_solve.solution, make_grid(s.space)));
        r.payload = os.str();
    } else {
        r.payload = dump(io::to_json(rep_solve));
    }
    r.summary = fmt::format(
        "solve: |y| = {}, residual = {}, a priori bound = {} ({}){}", io::fmt17(rep_solve.solution.norm()),
        io::fmt17(rep_solve.residual_norm), io::fmt17(rep_solve.apriori_bound),
        rep_solve.bound_satisfied ? "satisfied" : "exceeded",
        rep.verdict ? "" : ", forced past a failed nonresonance check");
    return r;
}

inline Result verify(const RunConfig& c, const Options& o) {
    const std::string& solution_path = o.solution;
    c.require({"coefficient", "period", "spectrum", "nonlinearity", "solver"}, "verify");
    json_only(c, "verify");
    if (solution_path.empty()) throw ConfigError("verify needs --solution FILE");
    const io::json doc = io::read_json_file(solution_path);
    const io::json& field = doc.contains("solution") ? doc.at("solution") : doc;

    RunConfig cc = c;
    // The solution file fixes the truncation unless a flag overrides it.
    if (!o.m_max && field.contains("m_max")) cc.m_max = field.at("m_max").get<int>();
    if (!o.n_max && field.contains("n_max")) cc.n_max = field.at("n_max").get<int>();
    const Setup s = odd_setup(cc);
    const SpectralField y = io::spectral_field_from_json(field, s.space);
    const NonlinearitySpec spec = cc.nonlinearity(s.space);
    spec.validate();
    const SolveConfig cfg = cc.solve_config();

    const double spectral = (apply_L(y) - apply_nonlinearity(spec, y, s.grid)).norm();
    WeakResidualOptions wopt;
    wopt.seed = cc.seed;
    const double weak = weak_residual(y, spec, s.grid, wopt);
    const auto ab = varwave::detail::apriori_bound(spec, cfg, s.space, s.grid);
    Result r;
    r.payload = dump(io::json{{"spectral_residual", spectral},
                              {"weak_residual", weak},
                              {"apriori_bound", io::number(ab.bound)},
                              {"delta_num", ab.delta},
                              {"solution_norm", y.norm()},
                              {"even_norm", parity_norm(y, Parity::Even)}});
    r.summary = fmt::format("verify: spectral residual = {}, weak residual = {}, |y| = {} vs bound {}",
                            io::fmt17(spectral), io::fmt17(weak), io::fmt17(y.norm()),
                            io::fmt17(ab.bound));
    return r;
}

inline Result probe(const RunConfig& c) {
    c.require({"coefficient", "period", "spectrum", "nonlinearity", "solver"}, "probe-uniqueness");
    json_only(c, "probe-uniqueness");
    const Setup s = odd_setup(c);
    const NonlinearitySpec spec = c.nonlinearity(s.space);
    const ProbeReport rep = uniqueness_probe(spec, c.solve_config(), s.space, c.num_starts);
    Result r;
    r.payload = dump(io::to_json(rep));
    r.code = rep.unique_trivial ? kOk : kNumerical;
    std::size_t ok = 0;
    for (const auto& st : rep.starts) ok += st.converged ? 1 : 0;
    r.summary = fmt::format("probe-uniqueness: {}/{} starts converged, {} distinct solution(s), "
                            "max pairwise distance = {}",
                            ok, rep.starts.size(), rep.distinct_solutions.size(),
                            io::fmt17(rep.max_pairwise_distance));
    return r;
}

inline Result dispatch(const Options& o, const RunConfig& c) {
    if (o.command == "spectrum") return spectrum(c);
    if (o.command == "gaps") return gaps(c);
    if (o.command == "check") return check(c);
    if (o.command == "solve") return solve(c, o.force);
    if (o.command == "verify") return verify(c, o);
    if (o.command == "probe-uniqueness") return probe(c);
    throw ConfigError("unknown subcommand " + o.command);
}

}  // namespace detail

/// Parses argv, runs the subcommand and returns the exit code. Structured output
/// goes to the output path when one is set (summary on `out`), otherwise to
/// `out` (summary on `err`). Errors are reported on `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Periodic solutions of the variable-coefficient wave equation", "varwave"};
    app.require_subcommand(1, 1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"spectrum", "Sturm-Liouville eigenvalues lambda_n^2 and asymptotic defects"},
        {"gaps", "Odd-subspace spectrum of the wave operator and the pair bracketing a level"},
        {"check", "Nonresonance check of alpha, beta against the odd spectrum"},
        {"solve", "Periodic solution by continuation (runs check first)"},
        {"verify", "Residuals and a priori bound of a stored solution"},
        {"probe-uniqueness", "Newton from random starts to probe uniqueness"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "Config file")->required();
        sub->add_option("--out", o.out, "Output path (default: [output] path, else stdout)");
        sub->add_option("--nmax", o.n_max, "Spatial truncation n_max")->check(CLI::PositiveNumber);
        sub->add_option("--mmax", o.m_max, "Temporal truncation m_max")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_flag("--force", o.force, "Solve even when the nonresonance check fails");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        if (name == "verify") sub->add_option("--solution", o.solution, "Solution JSON file");
        sub->callback([&o, n = name] { o.command = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "varwave: " << e.what() << '\n';
        return kConfig;
    }

    try {
        const RunConfig c = detail::load(o);
        const Result r = detail::dispatch(o, c);
        if (!c.out_path.empty()) {
            std::ofstream f(c.out_path, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + c.out_path);
            f << r.payload;
            out << r.summary << '\n';
        } else {
            out << r.payload;
            err << r.summary << '\n';
        }
        return r.code;
    } catch (const ConfigError& e) {
        err << "varwave: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvalidInput& e) {
        err << "varwave: invalid input: " << e.what() << '\n';
        return kConfig;
    } catch (const HypothesisViolation& e) {
        err << "varwave: hypothesis violated: " << e.what() << '\n';
        return kHypothesis;
    } catch (const NumericalFailure& e) {
        err << "varwave: numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "varwave: numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace varwave::cli
