#pragma once

// Run configuration: key = value pairs under [section] headers.
//
//   [coefficient]  kind = constant|exponential|square_polynomial|sampled,
//                  c, a, table, grid_size
//   [period]       p, q
//   [spectrum]     m_max, n_max, kernel_tol, level
//   [nonlinearity] c_lin, c_sat, c_osc, symmetry = odd_f1_only|split_f1_f2,
//                  forcing = "cos 1 1 0.5; sin 3 2 -0.1"   (trig m n value)
//   [solver]       alpha, beta, continuation_steps, newton_tol, newton_max_iter,
//                  R_clamp, seed, dealias, num_starts, gram_measure = plain|weighted,
//                  margin_delta_floor
//   [output]       path, format = csv|json
//
// A relative table path is resolved against the directory of the config file.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "varwave/coefficient.hpp"
#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/nonlinearity.hpp"
#include "varwave/solver.hpp"
#include "varwave/wave_spectrum.hpp"

namespace varwave {

/// Unknown keys, malformed values, missing sections or files.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class OutputFormat { Csv, Json };

inline std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

inline OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

struct ForcingTerm {
    Trig trig;
    int m;
    int n;
    double value;
};

struct RunConfig {
    std::set<std::string> sections;

    CoefficientKind kind = CoefficientKind::Constant;
    double coefficient_c = 1.0;
    double coefficient_a = 1.0;
    std::string table;
    std::size_t grid_size = CoefficientProfile::kDefaultGridSize;

    int p = 2;
    int q = 1;

    int m_max = 15;
    int n_max = 16;
    double kernel_tol = 1e-6;
    std::optional<double> level;

    double c_lin = 0.0;
    double c_sat = 0.0;
    double c_osc = 0.0;
    SymmetryDeclaration symmetry = SymmetryDeclaration::SplitOddEven;
    std::vector<ForcingTerm> forcing;

    double alpha = -0.25;
    double beta = -0.25;
    int continuation_steps = 10;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double R_clamp = 10.0;
    std::uint64_t seed = 0;
    double dealias = 1.5;
    int num_starts = 20;
    bool weighted_gram = false;
    double margin_delta_floor = 1e-3;

    std::string out_path;
    std::optional<OutputFormat> format;

    bool has(const std::string& section) const { return sections.count(section) > 0; }

    void require(std::initializer_list<const char*> needed, const std::string& command) const {
        for (const char* s : needed)
            if (!has(s))
                throw ConfigError(fmt::format("'{}' needs a [{}] section in the config", command, s));
    }

    CoefficientProfile profile() const {
        switch (kind) {
            case CoefficientKind::Constant: return CoefficientProfile::constant(coefficient_c, grid_size);
            case CoefficientKind::Exponential: return CoefficientProfile::exponential(coefficient_a, grid_size);
            case CoefficientKind::SquarePolynomial: return CoefficientProfile::square_polynomial(grid_size);
            case CoefficientKind::UserSampled: return CoefficientProfile::from_table(table);
        }
        throw ConfigError("unknown coefficient kind");
    }

    RationalPeriod period() const { return RationalPeriod::make(p, q); }

    NonlinearitySpec nonlinearity(const SpaceRef& space) const {
        NonlinearitySpec spec;
        spec.c_lin = c_lin;
        spec.c_sat = c_sat;
        spec.c_osc = c_osc;
        spec.symmetry = symmetry;
        if (!forcing.empty()) {
            SpectralField e(space, ParityTag::Odd);
            for (const auto& f : forcing) {
                if (f.m < 0 || f.m > space->m_max() || f.n < 1 || f.n > space->n_max())
                    throw ConfigError(fmt::format(
                        "forcing mode ({}, {}) lies outside the window m <= {}, n <= {}", f.m, f.n,
                        space->m_max(), space->n_max()));
                if (f.m == 0 && f.trig == Trig::Sin)
                    throw ConfigError("forcing mode (0, n) has no sine component");
                e.set(f.m, f.n, f.trig, e.get(f.m, f.n, f.trig) + f.value);
                if (f.m % 2 == 0) e.set_parity_tag(ParityTag::Mixed);
            }
            spec.forcing = std::move(e);
        }
        return spec;
    }

    SolveConfig solve_config() const {
        SolveConfig cfg;
        cfg.m_max = m_max;
        cfg.n_max = n_max;
        cfg.alpha = SlopeField::constant(alpha);
        cfg.beta = SlopeField::constant(beta);
        cfg.continuation_steps = continuation_steps;
        cfg.newton_tol = newton_tol;
        cfg.newton_max_iter = newton_max_iter;
        cfg.R_clamp = R_clamp;
        cfg.seed = seed;
        cfg.dealias = dealias;
        cfg.kernel_tol = kernel_tol;
        return cfg;
    }
};

namespace detail {

using Ptree = boost::property_tree::ptree;

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
    std::istringstream ss(text);
    T v{};
    if (!(ss >> v) || !(ss >> std::ws).eof())
        throw ConfigError(fmt::format("[{}] {} = '{}' is not a valid value", section, key, text));
    return v;
}

inline std::vector<ForcingTerm> parse_forcing(const std::string& text) {
    std::vector<ForcingTerm> out;
    std::istringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ss(item);
        std::string trig;
        ForcingTerm f{};
        if (!(ss >> trig >> f.m >> f.n >> f.value) || !(ss >> std::ws).eof())
            throw ConfigError("[nonlinearity] forcing term '" + item +
                              "' must read 'cos|sin m n value'");
        if (trig == "cos") f.trig = Trig::Cos;
        else if (trig == "sin") f.trig = Trig::Sin;
        else throw ConfigError("[nonlinearity] forcing trig must be cos or sin, got '" + trig + "'");
        out.push_back(f);
    }
    return out;
}

}  // namespace detail

/// Parses the configuration text; `base_dir` resolves relative table paths.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    detail::Ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' appears outside any section");
        c.sections.insert(section);
        for (const auto& [key, node] : body) {
            const std::string v = node.data();
            auto num = [&]<class T>(T& target) { target = detail::parse_value<T>(section, key, v); };
            auto unknown = [&] {
                throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
            };
            if (section == "coefficient") {
                if (key == "kind") {
                    if (v == "constant") c.kind = CoefficientKind::Constant;
                    else if (v == "exponential") c.kind = CoefficientKind::Exponential;
                    else if (v == "square_polynomial") c.kind = CoefficientKind::SquarePolynomial;
                    else if (v == "sampled") c.kind = CoefficientKind::UserSampled;
                    else throw ConfigError("[coefficient] unknown kind '" + v + "'");
                } else if (key == "c") num(c.coefficient_c);
                else if (key == "a") num(c.coefficient_a);
                else if (key == "table") {
                    std::filesystem::path path(v);
                    c.table = (path.is_relative() ? base_dir / path : path).string();
                } else if (key == "grid_size") num(c.grid_size);
                else unknown();
            } else if (section == "period") {
                if (key == "p") num(c.p);
                else if (key == "q") num(c.q);
                else unknown();
            } else if (section == "spectrum") {
                if (key == "m_max") num(c.m_max);
                else if (key == "n_max") num(c.n_max);
                else if (key == "kernel_tol") num(c.kernel_tol);
                else if (key == "level") c.level = detail::parse_value<double>(section, key, v);
                else unknown();
            } else if (section == "nonlinearity") {
                if (key == "c_lin") num(c.c_lin);
                else if (key == "c_sat") num(c.c_sat);
                else if (key == "c_osc") num(c.c_osc);
                else if (key == "symmetry") {
                    if (v == "odd_f1_only") c.symmetry = SymmetryDeclaration::OddOnly;
                    else if (v == "split_f1_f2") c.symmetry = SymmetryDeclaration::SplitOddEven;
                    else throw ConfigError("[nonlinearity] symmetry must be odd_f1_only or split_f1_f2");
                } else if (key == "forcing") c.forcing = detail::parse_forcing(v);
                else unknown();
            } else if (section == "solver") {
                if (key == "alpha") num(c.alpha);
                else if (key == "beta") num(c.beta);
                else if (key == "continuation_steps") num(c.continuation_steps);
                else if (key == "newton_tol") num(c.newton_tol);
                else if (key == "newton_max_iter") num(c.newton_max_iter);
                else if (key == "R_clamp") num(c.R_clamp);
                else if (key == "seed") num(c.seed);
                else if (key == "dealias") num(c.dealias);
                else if (key == "num_starts") num(c.num_starts);
                else if (key == "gram_measure") {
                    if (v == "plain") c.weighted_gram = false;
                    else if (v == "weighted") c.weighted_gram = true;
                    else throw ConfigError("[solver] gram_measure must be plain or weighted");
                } else if (key == "margin_delta_floor") num(c.margin_delta_floor);
                else unknown();
            } else if (section == "output") {
                if (key == "path") c.out_path = v;
                else if (key == "format") c.format = output_format_from_string(v);
                else unknown();
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }
    if (c.kind == CoefficientKind::UserSampled && c.table.empty())
        throw ConfigError("[coefficient] kind = sampled requires a table path");
    if (c.m_max < 1 || c.n_max < 1)
        throw ConfigError("[spectrum] m_max and n_max must be positive");
    if (c.continuation_steps < 1 || c.newton_max_iter < 1 || c.num_starts < 1)
        throw ConfigError("[solver] continuation_steps, newton_max_iter and num_starts must be positive");
    if (!(c.dealias >= 1.0)) throw ConfigError("[solver] dealias must be >= 1");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace varwave
