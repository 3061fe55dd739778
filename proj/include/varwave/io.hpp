#pragma once

// JSON and CSV encodings of fields, spectra and reports. Floating-point values
// in CSV use 17 significant digits; JSON uses nlohmann's shortest round-trip form.

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "varwave/errors.hpp"
#include "varwave/function_space.hpp"
#include "varwave/solver.hpp"
#include "varwave/sturm_liouville.hpp"
#include "varwave/verification.hpp"
#include "varwave/wave_spectrum.hpp"

namespace varwave::io {

using json = nlohmann::ordered_json;

inline std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

/// Infinite values are not representable in JSON; they are written as strings.
inline json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw InvalidInput("not a number: " + s);
}

/// {p, q, n_max, m_max, a[m][n], b[m-1][n], parity_tag}; b omits the m = 0 row.
inline json to_json(const SpectralField& c) {
    const SpectralSpace& s = *c.space();
    json a = json::array(), b = json::array();
    for (int m = 0; m <= s.m_max(); ++m) {
        json row = json::array();
        for (int n = 0; n < s.n_max(); ++n) row.push_back(c.a()(m, n));
        a.push_back(std::move(row));
    }
    for (int m = 1; m <= s.m_max(); ++m) {
        json row = json::array();
        for (int n = 0; n < s.n_max(); ++n) row.push_back(c.b()(m, n));
        b.push_back(std::move(row));
    }
    return json{{"p", s.period().p},         {"q", s.period().q}, {"n_max", s.n_max()},
                {"m_max", s.m_max()},        {"a", std::move(a)}, {"b", std::move(b)},
                {"parity_tag", to_string(c.parity_tag())}};
}

/// Reads a field into `space`, which must match p, q, m_max, n_max.
inline SpectralField spectral_field_from_json(const json& j, const SpaceRef& space) {
    try {
        const int p = j.at("p").get<int>(), q = j.at("q").get<int>();
        const int m_max = j.at("m_max").get<int>(), n_max = j.at("n_max").get<int>();
        if (p != space->period().p || q != space->period().q || m_max != space->m_max() ||
            n_max != space->n_max())
            throw InvalidInput(fmt::format(
                "field (p={}, q={}, m_max={}, n_max={}) does not match the configured space "
                "(p={}, q={}, m_max={}, n_max={})",
                p, q, m_max, n_max, space->period().p, space->period().q, space->m_max(),
                space->n_max()));
        SpectralField c(space, parity_tag_from_string(j.at("parity_tag").get<std::string>()));
        const auto& a = j.at("a");
        const auto& b = j.at("b");
        if (a.size() != static_cast<std::size_t>(m_max + 1) ||
            b.size() != static_cast<std::size_t>(m_max))
            throw InvalidInput("field coefficient arrays have the wrong number of rows");
        for (int m = 0; m <= m_max; ++m) {
            const auto& row = a.at(static_cast<std::size_t>(m));
            if (row.size() != static_cast<std::size_t>(n_max))
                throw InvalidInput("field coefficient row has the wrong length");
            for (int n = 0; n < n_max; ++n) c.a()(m, n) = row.at(static_cast<std::size_t>(n)).get<double>();
        }
        for (int m = 1; m <= m_max; ++m) {
            const auto& row = b.at(static_cast<std::size_t>(m - 1));
            if (row.size() != static_cast<std::size_t>(n_max))
                throw InvalidInput("field coefficient row has the wrong length");
            for (int n = 0; n < n_max; ++n) c.b()(m, n) = row.at(static_cast<std::size_t>(n)).get<double>();
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed spectral field JSON: ") + e.what());
    }
}

/// Header line "# gridfield n_t=.. n_x=.. T=.. p=.. q=..", then a "t,x_0,..." row of
/// x-coordinates, then one row per time node.
inline void write_grid_csv(std::ostream& os, const GridField& g) {
    const Grid& grid = *g.grid;
    os << fmt::format("# gridfield n_t={} n_x={} T={} p={} q={}\n", grid.n_t, grid.n_x,
                      fmt17(grid.space->T()), grid.space->period().p, grid.space->period().q);
    os << "t";
    for (int j = 0; j < grid.n_x; ++j) os << ',' << fmt17(grid.x[j]);
    os << '\n';
    for (int i = 0; i < grid.n_t; ++i) {
        os << fmt17(grid.t[i]);
        for (int j = 0; j < grid.n_x; ++j) os << ',' << fmt17(g.values(i, j));
        os << '\n';
    }
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<AsymptoticDefect>& defects,
                               const EigenBasis& basis) {
    os << "n,lambda_sq,defect\n";
    for (const auto& d : defects)
        os << d.n << ',' << fmt17(basis.lambda_sq(d.n)) << ',' << fmt17(d.defect) << '\n';
}

inline void write_gaps_csv(std::ostream& os, const OperatorSpectrum& spec) {
    os << "m,n,mu,parity\n";
    for (const auto& e : spec.entries())
        os << e.m << ',' << e.n << ',' << fmt17(e.mu) << ',' << to_string(e.parity) << '\n';
}

inline json modes_json(const std::vector<ModeIndex>& modes) {
    json out = json::array();
    for (const auto& k : modes) out.push_back(json::array({k.m, k.n}));
    return out;
}

inline json to_json(const NonresonanceReport& r) {
    return json{{"lambda_lower", number(r.lambda_lower)},
                {"lambda_upper", number(r.lambda_upper)},
                {"bracketing_ok", r.bracketing_ok},
                {"gram_lower", number(r.gram_lower)},
                {"gram_upper", number(r.gram_upper)},
                {"kernel_lower", modes_json(r.kernel_lower)},
                {"kernel_upper", modes_json(r.kernel_upper)},
                {"epsilon_margin", number(r.epsilon_margin)},
                {"verdict", r.verdict},
                {"message", r.message}};
}

inline json to_json(const SolveReport& r) {
    json path = json::array();
    for (const auto& p : r.continuation_path)
        path.push_back(json{{"s", p.s}, {"norm", p.norm}, {"newton_iters", p.newton_iters}});
    return json{{"residual_norm", r.residual_norm},
                {"solution_norm", r.solution.norm()},
                {"even_norm", r.even_norm},
                {"apriori_bound", number(r.apriori_bound)},
                {"bound_satisfied", r.bound_satisfied},
                {"delta_num", r.delta_num},
                {"h_R_norm", r.h_R_norm},
                {"clamp_min", number(r.clamp_min)},
                {"clamp_max", number(r.clamp_max)},
                {"continuation_path", std::move(path)},
                {"solution", to_json(r.solution)}};
}

inline json to_json(const ProbeReport& r) {
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back(json{{"initial_norm", s.initial_norm},
                              {"converged", s.converged},
                              {"final_norm", s.final_norm},
                              {"iterations", s.iterations}});
    json distinct = json::array();
    for (const auto& d : r.distinct_solutions) distinct.push_back(d.norm());
    return json{{"slope_min", r.slopes.range.lo},
                {"slope_max", r.slopes.range.hi},
                {"slopes_ok", r.slopes.pass},
                {"apriori_bound", number(r.apriori_bound)},
                {"starts", std::move(starts)},
                {"distinct_solution_norms", std::move(distinct)},
                {"max_pairwise_distance", r.max_pairwise_distance},
                {"unique_trivial", r.unique_trivial}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path, e.what()));
    }
}

}  // namespace varwave::io
