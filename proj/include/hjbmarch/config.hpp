#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hjbmarch/problem.hpp"

namespace hjb {

/// Thrown for malformed run configurations; the message carries the source location.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * One sweep: a problem, the schemes to run, and the (resolution x r)
 * cross-product. 2D problems use the names experiment1..experiment4;
 * 1D advection cases use name = advection1d with case = fig1a..fig3b.
 */
struct RunSpec {
    std::string problem = "experiment1";
    std::map<std::string, double> parameters;  // gamma, lambda, alpha
    std::string case_id;                       // 1D advection case
    std::vector<std::string> schemes{"explicit"};
    std::vector<std::size_t> resolutions;
    std::vector<double> r{1.0};
    std::vector<double> report{0.0};
    bool report_given = false;
    std::size_t timing_runs = 3;
    std::size_t fine_resolution = 512;
    std::filesystem::path out_dir = "hjbmarch-out";
    bool write_fields = true;
    std::uint64_t seed = 1;

    bool is_1d() const { return problem == "advection1d"; }
    std::size_t cells() const { return schemes.size() * resolutions.size() * r.size(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& s, const std::string& where) {
    try {
        return parse_double(s);
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + s + "' is not a number");
    }
}

inline std::size_t to_count(const std::string& s, const std::string& where) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
        throw ConfigError(where + ": '" + s + "' is not a positive integer");
    }
    return v;
}

inline bool to_bool(const std::string& s, const std::string& where) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError(where + ": '" + s + "' is not a boolean");
}

}  // namespace detail

inline const std::vector<std::string>& known_schemes(bool one_dimensional) {
    static const std::vector<std::string> two_d{"explicit", "implicit", "hybrid"};
    static const std::vector<std::string> one_d{"explicit", "implicit", "hybrid", "semi-lagrangian"};
    return one_dimensional ? one_d : two_d;
}

/// Checks cross-field constraints; `origin` prefixes the messages.
inline void validate(const RunSpec& spec, const std::string& origin = "config") {
    if (!spec.is_1d() && !is_isotropic_problem(spec.problem)) {
        throw ConfigError(origin + ": unknown problem '" + spec.problem + "'");
    }
    if (spec.is_1d()) {
        const auto& cases = advection_cases();
        if (std::find(cases.begin(), cases.end(), spec.case_id) == cases.end()) {
            throw ConfigError(origin + ": advection1d needs case = one of fig1a..fig3b, got '" + spec.case_id + "'");
        }
    } else if (!spec.case_id.empty()) {
        throw ConfigError(origin + ": 'case' applies only to advection1d");
    }
    if (spec.schemes.empty()) throw ConfigError(origin + ": no scheme given");
    const auto& allowed = known_schemes(spec.is_1d());
    for (const auto& s : spec.schemes) {
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            throw ConfigError(origin + ": scheme '" + s + "' is not available for this problem");
        }
    }
    if (spec.resolutions.empty()) throw ConfigError(origin + ": resolutions list is empty");
    for (auto n : spec.resolutions) {
        if (n < 2) throw ConfigError(origin + ": resolution must be at least 2 cells");
    }
    if (spec.r.empty()) throw ConfigError(origin + ": r list is empty");
    for (double r : spec.r) {
        if (!(r > 0.0)) throw ConfigError(origin + ": step multipliers must be positive");
    }
    for (double t : spec.report) {
        if (!(t >= 0.0)) throw ConfigError(origin + ": report times must be non-negative");
    }
    // Surfaces invalid parameter values (e.g. gamma <= 1) before any work starts.
    try {
        if (spec.is_1d()) {
            advection_catalog(spec.case_id, spec.parameters.count("alpha") ? spec.parameters.at("alpha") : 0.0);
        } else {
            const auto p = make_problem(spec.problem, spec.parameters);
            for (double t : spec.report) {
                if (t > p.terminal_time) throw ConfigError(origin + ": report time beyond T");
            }
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

/**
 * INI-style run description:
 *
 *   [problem]  name, gamma, lambda, case, alpha
 *   [run]      scheme, resolutions, r, report, timing_runs, fine_resolution, seed
 *   [output]   dir, fields
 *
 * Lists are comma separated; '#' and ';' start comments.
 */
inline RunSpec parse_config(std::istream& in, const std::string& source = "config") {
    RunSpec spec;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    bool have_resolutions = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        std::string line = raw;
        if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "problem" && section != "run" && section != "output") {
                throw ConfigError(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
        if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
        const std::string ctx = where + " (" + key + ")";

        if (section == "problem") {
            if (key == "name") {
                spec.problem = value;
            } else if (key == "gamma" || key == "lambda" || key == "alpha") {
                spec.parameters[key] = detail::to_double(value, ctx);
            } else if (key == "case") {
                spec.case_id = value;
            } else {
                throw ConfigError(where + ": unknown key '" + key + "' in [problem]");
            }
        } else if (section == "run") {
            if (key == "scheme" || key == "schemes") {
                spec.schemes = detail::split_list(value);
            } else if (key == "resolutions" || key == "resolution") {
                spec.resolutions.clear();
                for (const auto& s : detail::split_list(value)) spec.resolutions.push_back(detail::to_count(s, ctx));
                have_resolutions = true;
            } else if (key == "r") {
                spec.r.clear();
                for (const auto& s : detail::split_list(value)) spec.r.push_back(detail::to_double(s, ctx));
            } else if (key == "report") {
                spec.report.clear();
                for (const auto& s : detail::split_list(value)) spec.report.push_back(detail::to_double(s, ctx));
                spec.report_given = true;
            } else if (key == "timing_runs") {
                spec.timing_runs = detail::to_count(value, ctx);
            } else if (key == "fine_resolution") {
                spec.fine_resolution = detail::to_count(value, ctx);
            } else if (key == "seed") {
                spec.seed = detail::to_count(value, ctx);
            } else {
                throw ConfigError(where + ": unknown key '" + key + "' in [run]");
            }
        } else {
            if (key == "dir") {
                spec.out_dir = value;
            } else if (key == "fields") {
                spec.write_fields = detail::to_bool(value, ctx);
            } else {
                throw ConfigError(where + ": unknown key '" + key + "' in [output]");
            }
        }
    }
    if (!have_resolutions) throw ConfigError(source + ": [run] resolutions is required");
    validate(spec, source);
    return spec;
}

inline RunSpec parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

}  // namespace hjb
