#include "sheath/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sheath {

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::profile: return "profile";
        case Mode::limit: return "limit";
        case Mode::simulate: return "simulate";
        case Mode::converge: return "converge";
        case Mode::entropy: return "entropy";
    }
    return "?";
}

std::string ConfigError::str() const {
    return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
    s = trim(s);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && ec == std::errc() && p == s.data() + s.size();
}

using Setter = std::function<std::string(RunConfig&, std::string_view)>;

Setter number(double RunConfig::*field) {
    return [field](RunConfig& c, std::string_view v) -> std::string {
        if (!parse_double(v, c.*field)) return "expected a number";
        return {};
    };
}

Setter param_number(double PlasmaParams::*field) {
    return [field](RunConfig& c, std::string_view v) -> std::string {
        if (!parse_double(v, c.params.*field)) return "expected a number";
        return {};
    };
}

Setter integer(int RunConfig::*field) {
    return [field](RunConfig& c, std::string_view v) -> std::string {
        if (!parse_int(v, c.*field)) return "expected an integer";
        return {};
    };
}

Setter initial_number(double InitialData::*field) {
    return [field](RunConfig& c, std::string_view v) -> std::string {
        if (!parse_double(v, c.initial.*field)) return "expected a number";
        return {};
    };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"mode",
         [](RunConfig& c, std::string_view v) -> std::string {
             static const std::map<std::string, Mode, std::less<>> modes = {{"profile", Mode::profile},
                                                                            {"limit", Mode::limit},
                                                                            {"simulate", Mode::simulate},
                                                                            {"converge", Mode::converge},
                                                                            {"entropy", Mode::entropy}};
             const auto it = modes.find(v);
             if (it == modes.end()) return "expected one of profile, limit, simulate, converge, entropy";
             c.mode = it->second;
             return {};
         }},
        {"ion_temp", param_number(&PlasmaParams::ion_temp)},
        {"epsilon", param_number(&PlasmaParams::epsilon)},
        {"wall_potential", param_number(&PlasmaParams::wall_potential)},
        {"domain_length", param_number(&PlasmaParams::domain_length)},
        {"bc",
         [](RunConfig& c, std::string_view v) -> std::string {
             if (v == "wall") {
                 c.params.bc.kind = BoundaryKind::wall;
             } else if (v == "outflow") {
                 c.params.bc.kind = BoundaryKind::outflow;
             } else {
                 return "expected wall or outflow";
             }
             return {};
         }},
        {"u_b",
         [](RunConfig& c, std::string_view v) -> std::string {
             if (!parse_double(v, c.params.bc.u_b)) return "expected a number";
             return {};
         }},
        {"gamma", number(&RunConfig::gamma)},
        {"wall_value", number(&RunConfig::wall_value)},
        {"profile_cells", integer(&RunConfig::profile_cells)},
        {"cells", integer(&RunConfig::cells)},
        {"grading_ratio", number(&RunConfig::grading_ratio)},
        {"first_cell_fraction", number(&RunConfig::first_cell_fraction)},
        {"interior_width", number(&RunConfig::interior_width)},
        {"cfl", number(&RunConfig::cfl)},
        {"t_end", number(&RunConfig::t_end)},
        {"samples", integer(&RunConfig::samples)},
        {"limit_substeps", integer(&RunConfig::limit_substeps)},
        {"eps_list",
         [](RunConfig& c, std::string_view v) -> std::string {
             c.eps_list.clear();
             std::string_view rest = v;
             while (!rest.empty()) {
                 const auto comma = rest.find(',');
                 double e = 0.0;
                 if (!parse_double(rest.substr(0, comma), e)) return "expected a comma-separated list of numbers";
                 c.eps_list.push_back(e);
                 if (comma == std::string_view::npos) break;
                 rest.remove_prefix(comma + 1);
             }
             return {};
         }},
        {"expansion_order", integer(&RunConfig::expansion_order)},
        {"jobs", integer(&RunConfig::jobs)},
        {"bundle_export",
         [](RunConfig& c, std::string_view v) -> std::string {
             if (v == "true") {
                 c.bundle_export = true;
             } else if (v == "false") {
                 c.bundle_export = false;
             } else {
                 return "expected true or false";
             }
             return {};
         }},
        {"preset",
         [](RunConfig& c, std::string_view v) -> std::string {
             if (v == "flat") {
                 c.initial.preset = Preset::flat;
             } else if (v == "bump") {
                 c.initial.preset = Preset::bump;
             } else if (v == "pulse") {
                 c.initial.preset = Preset::pulse;
             } else {
                 return "expected flat, bump or pulse";
             }
             return {};
         }},
        {"amplitude", initial_number(&InitialData::amplitude)},
        {"center", initial_number(&InitialData::center)},
        {"width", initial_number(&InitialData::width)},
        {"output_dir",
         [](RunConfig& c, std::string_view v) -> std::string {
             if (v.empty()) return "expected a path";
             c.output_dir = std::string(v);
             return {};
         }},
    };
    return table;
}

}  // namespace

std::vector<ConfigError> validate_config(const RunConfig& c) {
    std::vector<ConfigError> errs;
    auto add = [&](std::string msg) { errs.push_back({0, std::move(msg)}); };
    if (c.mode == Mode::profile) {
        if (!(c.gamma > 0.0)) add("gamma: must be positive");
        if (!(c.params.ion_temp > 0.0)) add("ion_temp: must be positive");
        if (c.profile_cells < 16) add("profile_cells: must be at least 16");
        if (c.params.ion_temp > 0.0 && !(std::abs(c.wall_value) / std::min(1.0, c.params.ion_temp) <= 40.0)) {
            add("wall_value: out of supported range (|wall_value| / min(1, ion_temp) <= 40)");
        }
    } else {
        if (c.mode == Mode::limit) {
            if (!(c.params.ion_temp >= 0.0)) add("ion_temp: must be nonnegative");
            if (!(c.params.domain_length > 0.0)) add("domain_length: must be positive");
            try {
                c.params.bc.validate(std::sqrt(c.params.ion_temp + 1.0));
            } catch (const std::invalid_argument& e) {
                add(std::string("u_b: ") + e.what());
            }
        } else {
            try {
                c.params.validate();
            } catch (const std::invalid_argument& e) {
                const std::string m = e.what();
                add(m.rfind("boundary:", 0) == 0 ? "u_b: " + m : m);
            }
        }
        if (c.cells < 16) add("cells: must be at least 16");
        if (!(c.cfl > 0.0 && c.cfl < 1.0)) add("cfl: must be in (0,1)");
        if (!(c.t_end > 0.0)) add("t_end: must be positive");
        if (c.samples < 1) add("samples: must be at least 1");
        if (c.limit_substeps < 1) add("limit_substeps: must be at least 1");
        if (!(c.grading_ratio >= 1.0 && c.grading_ratio <= 1.2)) add("grading_ratio: must be in [1,1.2]");
        if (!(c.first_cell_fraction > 0.0 && c.first_cell_fraction <= 0.125)) {
            add("first_cell_fraction: must be in (0,1/8]");
        }
        if (!(c.interior_width > 0.0)) add("interior_width: must be positive");
        if (c.expansion_order != 0 && c.expansion_order != 1) add("expansion_order: must be 0 or 1");
        if (c.jobs < 1) add("jobs: must be at least 1");
        if (c.initial.preset == Preset::bump && !(c.initial.amplitude > -1.0)) add("amplitude: must exceed -1 for the bump preset");
        if (!(c.initial.center >= 0.0)) add("center: must be nonnegative");
        if (!(c.initial.width >= 0.0)) add("width: must be nonnegative");
        const bool expansion = c.mode == Mode::converge || c.mode == Mode::entropy || (c.mode == Mode::limit && c.bundle_export);
        if (expansion && c.params.bc.kind != BoundaryKind::wall) add("bc: the expansion requires bc = wall");
        if (c.mode == Mode::converge) {
            if (c.grading_ratio == 1.0) add("grading_ratio: converge needs a graded grid (ratio > 1)");
            if (c.eps_list.empty()) {
                add("eps_list: required when mode = converge");
            } else {
                if (c.eps_list.size() < 3) add("eps_list: at least 3 values required");
                for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
                    if (!(c.eps_list[i] > 0.0 && c.eps_list[i] <= 1.0)) add("eps_list: values must be in (0,1]");
                    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) add("eps_list: values must be strictly decreasing");
                    if (!(c.params.domain_length >= 20.0 * c.eps_list[i])) {
                        add("eps_list: every value must satisfy domain_length >= 20*epsilon");
                    }
                }
            }
        }
    }
    const std::filesystem::path out(c.output_dir);
    const std::filesystem::path parent = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    if (std::filesystem::exists(out, ec) ? !std::filesystem::is_directory(out, ec) : !std::filesystem::is_directory(parent, ec)) {
        add("output_dir: not a directory and its parent does not exist");
    }
    // collapse duplicates
    std::vector<ConfigError> unique;
    for (auto& e : errs) {
        if (std::none_of(unique.begin(), unique.end(), [&](const ConfigError& u) { return u.message == e.message; })) {
            unique.push_back(std::move(e));
        }
    }
    return unique;
}

ConfigResult parse_config(std::string_view text) {
    ConfigResult r;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            r.errors.push_back({line_no, "expected `key = value`"});
            continue;
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = table.find(key);
        if (it == table.end()) {
            r.errors.push_back({line_no, "unknown key '" + std::string(key) + "'"});
            continue;
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            r.errors.push_back({line_no, std::string(key) + ": duplicate key (first set on line " +
                                             std::to_string(prev->second) + ")"});
            continue;
        }
        seen.emplace(std::string(key), line_no);
        if (const std::string msg = it->second(r.config, value); !msg.empty()) {
            r.errors.push_back({line_no, std::string(key) + ": " + msg});
        }
    }
    if (!seen.contains("mode")) r.errors.push_back({0, "mode: required key missing"});
    if (!seen.contains("mode")) return r;
    for (ConfigError e : validate_config(r.config)) {
        const std::string key = e.message.substr(0, e.message.find(':'));
        if (const auto s = seen.find(key); s != seen.end()) e.line = s->second;
        r.errors.push_back(std::move(e));
    }
    return r;
}

}  // namespace sheath
