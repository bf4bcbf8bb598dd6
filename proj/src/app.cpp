#include "sheath/app.hpp"

#include "sheath/diagnostics.hpp"
#include "sheath/errors.hpp"
#include "sheath/expansion.hpp"
#include "sheath/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sheath {

FluidState make_initial(const InitialData& spec, const Grid1D& grid) {
    const double L = grid.length();
    const double c = spec.center > 0.0 ? spec.center : 0.5 * L;
    const double w = spec.width > 0.0 ? spec.width : 0.1 * L;
    FluidState s;
    for (double x : grid.centers()) {
        const double b = spec.amplitude * std::exp(-std::pow((x - c) / w, 2));
        switch (spec.preset) {
            case Preset::flat:
                s.n.push_back(1.0);
                s.u.push_back(0.0);
                break;
            case Preset::bump:
                s.n.push_back(1.0 + b);
                s.u.push_back(0.0);
                break;
            case Preset::pulse:
                s.n.push_back(1.0);
                s.u.push_back(-b);
                break;
        }
    }
    return s;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

template <class F>
std::string render(F&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

StudyGrid grid_spec(const RunConfig& c) {
    StudyGrid g;
    g.first_cell_fraction = c.first_cell_fraction;
    g.ratio = c.grading_ratio;
    g.interior_width = c.interior_width;
    return g;
}

/// Layer-resolving grid for the full system; grading_ratio = 1 selects a uniform grid of `cells` cells.
Grid1D full_grid(const RunConfig& c) {
    if (c.grading_ratio == 1.0) return Grid1D::uniform(c.params.domain_length, c.cells);
    return study_grid(grid_spec(c), c.params.epsilon, c.params.domain_length);
}

LimitRun limit_for_expansion(const RunConfig& c) {
    const Grid1D g = Grid1D::uniform(c.params.domain_length, c.cells);
    LimitRunOptions o;
    o.cfl = c.cfl;
    o.t_end = c.t_end;
    o.intervals = c.samples * c.limit_substeps;
    return run_limit(make_initial(c.initial, g), g, c.params.bc, c.params.ion_temp, o);
}

std::string run_profile(const RunConfig& c, Files& files) {
    SheathParams sp;
    sp.gamma = c.gamma;
    sp.ion_temp = c.params.ion_temp;
    sp.wall_value = c.wall_value;
    sp.cells = c.profile_cells;
    const SheathProfile p = solve_leading_profile(sp);
    files.emplace_back("profile.csv", render([&](std::ostream& os) { write_profile_csv(os, p); }));
    return "profile: decay_rate=" + format_number(p.decay_rate) + " wall_slope=" + format_number(p.dphi.front()) +
           " z_max=" + format_number(p.z_max());
}

std::string run_limit_mode(const RunConfig& c, Files& files) {
    const Grid1D g = Grid1D::uniform(c.params.domain_length, c.cells);
    LimitRunOptions o;
    o.cfl = c.cfl;
    o.t_end = c.t_end;
    o.intervals = c.samples;
    const LimitRun run = run_limit(make_initial(c.initial, g), g, c.params.bc, c.params.ion_temp, o);
    files.emplace_back("limit.csv", render([&](std::ostream& os) { write_state_csv(os, run.samples.back(), g); }));
    files.emplace_back("limit_meta.txt", render([&](std::ostream& os) { write_limit_metadata(os, run); }));
    if (c.bundle_export) {
        const LimitRun fine = limit_for_expansion(c);
        const ExpansionBundle b = build_expansion(fine, c.params, c.expansion_order);
        const Grid1D fg = full_grid(c);
        for (int k = 0; k <= c.samples; ++k) {
            const double t = c.t_end * k / c.samples;
            std::ostringstream name;
            name << "bundle_" << (k < 10 ? "00" : k < 100 ? "0" : "") << k << ".csv";
            files.emplace_back(name.str(), render([&](std::ostream& os) { write_bundle_csv(os, b, t, fg); }));
        }
    }
    const BoundaryTrace tr = boundary_trace(run.samples.back(), g);
    return "limit: t_end=" + format_number(run.t_end()) + " gamma=" + format_number(tr.gamma) +
           " mass=" + format_number(run.samples.back().mass(g)) + " steps=" + std::to_string(run.steps);
}

std::string run_simulate(const RunConfig& c, Files& files, std::ostream& err) {
    const Grid1D g = full_grid(c);
    FullRunOptions o;
    o.cfl = c.cfl;
    o.t_end = c.t_end;
    o.intervals = c.samples;
    const FluidState s0 = make_initial(c.initial, g);
    const FullRun run = run_full(s0, c.params, g, o);
    const FullSample& last = run.samples.back();
    files.emplace_back("state.csv", render([&](std::ostream& os) { write_full_csv(os, last.state, last.field, g); }));
    files.emplace_back("energy.csv", render([&](std::ostream& os) { write_energy_csv(os, run); }));
    const double e0 = run.samples.front().energy.total;
    double drift = 0.0;
    for (const auto& s : run.samples) drift = std::max(drift, std::abs(s.energy.total - e0) / std::max(1.0, std::abs(e0)));
    if (run.velocity_warning) err << "warning: near-wall velocity exceeded sqrt(3 T)/2\n";
    return "simulate: max_relative_energy_drift=" + format_number(drift) +
           " mass_change=" + format_number(last.state.mass(g) - s0.mass(g)) +
           " outflow_mass=" + format_number(run.outflow_mass) + " steps=" + std::to_string(run.steps);
}

StudyConfig study_config(const RunConfig& c) {
    StudyConfig s;
    s.base = c.params;
    s.eps_list = c.eps_list;
    s.t_end = c.t_end;
    s.samples = c.samples;
    s.limit_grid = Grid1D::uniform(c.params.domain_length, c.cells);
    s.initial = make_initial(c.initial, s.limit_grid);
    s.limit_substeps = c.limit_substeps;
    s.order = c.expansion_order;
    s.grid = grid_spec(c);
    s.cfl = c.cfl;
    s.jobs = c.jobs;
    return s;
}

std::string run_converge(const RunConfig& c, Files& files) {
    const StudyResult r = run_convergence_study(study_config(c));
    if (!r.complete) throw SolverError("converge: " + r.failure);
    files.emplace_back("study.csv", render([&](std::ostream& os) { write_study_csv(os, r); }));
    files.emplace_back("fits.csv", render([&](std::ostream& os) { write_fits_csv(os, r); }));
    const RateFit& f = r.fits.front().second;
    return "converge: l2_n_slope=" + format_number(f.slope) + " r2=" + format_number(f.r_squared);
}

std::string run_entropy(const RunConfig& c, Files& files) {
    const LimitRun limit = limit_for_expansion(c);
    const ExpansionBundle b = build_expansion(limit, c.params, c.expansion_order);
    const Grid1D g = full_grid(c);
    const ApproxFields init = evaluate(b, 0.0, g);
    FluidState s0;
    s0.n = init.n;
    s0.u = init.u;
    FullRunOptions o;
    o.cfl = c.cfl;
    o.t_end = c.t_end;
    o.intervals = c.samples;
    const FullRun run = run_full(s0, c.params, g, o);
    std::ostringstream os;
    os.precision(17);
    os << "t,entropy\n";
    double hmax = 0.0, hmin = INFINITY;
    for (const auto& s : run.samples) {
        const ApproxFields a = evaluate(b, s.state.t, g);
        const double h = relative_entropy(s.state, s.field, a.n, a.u, c.params, g);
        hmax = std::max(hmax, h);
        hmin = std::min(hmin, h);
        os << s.state.t << ',' << h << '\n';
    }
    files.emplace_back("entropy.csv", os.str());
    return "entropy: sup=" + format_number(hmax) + " min=" + format_number(hmin);
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
    for (const ConfigError& e : validate_config(config)) {
        err << "error: " << e.str() << '\n';
        return 1;
    }
    Files files;
    std::string summary;
    try {
        switch (config.mode) {
            case Mode::profile: summary = run_profile(config, files); break;
            case Mode::limit: summary = run_limit_mode(config, files); break;
            case Mode::simulate: summary = run_simulate(config, files, err); break;
            case Mode::converge: summary = run_converge(config, files); break;
            case Mode::entropy: summary = run_entropy(config, files); break;
        }
        std::filesystem::create_directories(config.output_dir);
        for (const auto& [name, content] : files) write_atomic(std::filesystem::path(config.output_dir) / name, content);
    } catch (const std::invalid_argument& e) {
        err << "error: " << mode_name(config.mode) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << mode_name(config.mode) << ": " << e.what() << '\n';
        return 2;
    }
    out << summary << '\n';
    return 0;
}

}  // namespace sheath
