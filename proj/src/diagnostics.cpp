#include "sheath/diagnostics.hpp"

#include "sheath/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sheath {

double relative_entropy(const FluidState& state, const PotentialField& field, std::span<const double> n_app,
                        std::span<const double> u_app, const PlasmaParams& params, const Grid1D& grid) {
    const std::size_t N = static_cast<std::size_t>(grid.cells());
    if (state.size() != N || n_app.size() != N || u_app.size() != N || field.phi.size() != N + 2) {
        throw std::invalid_argument("relative entropy: size mismatch");
    }
    const double e2 = params.epsilon * params.epsilon;
    double h = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double n = state.n[i], na = n_app[i];
        if (!(n > 0.0) || !(na > 0.0)) throw SolverError("relative entropy: nonpositive density");
        const double w = grid.width(static_cast<int>(i));
        const double du = state.u[i] - u_app[i];
        const double ne = std::exp(-field.phi[i + 1]);
        const double d = field.dphi[i + 1];
        // Bregman forms n log(n/m) - n + m, each nonnegative pointwise
        const double ion = n * std::log(n / na) - n + na;
        const double electron = ne * std::log(ne / na) - ne + na;
        h += (0.5 * n * du * du + params.ion_temp * ion + electron + 0.5 * e2 * d * d) * w;
    }
    return h;
}

NormPair discrete_norms(std::span<const double> a, std::span<const double> b, const Grid1D& grid) {
    const std::size_t N = static_cast<std::size_t>(grid.cells());
    if (a.size() != N || b.size() != N) throw std::invalid_argument("norms: field/grid size mismatch");
    NormPair p;
    for (std::size_t i = 0; i < N; ++i) {
        const double d = std::abs(a[i] - b[i]);
        p.l2 += d * d * grid.width(static_cast<int>(i));
        p.linf = std::max(p.linf, d);
    }
    p.l2 = std::sqrt(p.l2);
    return p;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    RateFit fit;
    std::vector<double> xs, ys;
    for (const auto& [eps, err] : points) {
        if (!(eps > 0.0)) throw std::invalid_argument("fit: epsilon must be positive");
        for (double x : xs) {
            if (std::log(eps) == x) throw std::invalid_argument("fit: duplicated epsilon");
        }
        if (!(err >= 1e-14) || !std::isfinite(err)) {
            std::ostringstream os;
            os << "dropped point epsilon=" << eps << " with error " << err << " below round-off floor";
            fit.warnings.push_back(os.str());
            continue;
        }
        xs.push_back(std::log(eps));
        ys.push_back(std::log(err));
    }
    if (xs.size() < 3) throw std::invalid_argument("fit: at least 3 usable points required");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.points = static_cast<int>(xs.size());
    return fit;
}

Grid1D study_grid(const StudyGrid& spec, double epsilon, double length) {
    const double first = spec.first_cell_fraction * epsilon;
    return Grid1D::geometric(length, first, spec.ratio, std::max(first, spec.interior_width));
}

std::vector<std::string> study_columns() {
    return {"l2_n", "l2_u", "linf_n_bl", "linf_phi_bl", "entropy_sup"};
}

double study_value(const ErrorRecord& r, const std::string& column) {
    if (column == "l2_n") return r.l2_n_vs_limit;
    if (column == "l2_u") return r.l2_u_vs_limit;
    if (column == "linf_n_bl") return r.linf_n_vs_bundle;
    if (column == "linf_phi_bl") return r.linf_phi_vs_bundle;
    if (column == "entropy_sup") return r.entropy_sup;
    throw std::invalid_argument("study: unknown column " + column);
}

ErrorRecord study_single(const StudyConfig& config, const ExpansionBundle& bundle, double epsilon) {
    PlasmaParams params = config.base;
    params.epsilon = epsilon;
    params.validate();
    const Grid1D grid = study_grid(config.grid, epsilon, params.domain_length);
    const ExpansionBundle full = bundle.with_epsilon(epsilon);
    const ExpansionBundle leading = full.with_order(0);

    const ApproxFields init = evaluate(full, 0.0, grid);
    FluidState s0;
    s0.n = init.n;
    s0.u = init.u;

    ErrorRecord rec;
    rec.epsilon = epsilon;
    rec.cells = grid.cells();
    rec.entropy_min = INFINITY;
    FullRunOptions opts;
    opts.cfl = config.cfl;
    opts.t_end = config.t_end;
    opts.intervals = config.samples;
    const FullRun run = run_full(s0, params, grid, opts);
    rec.steps = run.steps;
    const double e0 = run.samples.front().energy.total;
    for (const FullSample& smp : run.samples) {
        const double t = smp.state.t;
        const FluidState limit = interior_at(full, t, grid.centers());
        const ApproxFields lead = evaluate(leading, t, grid);
        const ApproxFields app = full.order == 0 ? lead : evaluate(full, t, grid);
        rec.l2_n_vs_limit = std::max(rec.l2_n_vs_limit, discrete_norms(smp.state.n, limit.n, grid).l2);
        rec.l2_u_vs_limit = std::max(rec.l2_u_vs_limit, discrete_norms(smp.state.u, limit.u, grid).l2);
        rec.linf_n_vs_bundle = std::max(rec.linf_n_vs_bundle, discrete_norms(smp.state.n, lead.n, grid).linf);
        const std::span<const double> phi(smp.field.phi.data() + 1, grid.centers().size());
        rec.linf_phi_vs_bundle = std::max(rec.linf_phi_vs_bundle, discrete_norms(phi, lead.phi, grid).linf);
        const double h = relative_entropy(smp.state, smp.field, app.n, app.u, params, grid);
        rec.entropy_sup = std::max(rec.entropy_sup, h);
        rec.entropy_min = std::min(rec.entropy_min, h);
        rec.energy_drift = std::max(rec.energy_drift, std::abs(smp.energy.total - e0) / std::max(1.0, std::abs(e0)));
    }
    return rec;
}

StudyResult run_convergence_study(const StudyConfig& config) {
    if (config.eps_list.size() < 3) throw std::invalid_argument("eps_list: at least 3 values required");
    for (std::size_t i = 1; i < config.eps_list.size(); ++i) {
        if (!(config.eps_list[i] < config.eps_list[i - 1])) {
            throw std::invalid_argument("eps_list: values must be strictly decreasing");
        }
    }
    if (config.samples < 1 || config.limit_substeps < 1) throw std::invalid_argument("study: sampling counts must be positive");

    LimitRunOptions lopt;
    lopt.cfl = config.cfl;
    lopt.t_end = config.t_end;
    lopt.intervals = config.samples * config.limit_substeps;
    const LimitRun limit = run_limit(config.initial, config.limit_grid, config.base.bc, config.base.ion_temp, lopt);
    PlasmaParams p = config.base;
    p.epsilon = config.eps_list.front();
    const ExpansionBundle bundle = build_expansion(limit, p, config.order);

    const std::size_t E = config.eps_list.size();
    std::vector<ErrorRecord> slots(E);
    std::vector<std::string> errors(E);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < E; i = next++) {
            try {
                slots[i] = study_single(config, bundle, config.eps_list[i]);
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "epsilon=" << config.eps_list[i] << ": " << e.what();
                errors[i] = os.str();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, config.jobs)), 1, E);
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    StudyResult result;
    for (std::size_t i = 0; i < E; ++i) {
        if (errors[i].empty()) {
            result.records.push_back(slots[i]);
        } else if (result.complete) {
            result.complete = false;
            result.failure = errors[i];
        }
    }
    if (!result.complete) return result;
    for (const std::string& col : study_columns()) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : result.records) pts.emplace_back(r.epsilon, study_value(r, col));
        try {
            result.fits.emplace_back(col, fit_rate(pts));
        } catch (const std::invalid_argument& e) {
            RateFit bad;
            bad.slope = bad.intercept = bad.r_squared = NAN;
            bad.warnings.push_back(e.what());
            result.fits.emplace_back(col, bad);
        }
    }
    return result;
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
    out.precision(17);
    out << "epsilon,l2_n,l2_u,linf_n_bl,linf_phi_bl,entropy_sup\n";
    for (const auto& r : result.records) {
        out << r.epsilon << ',' << r.l2_n_vs_limit << ',' << r.l2_u_vs_limit << ',' << r.linf_n_vs_bundle << ','
            << r.linf_phi_vs_bundle << ',' << r.entropy_sup << '\n';
    }
}

void write_fits_csv(std::ostream& out, const StudyResult& result) {
    out.precision(17);
    out << "column,slope,intercept,r2\n";
    for (const auto& [col, f] : result.fits) out << col << ',' << f.slope << ',' << f.intercept << ',' << f.r_squared << '\n';
}

}  // namespace sheath
