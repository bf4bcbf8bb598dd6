#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sheath/app.hpp"
#include "sheath/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sheath;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("sheath_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

bool has_error(const ConfigResult& r, int line, const std::string& message) {
    for (const auto& e : r.errors) {
        if (e.line == line && e.message == message) return true;
    }
    return false;
}

RunConfig parsed(const std::string& text) {
    ConfigResult r = parse_config(text);
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors.front().str()));
    return r.config;
}

}  // namespace

TEST_CASE("minimal profile config takes the documented defaults") {
    const RunConfig c = parsed("mode = profile\nion_temp = 1\ngamma = 1\nwall_value = 1\n");
    CHECK(c.mode == Mode::profile);
    CHECK(c.gamma == 1.0);
    CHECK(c.wall_value == 1.0);
    CHECK(c.params.ion_temp == 1.0);
    CHECK(c.params.epsilon == 0.05);
    CHECK(c.params.domain_length == 1.0);
    CHECK(c.params.bc.kind == BoundaryKind::wall);
    CHECK(c.profile_cells == 4096);
    CHECK(c.cfl == 0.4);
    CHECK(c.t_end == 0.2);
    CHECK(c.expansion_order == 1);
    CHECK(c.initial.preset == Preset::bump);
    CHECK(c.initial.amplitude == 0.1);
    CHECK(c.output_dir == ".");
}

TEST_CASE("comments, spacing and list values") {
    const RunConfig c = parsed("# study\nmode=converge   # inline\n  eps_list = 0.04, 0.02 ,0.01\njobs = 3\npreset = pulse\n");
    CHECK(c.eps_list == std::vector<double>{0.04, 0.02, 0.01});
    CHECK(c.jobs == 3);
    CHECK(c.initial.preset == Preset::pulse);
}

TEST_CASE("negative epsilon is reported with its line number") {
    const ConfigResult r = parse_config("mode = simulate\nepsilon = -0.1\n");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, 2, "epsilon: must be in (0,1]"));
    CHECK(r.errors.front().str() == "line 2: epsilon: must be in (0,1]");
}

TEST_CASE("converge mode needs eps_list") {
    const ConfigResult r = parse_config("mode = converge\n");
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors.front().message.find("eps_list") != std::string::npos);
}

TEST_CASE("all errors are collected, each on its own line") {
    const ConfigResult r = parse_config("mode = converge\ncolour = red\ncfl = fast\nepsilon = 2\nmode = limit\neps_list = 0.01, 0.02, 0.04\n");
    CHECK(has_error(r, 2, "unknown key 'colour'"));
    CHECK(has_error(r, 4, "epsilon: must be in (0,1]"));
    CHECK(has_error(r, 6, "eps_list: values must be strictly decreasing"));
    bool type_error = false, duplicate = false;
    for (const auto& e : r.errors) {
        type_error |= e.line == 3 && e.message.rfind("cfl:", 0) == 0;
        duplicate |= e.line == 5 && e.message.find("duplicate") != std::string::npos;
    }
    CHECK(type_error);
    CHECK(duplicate);
}

TEST_CASE("missing mode and malformed lines") {
    const ConfigResult r = parse_config("epsilon 0.1\n");
    CHECK(has_error(r, 1, "expected `key = value`"));
    CHECK(has_error(r, 0, "mode: required key missing"));
}

TEST_CASE("outflow velocity window depends on the mode") {
    CHECK(parse_config("mode = limit\nbc = outflow\nu_b = -1.2\n").ok());
    CHECK_FALSE(parse_config("mode = simulate\nbc = outflow\nu_b = -1.2\n").ok());
    CHECK_FALSE(parse_config("mode = entropy\nbc = outflow\nu_b = -0.3\n").ok());
}

TEST_CASE("presets sample the documented shapes") {
    const Grid1D g = Grid1D::uniform(1.0, 100);
    InitialData bump;
    const FluidState b = make_initial(bump, g);
    const auto& x = g.centers();
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(b.n[i] == doctest::Approx(1.0 + 0.1 * std::exp(-std::pow((x[i] - 0.5) / 0.1, 2))).epsilon(1e-14));
        CHECK(b.u[i] == 0.0);
    }
    InitialData pulse{Preset::pulse, 0.2, 0.3, 0.05};
    const FluidState p = make_initial(pulse, g);
    CHECK(p.n[29] == 1.0);
    CHECK(p.u[30] == doctest::Approx(-0.2 * std::exp(-std::pow((x[30] - 0.3) / 0.05, 2))));
    const FluidState f = make_initial({Preset::flat, 0.1, 0, 0}, g);
    CHECK(f.n[50] == 1.0);
}

TEST_CASE("format_number keeps 17 significant digits") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("profile dispatch writes profile.csv and prints the decay rate") {
    const fs::path d = fresh_dir("profile");
    RunConfig c = parsed("mode = profile\nion_temp = 1\ngamma = 1\nwall_value = 1\nprofile_cells = 512\n");
    c.output_dir = d.string();
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == 0);
    CHECK(out.str().rfind("profile: decay_rate=1.414213562373095", 0) == 0);
    CHECK(slurp(d / "profile.csv").rfind("z,phi,dphi,n_layer\n", 0) == 0);
    for (const auto& e : fs::directory_iterator(d)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("simulate dispatch is deterministic and reports the energy drift") {
    const std::string text = "mode = simulate\nepsilon = 0.05\ncells = 64\ngrading_ratio = 1\nt_end = 0.05\nsamples = 5\n";
    std::string first, second;
    for (std::string* dst : {&first, &second}) {
        const fs::path d = fresh_dir("simulate");
        RunConfig c = parsed(text);
        c.output_dir = d.string();
        std::ostringstream out, err;
        REQUIRE(dispatch(c, out, err) == 0);
        CHECK(out.str().find("max_relative_energy_drift=") != std::string::npos);
        *dst = slurp(d / "state.csv") + slurp(d / "energy.csv");
        CHECK(slurp(d / "energy.csv").rfind("t,kinetic,ion_entropy,electron_term,field_term,total\n", 0) == 0);
    }
    CHECK(first == second);
}

TEST_CASE("converge dispatch writes the study and the fits") {
    const fs::path d = fresh_dir("converge");
    RunConfig c = parsed("mode = converge\neps_list = 0.04, 0.02, 0.01\ncells = 200\nt_end = 0.05\nsamples = 2\n"
                         "limit_substeps = 4\ninterior_width = 0.01\njobs = 2\n");
    c.output_dir = d.string();
    std::ostringstream out, err;
    REQUIRE(dispatch(c, out, err) == 0);
    CHECK(out.str().rfind("converge: l2_n_slope=", 0) == 0);
    CHECK(fs::exists(d / "study.csv"));
    CHECK(fs::exists(d / "fits.csv"));
}

TEST_CASE("solver failure exits with 2 and leaves no files") {
    const fs::path d = fresh_dir("failure");
    RunConfig c = parsed("mode = limit\npreset = pulse\namplitude = -200\nwidth = 10\nion_temp = 0\ncells = 64\n");
    c.output_dir = d.string();
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == 2);
    CHECK(err.str().rfind("error: limit: ", 0) == 0);
    CHECK(fs::is_empty(d));
}

TEST_CASE("invalid config handed to dispatch exits with 1") {
    RunConfig c;
    c.mode = Mode::simulate;
    c.params.epsilon = 0.0;
    std::ostringstream out, err;
    CHECK(dispatch(c, out, err) == 1);
    CHECK(out.str().empty());
}
