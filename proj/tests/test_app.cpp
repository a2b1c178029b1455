#include "doctest.h"
#include "oracles.hpp"

#include "rfct/app.hpp"
#include "rfct/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace rfct;

namespace {

const char* kColumn = R"(
[problem]
name = column

[mesh]
type = interval
length = 100 cm
elements = 20

[materials.default]
model = van_genuchten
alpha = 0.0335 1/cm
n = 2
theta_r = 0.102
theta_s = 0.368
ks = 0.33195833333333336 m/h

[bc.top]
type = dirichlet
value = -75 cm

[bc.bottom]
type = neumann
value = 0 cm/day

[ic]
type = uniform
psi = -1000 cm

[time]
dt_init = 1.44 min
dt_max = 60 min
t_end = 2 h

[output]
times = 60 min
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string csv_of(const RunResult& r) {
    std::ostringstream s;
    write_csv_profile(r, s);
    return s.str();
}

std::string jsonl_of(const RunResult& r) {
    std::ostringstream s;
    write_diagnostics_jsonl(r, s);
    return s.str();
}

std::string vtk_of(const RunResult& r, std::size_t k) {
    std::ostringstream s;
    write_vtk_field(r, k, s);
    return s.str();
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("builtin registry") {
    CHECK(builtin_names() == std::vector<std::string>{"celia", "hydrus_column", "szymkiewicz", "tracy2d",
                                                      "rain_garden", "bioswale2d"});
    CHECK(builtin_problems().size() == 6);
    CHECK_THROWS_AS(builtin_problem("hydrus3d"), ConfigError);

    const auto celia = builtin_problem("celia");
    const auto& vg = celia.materials.at("default");
    CHECK(vg.retention().alpha == 3.35);
    CHECK(vg.retention().n == 2.0);
    CHECK(vg.theta_r() == 0.102);
    CHECK(vg.theta_s() == 0.368);
    CHECK(vg.ks().xx == 7.967);
    CHECK(celia.boundary.at("top").value == -0.75);
    CHECK(celia.initial.psi == -10.0);

    const auto bio = builtin_problem("bioswale2d");
    const auto& root = bio.materials.at("root_zone");
    CHECK(root.ks().xx == 5.0);
    CHECK(root.ks().zz == 5.0);
    CHECK(root.retention().n == 2.4);
    CHECK(root.retention().alpha == 8.0);
    CHECK(bio.initial.psi == -3.0);
    CHECK(bio.boundary.at("pipe").kind == BoundaryKind::Seepage);

    const auto hydrus = builtin_problem("hydrus_column");
    CHECK(hydrus.materials.at("default").retention().m == 0.627);
    CHECK(hydrus.mesh.length == 20.0);

    const auto sz = builtin_problem("szymkiewicz");
    CHECK(sz.time.t_end == doctest::Approx(0.15 / 24.0));
    CHECK(sz.boundary.at("top").value == doctest::Approx(-0.075));
    CHECK(sz.boundary.at("bottom").value == doctest::Approx(-7.5));

    for (const auto& [name, spec] : builtin_problems()) {
        CAPTURE(name);
        CHECK_NOTHROW(spec.validate());
    }
}

TEST_CASE("config round trip for every builtin") {
    for (const auto& [name, spec] : builtin_problems()) {
        CAPTURE(name);
        const auto text = serialize_problem(spec);
        const auto back = parse_problem_string(text);
        CHECK(back == spec);
        CHECK(serialize_problem(back) == text);
    }
}

TEST_CASE("units are normalized to metres and days") {
    const auto s = parse_problem_string(kColumn);
    CHECK(s.mesh.length == doctest::Approx(1.0));
    CHECK(s.materials.at("default").retention().alpha == doctest::Approx(3.35));
    CHECK(s.materials.at("default").ks().xx == doctest::Approx(7.967));
    CHECK(s.boundary.at("top").value == doctest::Approx(-0.75));
    CHECK(s.initial.psi == doctest::Approx(-10.0));
    CHECK(s.time.dt_init == doctest::Approx(1e-3));
    CHECK(s.time.t_end == doctest::Approx(2.0 / 24.0));
    REQUIRE(s.output.times.size() == 1);
    CHECK(s.output.times[0] == doctest::Approx(1.0 / 24.0));
    CHECK(s.materials.at("default").retention().m == doctest::Approx(0.5));

    const auto t = parse_time_list("30 s, 2 h,0.5 day");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == doctest::Approx(30.0 / 86400.0));
    CHECK(t[1] == doctest::Approx(2.0 / 24.0));
    CHECK(t[2] == 0.5);
}

TEST_CASE("config errors") {
    auto with = [](const std::string& from, const std::string& to) {
        std::string text = kColumn;
        text.replace(text.find(from), from.size(), to);
        return text;
    };
    CHECK_THROWS_AS(parse_problem_string(with("-75 cm", "-75 furlongs")), ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("-75 cm", "-75 m/day")), ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("elements = 20", "elements = 20\ncolour = red")),
                    ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("[ic]", "[initial]")), ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("type = dirichlet", "type = robin")), ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("[time]", "[time]\ntheta = 0.5")), ConfigError);
    CHECK_THROWS_AS(parse_problem_string(with("times = 60 min", "times = 3 h")), ConfigError);
    try {
        parse_problem_string(with("[mesh]", "[mesh\n"));
        FAIL("expected a syntax error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.cfg"), ConfigError);
}

TEST_CASE("shipped problem files reproduce the builtins") {
    const std::filesystem::path dir = std::filesystem::path(RFCT_SOURCE_DIR) / "problems";
    REQUIRE(std::filesystem::is_directory(dir));
    for (const auto& name : builtin_names()) {
        CAPTURE(name);
        const auto path = dir / (name + ".cfg");
        REQUIRE(std::filesystem::exists(path));
        const auto loaded = load_problem(path.string());
        auto builtin = builtin_problem(name);
        CHECK(build_mesh(loaded.mesh) == build_mesh(builtin.mesh));
        builtin.mesh = loaded.mesh;
        CHECK(loaded == builtin);
    }
}

TEST_CASE("writers") {
    RunResult r;
    r.name = "pair";
    r.scheme = Scheme::LowOrder;
    r.mesh = generate_interval_mesh(1.0, 1);
    r.snapshots.push_back({0.25, {-1.0, -0.5}, {0.11, 0.2}, {0.01, 0.1}});

    const auto csv = csv_of(r);
    std::istringstream lines(csv);
    std::vector<std::string> rows;
    for (std::string l; std::getline(lines, l);) rows.push_back(l);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "t,node,x,psi,theta,kr");
    CHECK(rows[1] == "0.25,0,0,-1,0.11,0.01");
    CHECK(rows[2] == "0.25,1,1,-0.5,0.2,0.1");

    const auto vtk = vtk_of(r, 0);
    CHECK(vtk.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(vtk.find("SCALARS psi double 1") != std::string::npos);
    CHECK_THROWS_AS(vtk_of(r, 1), std::out_of_range);

    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-10.0) == "-10");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("runs are deterministic and log every step") {
    auto spec = builtin_problem("tracy2d");
    spec.output.vtk = true;
    const auto a = run(spec);
    const auto b = run(spec);
    CHECK(a.steps.size() == 8);
    REQUIRE(a.snapshots.size() == 4);
    CHECK(a.snapshots.front().t == 0.0);
    CHECK(a.snapshots.back().t == doctest::Approx(5e-4));
    CHECK(csv_of(a) == csv_of(b));
    CHECK(jsonl_of(a) == jsonl_of(b));
    CHECK(vtk_of(a, 2) == vtk_of(b, 2));
    CHECK(vtk_of(a, 3).rfind("# vtk DataFile Version 3.0", 0) == 0);

    const auto dir = std::filesystem::temp_directory_path() / "rfct_writer_test";
    std::filesystem::remove_all(dir);
    const auto files = write_outputs(spec, a, dir.string());
    CHECK(files.size() == 1 + 4 + 1);
    CHECK(slurp(dir / "tracy2d_fct.csv") == csv_of(a));
    CHECK(std::filesystem::exists(dir / "tracy2d_fct_0003.vtk"));
    std::filesystem::remove_all(dir);

    // Mass audit from the log alone.
    const auto log = jsonl_of(a);
    std::istringstream in(log);
    CHECK(audit_mass_balance(in, 10 * spec.newton.abs_tol) == 0);
    std::istringstream line(log.substr(0, log.find('\n')));
    const auto rec = nlohmann::json::parse(line.str());
    CHECK(rec.contains("fct_conservation"));
    CHECK(rec["dt"].get<double>() == doctest::Approx(6.25e-5));

    auto tampered = nlohmann::json::parse(line.str());
    tampered["mass_balance"] = 1e-3;
    std::istringstream bad(log + tampered.dump() + "\n");
    CHECK(audit_mass_balance(bad, 10 * spec.newton.abs_tol) == 1);
}

TEST_CASE("observer sees every accepted step") {
    auto spec = builtin_problem("tracy2d");
    spec.time.t_end = 2 * spec.time.dt_init;
    spec.output.times = {};
    int calls = 0;
    const auto r = run(spec, [&](const Discretization& d, const SimulationState& s, const StepDiagnostics& diag) {
        ++calls;
        CHECK(s.psi.size() == static_cast<std::size_t>(d.num_nodes()));
        CHECK(diag.t == s.t);
    });
    CHECK(calls == 2);
    CHECK(r.steps.size() == 2);
    CHECK(r.dt_history() == std::vector<double>{spec.time.dt_init, spec.time.dt_init});
}

TEST_CASE("celia low-order heads stay within the boundary and initial data") {
    auto spec = builtin_problem("celia");
    spec.scheme = Scheme::LowOrder;
    spec.time.t_end = 0.1;
    spec.output.times = {};
    double lo = 0.0, hi = -100.0;
    run(spec, [&](const Discretization&, const SimulationState& s, const StepDiagnostics&) {
        for (double p : s.psi) {
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
    });
    CHECK(lo >= -10.0 - 1e-9);
    CHECK(hi <= -0.75 + 1e-9);
}

TEST_CASE("Galerkin on the Szymkiewicz column fails or leaves the data range") {
    auto spec = builtin_problem("szymkiewicz");
    spec.scheme = Scheme::Galerkin;
    double psi_min = 0.0;
    bool failed = false;
    try {
        run(spec, [&](const Discretization&, const SimulationState&, const StepDiagnostics& d) {
            psi_min = std::min(psi_min, d.psi_min);
        });
    } catch (const StepFailed&) {
        failed = true;
    }
    MESSAGE("szymkiewicz galerkin: " << (failed ? "StepFailed" : "completed") << ", min psi "
                                     << psi_min << " m");
    CHECK((failed || psi_min < -7.5 - 0.01));
}

TEST_CASE("convergence study") {
    const auto spec = builtin_problem("tracy2d");
    ConvergenceOptions opt;
    opt.levels = 4;
    opt.times = {5e-4};
    opt.interpolant = true;
    const auto rows = convergence_study(spec, opt);
    REQUIRE(rows.size() == 4);
    std::vector<double> errors;
    for (const auto& r : rows) errors.push_back(r.error);
    CHECK(rows[0].h == doctest::Approx(1.25));
    CHECK(rows[3].h == doctest::Approx(0.15625));
    CHECK_FALSE(rows[0].rate);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        REQUIRE(rows[k].rate);
        CHECK(*rows[k].rate == doctest::Approx(std::log(errors[k - 1] / errors[k]) / std::log(2.0)));
    }
    MESSAGE("interpolant rates " << *rows[1].rate << ' ' << *rows[2].rate << ' ' << *rows[3].rate);
    CHECK(*rows[3].rate == doctest::Approx(2.0).epsilon(0.15));

    const auto rates = convergence_rates(errors);
    REQUIRE(rates.size() == 3);
    CHECK(rates[2] == *rows[3].rate);

    std::ostringstream csv;
    write_convergence_csv(rows, csv);
    CHECK(csv.str().rfind("t,h,error,rate\n", 0) == 0);

    auto plain = builtin_problem("celia");
    CHECK_THROWS_AS(convergence_study(plain, opt), ConfigError);
}

}  // TEST_SUITE
