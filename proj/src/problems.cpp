#include "rfct/app.hpp"

#include "rfct/errors.hpp"

#include <cmath>

namespace rfct {

namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

SoilMaterial vg_soil(double alpha, double n, std::optional<double> m, double theta_r,
                     double theta_s, double ks) {
    return SoilMaterial(RetentionModel::van_genuchten(alpha, n, m), theta_r, theta_s,
                        ConductivityTensor::isotropic(ks));
}

// Rain garden: root zone (0.5 m) over a storage layer (0.7 m), ponded top,
// water table at the bottom, no-flow sides.
Mesh rain_garden_mesh(const MeshSpec& m) {
    GridTriangulation g;
    g.width = m.width;
    g.height = m.height;
    g.hx = m.hx;
    g.hz = m.hz;
    g.diagonal = m.diagonal;
    const double root_base = m.height - 0.5;
    g.zone_of = [root_base](const Point& c) { return c[1] > root_base ? "root_zone" : "storage_zone"; };
    g.marker_of = [h = m.height](const Point& p) -> std::string {
        if (near(p[1], h)) return "top";
        if (near(p[1], 0.0)) return "bottom";
        return "sides";
    };
    return triangulate_grid(g);
}

// Bioswale: root zone on top, swale channel in the middle, base around it.
// The perforated pipe is a hole in the swale channel with a seepage face.
constexpr double kRootDepth = 0.5;
constexpr double kSwaleX0 = 0.5, kSwaleX1 = 2.5, kSwaleZ0 = 2.0;
constexpr double kPipeX0 = 1.4, kPipeX1 = 1.6, kPipeZ0 = 2.4, kPipeZ1 = 2.6;
constexpr double kPondX0 = 1.0, kPondX1 = 2.0;

Mesh bioswale_mesh(const MeshSpec& m) {
    GridTriangulation g;
    g.width = m.width;
    g.height = m.height;
    g.hx = m.hx;
    g.hz = m.hz;
    g.diagonal = m.diagonal;
    const double root_base = m.height - kRootDepth;
    g.keep_cell = [](const Point& c) {
        return !(c[0] > kPipeX0 && c[0] < kPipeX1 && c[1] > kPipeZ0 && c[1] < kPipeZ1);
    };
    g.zone_of = [root_base](const Point& c) -> std::string {
        if (c[1] > root_base) return "root_zone";
        if (c[0] > kSwaleX0 && c[0] < kSwaleX1 && c[1] > kSwaleZ0) return "swale_channel";
        return "base";
    };
    g.marker_of = [h = m.height](const Point& p) -> std::string {
        if (near(p[1], h)) return (p[0] > kPondX0 && p[0] < kPondX1) ? "pond" : "top";
        if (p[0] > kPipeX0 - 1e-9 && p[0] < kPipeX1 + 1e-9 && p[1] > kPipeZ0 - 1e-9 &&
            p[1] < kPipeZ1 + 1e-9) {
            return "pipe";
        }
        return "walls";
    };
    return triangulate_grid(g);
}

ProblemSpec celia() {
    ProblemSpec s;
    s.name = "celia";
    s.mesh.kind = "interval";
    s.mesh.length = 1.0;
    s.mesh.elements = 100;
    s.materials["default"] = vg_soil(3.35, 2.0, {}, 0.102, 0.368, 7.967);
    s.boundary["top"] = {BoundaryKind::Dirichlet, -0.75, ""};
    s.boundary["bottom"] = {BoundaryKind::Dirichlet, -10.0, ""};
    s.initial.psi = -10.0;
    s.time.dt_init = 1e-3;
    s.time.dt_max = 1e-3;
    s.time.dt_min = 1e-7;
    s.time.t_end = 1.0;
    s.output.times = {1.0 / 24.0, 1.0};
    return s;
}

ProblemSpec hydrus_column() {
    ProblemSpec s;
    s.name = "hydrus_column";
    s.mesh.kind = "interval";
    s.mesh.length = 20.0;
    s.mesh.elements = 400;
    s.materials["default"] = vg_soil(14.5, 2.68, 0.627, 0.045, 0.43, 7.128);
    s.boundary["top"] = {BoundaryKind::Dirichlet, 0.0, ""};
    s.boundary["bottom"] = {BoundaryKind::Dirichlet, 0.0, ""};
    s.initial.kind = "hydrostatic";
    s.initial.psi = 0.0;
    s.initial.datum_z = 0.0;
    s.time.dt_init = 1e-4;
    s.time.dt_max = 1e-2;
    s.time.t_end = 2.0;
    s.output.times = {5.0 / 24.0, 11.0 / 24.0, 2.0};
    return s;
}

ProblemSpec szymkiewicz() {
    ProblemSpec s;
    s.name = "szymkiewicz";
    s.mesh.kind = "interval";
    s.mesh.length = 0.2;
    s.mesh.elements = 100;
    s.materials["default"] = vg_soil(1.389, 1.592, 0.372, 0.045, 0.43, 0.72);
    s.boundary["top"] = {BoundaryKind::Dirichlet, -0.075, ""};
    s.boundary["bottom"] = {BoundaryKind::Dirichlet, -7.5, ""};
    s.initial.psi = -7.5;
    s.time.dt_init = 1e-5;
    s.time.dt_max = 1e-4;
    s.time.dt_min = 1e-9;
    s.time.t_end = 0.15 / 24.0;
    s.output.times = {0.05 / 24.0, 0.1 / 24.0, 0.15 / 24.0};
    s.max_wall_seconds = 120.0;
    return s;
}

ProblemSpec tracy2d() {
    ProblemSpec s;
    s.name = "tracy2d";
    TracyProblem p;
    s.analytic = p;
    s.mesh.kind = "rect";
    s.mesh.width = p.a;
    s.mesh.height = p.L;
    s.mesh.hx = 1.25;
    s.mesh.hz = 1.25;
    s.materials["default"] = SoilMaterial(RetentionModel::gardner(p.alpha), p.theta_r, p.theta_s,
                                          ConductivityTensor::isotropic(p.ks));
    s.boundary["top"] = {BoundaryKind::Dirichlet, 0.0, "tracy_top"};
    s.boundary["bottom"] = {BoundaryKind::Dirichlet, p.psi_r, ""};
    s.boundary["left"] = {BoundaryKind::Neumann, 0.0, ""};
    s.boundary["right"] = {BoundaryKind::Neumann, 0.0, ""};
    s.initial.psi = p.psi_r;
    s.time.dt_init = 6.25e-5;
    s.time.dt_max = 6.25e-5;
    s.time.dt_min = 1e-9;
    s.time.t_end = 5e-4;
    s.output.times = {3.75e-4, 4.375e-4, 5e-4};
    return s;
}

ProblemSpec rain_garden() {
    ProblemSpec s;
    s.name = "rain_garden";
    s.mesh.kind = "rain_garden";
    s.mesh.width = 3.0;
    s.mesh.height = 1.2;
    s.mesh.hx = 0.1;
    s.mesh.hz = 0.1;
    s.materials["root_zone"] = vg_soil(0.33, 3.594, {}, 0.03, 0.40, 8.856);
    s.materials["storage_zone"] = vg_soil(0.32, 2.146, {}, 0.10, 0.37, 19.944);
    s.boundary["top"] = {BoundaryKind::Dirichlet, 0.5, ""};
    s.boundary["bottom"] = {BoundaryKind::Dirichlet, 0.0, ""};
    s.boundary["sides"] = {BoundaryKind::Neumann, 0.0, ""};
    s.initial.kind = "hydrostatic";
    s.initial.psi = 0.0;
    s.initial.datum_z = 0.0;
    s.time.dt_init = 1e-4;
    s.time.dt_max = 1.0;
    s.time.t_end = 601.99;
    s.output.times = {19.9, 199.0, 497.512, 601.99};
    return s;
}

ProblemSpec bioswale2d() {
    ProblemSpec s;
    s.name = "bioswale2d";
    s.mesh.kind = "bioswale2d";
    s.mesh.width = 3.0;
    s.mesh.height = 5.0;
    s.mesh.hx = 0.1;
    s.mesh.hz = 0.1;
    s.materials["root_zone"] = vg_soil(8.0, 2.4, {}, 0.05, 0.4, 5.0);
    s.materials["swale_channel"] = vg_soil(14.5, 2.68, {}, 0.045, 0.43, 7.128);
    s.materials["base"] = vg_soil(7.5, 1.89, {}, 0.065, 0.41, 1.06);
    s.boundary["pond"] = {BoundaryKind::Dirichlet, 0.5, ""};
    s.boundary["top"] = {BoundaryKind::Neumann, 0.0, ""};
    s.boundary["walls"] = {BoundaryKind::Neumann, 0.0, ""};
    s.boundary["pipe"] = {BoundaryKind::Seepage, 0.0, ""};
    s.initial.psi = -3.0;
    s.time.dt_init = 1e-4;
    s.time.dt_max = 2e-3;
    s.time.t_end = 0.225;
    s.output.times = {0.03, 0.06, 0.15, 0.18, 0.21, 0.225};
    return s;
}

}  // namespace

Mesh build_mesh(const MeshSpec& m) {
    if (m.kind == "interval") return generate_interval_mesh(m.length, m.elements, m.vertical);
    if (m.kind == "rect") return generate_rect_triangulation(m.width, m.height, m.hx, m.hz, m.diagonal);
    if (m.kind == "file") return load_mesh(m.path);
    if (m.kind == "rain_garden") return rain_garden_mesh(m);
    if (m.kind == "bioswale2d") return bioswale_mesh(m);
    throw ConfigError("[mesh] type: unknown '" + m.kind + "'");
}

std::vector<std::string> builtin_names() {
    return {"celia", "hydrus_column", "szymkiewicz", "tracy2d", "rain_garden", "bioswale2d"};
}

ProblemSpec builtin_problem(const std::string& name) {
    if (name == "celia") return celia();
    if (name == "hydrus_column") return hydrus_column();
    if (name == "szymkiewicz") return szymkiewicz();
    if (name == "tracy2d") return tracy2d();
    if (name == "rain_garden") return rain_garden();
    if (name == "bioswale2d") return bioswale2d();
    throw ConfigError("unknown builtin problem '" + name + "'");
}

std::map<std::string, ProblemSpec> builtin_problems() {
    std::map<std::string, ProblemSpec> out;
    for (const auto& name : builtin_names()) out.emplace(name, builtin_problem(name));
    return out;
}

}  // namespace rfct
