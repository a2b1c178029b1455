#include "rfct/app.hpp"

#include "rfct/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rfct {

namespace pt = boost::property_tree;

namespace {

enum class Dim { None, Length, InvLength, Velocity, Time };

struct Unit {
    const char* name;
    Dim dim;
    double mul;
    double div;
};

// value_internal = value * mul / div
constexpr Unit kUnits[] = {
    {"m", Dim::Length, 1, 1},           {"cm", Dim::Length, 1, 100},
    {"mm", Dim::Length, 1, 1000},       {"1/m", Dim::InvLength, 1, 1},
    {"1/cm", Dim::InvLength, 100, 1},   {"m/day", Dim::Velocity, 1, 1},
    {"m/d", Dim::Velocity, 1, 1},       {"cm/day", Dim::Velocity, 1, 100},
    {"cm/d", Dim::Velocity, 1, 100},    {"m/h", Dim::Velocity, 24, 1},
    {"cm/h", Dim::Velocity, 24, 100},   {"m/s", Dim::Velocity, 86400, 1},
    {"cm/s", Dim::Velocity, 864, 1},    {"day", Dim::Time, 1, 1},
    {"days", Dim::Time, 1, 1},          {"d", Dim::Time, 1, 1},
    {"h", Dim::Time, 1, 24},            {"min", Dim::Time, 1, 1440},
    {"s", Dim::Time, 1, 86400},
};

const char* canonical_unit(Dim d) {
    switch (d) {
    case Dim::Length: return "m";
    case Dim::InvLength: return "1/m";
    case Dim::Velocity: return "m/day";
    case Dim::Time: return "day";
    case Dim::None: return "";
    }
    return "";
}

const char* dim_name(Dim d) {
    switch (d) {
    case Dim::Length: return "a length";
    case Dim::InvLength: return "an inverse length";
    case Dim::Velocity: return "a velocity";
    case Dim::Time: return "a time";
    case Dim::None: return "dimensionless";
    }
    return "";
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) {
        throw ConfigError(where + ": expected a number, got '" + s + "'");
    }
    return v;
}

double parse_quantity(const std::string& text, Dim dim, const std::string& where) {
    std::istringstream ss(text);
    std::string number, unit, extra;
    ss >> number >> unit >> extra;
    if (number.empty()) throw ConfigError(where + ": missing value");
    if (!extra.empty()) throw ConfigError(where + ": trailing text '" + extra + "'");
    const double v = parse_double(number, where);
    if (unit.empty()) return v;
    for (const Unit& u : kUnits) {
        if (unit != u.name) continue;
        if (u.dim != dim) {
            throw ConfigError(where + ": unit '" + unit + "' is not " + dim_name(dim));
        }
        if (u.mul == 1 && u.div == 1) return v;
        return v * u.mul / u.div;
    }
    throw ConfigError(where + ": unknown unit '" + unit + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

/// Key lookup within one section; remembers which keys were consumed so that
/// typos are reported.
class Section {
public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        auto it = tree_.find(key);
        if (it == tree_.not_found()) return std::nullopt;
        used_.insert(key);
        return trim(it->second.data());
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    void quantity(const std::string& key, Dim dim, double& out) {
        if (auto v = raw(key)) out = parse_quantity(*v, dim, where(key));
    }
    void number(const std::string& key, double& out) { quantity(key, Dim::None, out); }
    void integer(const std::string& key, int& out) {
        if (auto v = raw(key)) {
            int x = 0;
            auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
            if (ec != std::errc() || p != v->data() + v->size()) {
                throw ConfigError(where(key) + ": expected an integer, got '" + *v + "'");
            }
            out = x;
        }
    }
    void boolean(const std::string& key, bool& out) {
        if (auto v = raw(key)) {
            if (*v == "true" || *v == "yes" || *v == "1") out = true;
            else if (*v == "false" || *v == "no" || *v == "0") out = false;
            else throw ConfigError(where(key) + ": expected true or false, got '" + *v + "'");
        }
    }
    void text(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = *v;
    }

    void finish() const {
        for (const auto& [key, value] : tree_) {
            if (!used_.count(key)) throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
        }
    }

private:
    std::string name_;
    const pt::ptree& tree_;
    std::set<std::string> used_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

BoundaryKind bc_kind_from_string(const std::string& s, const std::string& where) {
    if (s == "dirichlet") return BoundaryKind::Dirichlet;
    if (s == "neumann") return BoundaryKind::Neumann;
    if (s == "seepage") return BoundaryKind::Seepage;
    throw ConfigError(where + ": unknown boundary type '" + s + "'");
}

const char* to_text(BoundaryKind k) {
    switch (k) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Seepage: return "seepage";
    }
    return "";
}

template <class F>
auto config_call(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

void read_problem(Section& s, ProblemSpec& spec) {
    s.text("name", spec.name);
    s.quantity("max_wall_seconds", Dim::None, spec.max_wall_seconds);
}

void read_mesh_section(Section& s, MeshSpec& m) {
    s.text("type", m.kind);
    s.quantity("length", Dim::Length, m.length);
    s.integer("elements", m.elements);
    s.boolean("vertical", m.vertical);
    s.quantity("width", Dim::Length, m.width);
    s.quantity("height", Dim::Length, m.height);
    s.quantity("hx", Dim::Length, m.hx);
    s.quantity("hz", Dim::Length, m.hz);
    if (auto d = s.raw("diagonal")) {
        if (*d == "right") m.diagonal = Diagonal::Right;
        else if (*d == "crossed") m.diagonal = Diagonal::Crossed;
        else throw ConfigError(s.where("diagonal") + ": expected right or crossed");
    }
    s.text("path", m.path);
}

SoilMaterial read_material(Section& s) {
    std::string model = "van_genuchten";
    s.text("model", model);
    RetentionModel r;
    r.kind = config_call(s.where("model"), [&] { return retention_kind_from_string(model); });
    const Dim alpha_dim = r.kind == RetentionKind::Haverkamp ? Dim::None : Dim::InvLength;
    s.quantity("alpha", alpha_dim, r.alpha);
    s.number("n", r.n);
    bool has_m = false;
    if (auto v = s.raw("m")) {
        r.m = parse_quantity(*v, Dim::None, s.where("m"));
        has_m = true;
    }
    s.number("L", r.L);
    s.number("A", r.A);
    s.number("B", r.B);
    s.number("beta", r.beta);
    s.quantity("psi_e", Dim::Length, r.psi_e);
    if (!has_m && (r.kind == RetentionKind::VanGenuchten ||
                   r.kind == RetentionKind::ModifiedVanGenuchten)) {
        r.m = 1.0 - 1.0 / r.n;
    }
    double theta_r = 0.0, theta_s = 1.0;
    s.number("theta_r", theta_r);
    s.number("theta_s", theta_s);
    ConductivityTensor ks;
    if (auto v = s.raw("ks")) ks = ConductivityTensor::isotropic(parse_quantity(*v, Dim::Velocity, s.where("ks")));
    s.quantity("ks_xx", Dim::Velocity, ks.xx);
    s.quantity("ks_xz", Dim::Velocity, ks.xz);
    s.quantity("ks_zz", Dim::Velocity, ks.zz);
    double compressibility = 0.0, density = 1000.0;
    s.quantity("compressibility", Dim::InvLength, compressibility);
    s.number("density", density);
    return config_call(s.where("model"), [&] {
        r.validate();
        return SoilMaterial(r, theta_r, theta_s, ks, compressibility, density);
    });
}

BcSpec read_bc(Section& s) {
    BcSpec bc;
    std::string type;
    s.text("type", type);
    if (type.empty()) throw ConfigError(s.where("type") + ": missing");
    bc.kind = bc_kind_from_string(type, s.where("type"));
    // Dirichlet values are heads, Neumann values outward fluxes.
    s.quantity("value", bc.kind == BoundaryKind::Neumann ? Dim::Velocity : Dim::Length, bc.value);
    s.text("profile", bc.profile);
    return bc;
}

void read_ic(Section& s, InitialCondition& ic) {
    s.text("type", ic.kind);
    s.quantity("psi", Dim::Length, ic.psi);
    s.quantity("datum_z", Dim::Length, ic.datum_z);
    for (int k = 1;; ++k) {
        const std::string key = "region" + std::to_string(k);
        auto v = s.raw(key);
        if (!v) break;
        auto parts = split_list(*v);
        if (parts.size() != 5) {
            throw ConfigError(s.where(key) + ": expected x0, x1, z0, z1, psi");
        }
        IcRegion r;
        r.x0 = parse_quantity(parts[0], Dim::Length, s.where(key));
        r.x1 = parse_quantity(parts[1], Dim::Length, s.where(key));
        r.z0 = parse_quantity(parts[2], Dim::Length, s.where(key));
        r.z1 = parse_quantity(parts[3], Dim::Length, s.where(key));
        r.psi = parse_quantity(parts[4], Dim::Length, s.where(key));
        ic.regions.push_back(r);
    }
}

void read_scheme(Section& s, ProblemSpec& spec) {
    if (auto v = s.raw("name")) {
        spec.scheme = config_call(s.where("name"), [&] { return scheme_from_string(*v); });
    }
    if (auto v = s.raw("quadrature")) {
        if (*v == "centroid") spec.quadrature = Quadrature::Centroid;
        else if (*v == "three_point") spec.quadrature = Quadrature::ThreePoint;
        else throw ConfigError(s.where("quadrature") + ": expected centroid or three_point");
    }
    s.boolean("mmatrix_fix", spec.upwind.mmatrix_fix);
    s.boolean("upwind_flip", spec.upwind.flip);
    if (auto v = s.raw("bounds")) {
        spec.fct.bounds = config_call(s.where("bounds"), [&] { return bounds_variant_from_string(*v); });
    }
    if (auto v = s.raw("high_start")) {
        spec.fct.high_start =
            config_call(s.where("high_start"), [&] { return high_order_start_from_string(*v); });
    }
    s.boolean("admissible_shortcut", spec.fct.limiter.admissible_shortcut);
    if (auto v = s.raw("backend")) {
        if (*v == "serial") spec.fct.limiter.backend = Backend::Serial;
        else if (*v == "openmp") spec.fct.limiter.backend = Backend::OpenMP;
        else throw ConfigError(s.where("backend") + ": expected serial or openmp");
    }
    s.number("consistency_factor", spec.fct.consistency_factor);
}

void read_time(Section& s, TimeSchemeConfig& t) {
    s.number("theta", t.theta);
    s.quantity("dt_init", Dim::Time, t.dt_init);
    s.quantity("dt_min", Dim::Time, t.dt_min);
    s.quantity("dt_max", Dim::Time, t.dt_max);
    s.number("growth", t.growth);
    s.number("shrink", t.shrink);
    s.integer("growth_iterations", t.growth_iterations);
    s.quantity("t_end", Dim::Time, t.t_end);
}

void read_newton(Section& s, NewtonConfig& n) {
    s.number("abs_tol", n.abs_tol);
    s.integer("max_iters", n.max_iters);
    s.boolean("line_search", n.line_search);
    s.boolean("balance_check", n.balance_check);
}

void read_output(Section& s, OutputSpec& o) {
    if (auto v = s.raw("times")) {
        o.times.clear();
        for (const auto& item : split_list(*v)) {
            o.times.push_back(parse_quantity(item, Dim::Time, s.where("times")));
        }
    }
    s.boolean("csv", o.csv);
    s.boolean("vtk", o.vtk);
    s.boolean("jsonl", o.jsonl);
}

TracyProblem read_analytic(Section& s) {
    std::string type = "tracy";
    s.text("type", type);
    if (type != "tracy") throw ConfigError(s.where("type") + ": only 'tracy' is supported");
    TracyProblem p;
    s.quantity("a", Dim::Length, p.a);
    s.quantity("L", Dim::Length, p.L);
    s.quantity("alpha", Dim::InvLength, p.alpha);
    s.quantity("psi_r", Dim::Length, p.psi_r);
    s.quantity("ks", Dim::Velocity, p.ks);
    s.number("theta_r", p.theta_r);
    s.number("theta_s", p.theta_s);
    s.integer("series_terms", p.series_terms);
    config_call(s.where("type"), [&] { p.validate(); return 0; });
    return p;
}

// ---- serializer ----

class Writer {
public:
    void section(const std::string& name) {
        if (!out_.str().empty()) out_ << '\n';
        out_ << '[' << name << "]\n";
    }
    void value(const std::string& key, double v, Dim dim = Dim::None) {
        out_ << key << " = " << format_number(v);
        if (dim != Dim::None) out_ << ' ' << canonical_unit(dim);
        out_ << '\n';
    }
    void text(const std::string& key, const std::string& v) { out_ << key << " = " << v << '\n'; }
    void integer(const std::string& key, int v) { out_ << key << " = " << v << '\n'; }
    void boolean(const std::string& key, bool v) {
        out_ << key << " = " << (v ? "true" : "false") << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

void write_material(Writer& w, const SoilMaterial& m) {
    const RetentionModel& r = m.retention();
    w.text("model", std::string(to_string(r.kind)));
    switch (r.kind) {
    case RetentionKind::VanGenuchten:
    case RetentionKind::ModifiedVanGenuchten:
        w.value("alpha", r.alpha, Dim::InvLength);
        w.value("n", r.n);
        w.value("m", r.m);
        w.value("L", r.L);
        if (r.kind == RetentionKind::ModifiedVanGenuchten) w.value("psi_e", r.psi_e, Dim::Length);
        break;
    case RetentionKind::BrooksCorey:
        w.value("alpha", r.alpha, Dim::InvLength);
        w.value("n", r.n);
        w.value("L", r.L);
        break;
    case RetentionKind::Haverkamp:
        w.value("A", r.A);
        w.value("B", r.B);
        w.value("alpha", r.alpha);
        w.value("beta", r.beta);
        break;
    case RetentionKind::Gardner:
        w.value("alpha", r.alpha, Dim::InvLength);
        break;
    }
    // Fields the variant does not use are written only when they differ
    // from the defaults, so the round trip stays exact.
    const RetentionModel def;
    const bool vg = r.kind == RetentionKind::VanGenuchten ||
                    r.kind == RetentionKind::ModifiedVanGenuchten;
    if (!vg && r.m != def.m) w.value("m", r.m);
    if (r.kind == RetentionKind::Gardner && r.n != def.n) w.value("n", r.n);
    if (r.kind == RetentionKind::Haverkamp && r.n != def.n) w.value("n", r.n);
    if ((r.kind == RetentionKind::Haverkamp || r.kind == RetentionKind::Gardner) && r.L != def.L) {
        w.value("L", r.L);
    }
    if (r.kind != RetentionKind::Haverkamp) {
        if (r.A != def.A) w.value("A", r.A);
        if (r.B != def.B) w.value("B", r.B);
        if (r.beta != def.beta) w.value("beta", r.beta);
    }
    if (r.kind != RetentionKind::ModifiedVanGenuchten && r.psi_e != def.psi_e) {
        w.value("psi_e", r.psi_e, Dim::Length);
    }
    w.value("theta_r", m.theta_r());
    w.value("theta_s", m.theta_s());
    const ConductivityTensor& k = m.ks();
    if (k.xz == 0.0 && k.xx == k.zz) {
        w.value("ks", k.xx, Dim::Velocity);
    } else {
        w.value("ks_xx", k.xx, Dim::Velocity);
        w.value("ks_xz", k.xz, Dim::Velocity);
        w.value("ks_zz", k.zz, Dim::Velocity);
    }
    if (m.compressibility() != 0.0) w.value("compressibility", m.compressibility(), Dim::InvLength);
    if (m.reference_density() != 1000.0) w.value("density", m.reference_density());
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double InitialCondition::at(const Point& x, double z) const {
    double psi_at = kind == "hydrostatic" ? psi - (z - datum_z) : psi;
    for (const IcRegion& r : regions) {
        if (x[0] >= r.x0 && x[0] <= r.x1 && z >= r.z0 && z <= r.z1) psi_at = r.psi;
    }
    return psi_at;
}

void ProblemSpec::validate() const {
    config_call("[time]", [&] { time.validate(); return 0; });
    config_call("[newton]", [&] { newton.validate(); return 0; });
    if ((scheme == Scheme::Fct || scheme == Scheme::LowOrder) && time.theta != 1.0) {
        throw ConfigError("[time] theta: scheme " + std::string(to_string(scheme)) +
                          " requires theta = 1");
    }
    static const std::set<std::string> kinds{"interval", "rect", "file", "rain_garden",
                                             "bioswale2d"};
    if (!kinds.count(mesh.kind)) throw ConfigError("[mesh] type: unknown '" + mesh.kind + "'");
    if (mesh.kind == "file" && mesh.path.empty()) throw ConfigError("[mesh] path: missing");
    if (materials.empty()) throw ConfigError("no [materials.<zone>] section");
    if (initial.kind != "uniform" && initial.kind != "hydrostatic") {
        throw ConfigError("[ic] type: expected uniform or hydrostatic, got '" + initial.kind + "'");
    }
    for (const auto& [marker, bc] : boundary) {
        if (!bc.profile.empty()) {
            if (bc.profile != "tracy_top") {
                throw ConfigError("[bc." + marker + "] profile: unknown '" + bc.profile + "'");
            }
            if (!analytic) {
                throw ConfigError("[bc." + marker + "] profile tracy_top needs an [analytic] section");
            }
        }
    }
    for (double t : output.times) {
        if (!(t >= 0.0 && t <= time.t_end)) {
            throw ConfigError("[output] times: " + format_number(t) + " outside [0, t_end]");
        }
    }
    if (max_wall_seconds < 0.0) throw ConfigError("[problem] max_wall_seconds must be >= 0");
}

ProblemSpec parse_problem(std::istream& in, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    ProblemSpec spec;
    for (const auto& [name, body] : tree) {
        if (!body.data().empty()) {
            throw ConfigError("key '" + name + "' outside of a section");
        }
        Section s(name, body);
        if (name == "problem") {
            read_problem(s, spec);
        } else if (name == "mesh") {
            read_mesh_section(s, spec.mesh);
        } else if (name.rfind("materials.", 0) == 0) {
            spec.materials[name.substr(10)] = read_material(s);
        } else if (name.rfind("bc.", 0) == 0) {
            spec.boundary[name.substr(3)] = read_bc(s);
        } else if (name == "ic") {
            read_ic(s, spec.initial);
        } else if (name == "scheme") {
            read_scheme(s, spec);
        } else if (name == "time") {
            read_time(s, spec.time);
        } else if (name == "newton") {
            read_newton(s, spec.newton);
        } else if (name == "output") {
            read_output(s, spec.output);
        } else if (name == "analytic") {
            spec.analytic = read_analytic(s);
        } else {
            throw ConfigError("unknown section [" + name + "]");
        }
        s.finish();
    }
    if (spec.mesh.kind == "file" && !base_dir.empty() &&
        std::filesystem::path(spec.mesh.path).is_relative()) {
        spec.mesh.path = (std::filesystem::path(base_dir) / spec.mesh.path).lexically_normal().string();
    }
    spec.validate();
    return spec;
}

std::vector<double> parse_time_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_quantity(item, Dim::Time, "times"));
    return out;
}

ProblemSpec parse_problem_string(const std::string& text) {
    std::istringstream in(text);
    return parse_problem(in);
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_problem(in, std::filesystem::path(path).parent_path().string());
}

std::string serialize_problem(const ProblemSpec& spec) {
    Writer w;
    w.section("problem");
    w.text("name", spec.name);
    if (spec.max_wall_seconds != 0.0) w.value("max_wall_seconds", spec.max_wall_seconds);

    const MeshSpec& m = spec.mesh;
    w.section("mesh");
    w.text("type", m.kind);
    if (m.kind == "interval") {
        w.value("length", m.length, Dim::Length);
        w.integer("elements", m.elements);
        w.boolean("vertical", m.vertical);
    } else if (m.kind == "file") {
        w.text("path", m.path);
    } else {
        w.value("width", m.width, Dim::Length);
        w.value("height", m.height, Dim::Length);
        w.value("hx", m.hx, Dim::Length);
        w.value("hz", m.hz, Dim::Length);
        w.text("diagonal", m.diagonal == Diagonal::Right ? "right" : "crossed");
    }
    // Keys of the other mesh kinds are kept when they differ from the defaults.
    const MeshSpec def;
    if (m.kind != "interval") {
        if (m.length != def.length) w.value("length", m.length, Dim::Length);
        if (m.elements != def.elements) w.integer("elements", m.elements);
        if (m.vertical != def.vertical) w.boolean("vertical", m.vertical);
    }
    if (m.kind == "interval" || m.kind == "file") {
        if (m.width != def.width) w.value("width", m.width, Dim::Length);
        if (m.height != def.height) w.value("height", m.height, Dim::Length);
        if (m.hx != def.hx) w.value("hx", m.hx, Dim::Length);
        if (m.hz != def.hz) w.value("hz", m.hz, Dim::Length);
        if (m.diagonal != def.diagonal) w.text("diagonal", "crossed");
    }
    if (m.kind != "file" && !m.path.empty()) w.text("path", m.path);

    for (const auto& [zone, mat] : spec.materials) {
        w.section("materials." + zone);
        write_material(w, mat);
    }
    for (const auto& [marker, bc] : spec.boundary) {
        w.section("bc." + marker);
        w.text("type", to_text(bc.kind));
        if (bc.kind != BoundaryKind::Seepage || bc.value != 0.0) {
            w.value("value", bc.value,
                    bc.kind == BoundaryKind::Neumann ? Dim::Velocity : Dim::Length);
        }
        if (!bc.profile.empty()) w.text("profile", bc.profile);
    }

    w.section("ic");
    w.text("type", spec.initial.kind);
    w.value("psi", spec.initial.psi, Dim::Length);
    if (spec.initial.kind == "hydrostatic" || spec.initial.datum_z != 0.0) {
        w.value("datum_z", spec.initial.datum_z, Dim::Length);
    }
    for (std::size_t k = 0; k < spec.initial.regions.size(); ++k) {
        const IcRegion& r = spec.initial.regions[k];
        w.text("region" + std::to_string(k + 1),
               format_number(r.x0) + ", " + format_number(r.x1) + ", " + format_number(r.z0) +
                   ", " + format_number(r.z1) + ", " + format_number(r.psi));
    }

    w.section("scheme");
    w.text("name", std::string(to_string(spec.scheme)));
    w.text("quadrature", spec.quadrature == Quadrature::Centroid ? "centroid" : "three_point");
    w.boolean("mmatrix_fix", spec.upwind.mmatrix_fix);
    w.boolean("upwind_flip", spec.upwind.flip);
    w.text("bounds", std::string(to_string(spec.fct.bounds)));
    w.text("high_start", std::string(to_string(spec.fct.high_start)));
    w.boolean("admissible_shortcut", spec.fct.limiter.admissible_shortcut);
    w.text("backend", spec.fct.limiter.backend == Backend::Serial ? "serial" : "openmp");
    w.value("consistency_factor", spec.fct.consistency_factor);

    const TimeSchemeConfig& t = spec.time;
    w.section("time");
    w.value("theta", t.theta);
    w.value("dt_init", t.dt_init, Dim::Time);
    w.value("dt_min", t.dt_min, Dim::Time);
    w.value("dt_max", t.dt_max, Dim::Time);
    w.value("growth", t.growth);
    w.value("shrink", t.shrink);
    w.integer("growth_iterations", t.growth_iterations);
    w.value("t_end", t.t_end, Dim::Time);

    w.section("newton");
    w.value("abs_tol", spec.newton.abs_tol);
    w.integer("max_iters", spec.newton.max_iters);
    w.boolean("line_search", spec.newton.line_search);
    w.boolean("balance_check", spec.newton.balance_check);

    if (spec.analytic) {
        const TracyProblem& p = *spec.analytic;
        w.section("analytic");
        w.text("type", "tracy");
        w.value("a", p.a, Dim::Length);
        w.value("L", p.L, Dim::Length);
        w.value("alpha", p.alpha, Dim::InvLength);
        w.value("psi_r", p.psi_r, Dim::Length);
        w.value("ks", p.ks, Dim::Velocity);
        w.value("theta_r", p.theta_r);
        w.value("theta_s", p.theta_s);
        w.integer("series_terms", p.series_terms);
    }

    w.section("output");
    std::string times;
    for (double x : spec.output.times) {
        if (!times.empty()) times += ", ";
        times += format_number(x) + " day";
    }
    w.text("times", times);
    w.boolean("csv", spec.output.csv);
    w.boolean("vtk", spec.output.vtk);
    w.boolean("jsonl", spec.output.jsonl);
    return w.str();
}

}  // namespace rfct
