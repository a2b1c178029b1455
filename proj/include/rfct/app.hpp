/**
 * @file app.hpp
 * @brief Problem specifications, config files, the run driver, the
 * convergence-study driver, output writers and the builtin problem registry.
 *
 * All quantities are stored in metres and days. Config files may attach a
 * unit to any dimensional value ("-75 cm", "7.967 m/day", "60 min"); the
 * parser converts to the internal units and the serializer writes them back
 * with the canonical unit.
 */
#pragma once

#include "rfct/analytic.hpp"
#include "rfct/fct.hpp"
#include "rfct/solver.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rfct {

/// Where the mesh comes from. @c kind is one of interval, rect, file,
/// rain_garden, bioswale2d (the last two are generated geometries).
struct MeshSpec {
    std::string kind = "interval";
    double length = 1.0;  ///< interval
    int elements = 100;   ///< interval
    bool vertical = true; ///< interval
    double width = 1.0;   ///< rect and generated geometries
    double height = 1.0;
    double hx = 0.1;
    double hz = 0.1;
    Diagonal diagonal = Diagonal::Right;
    std::string path;     ///< file

    bool operator==(const MeshSpec&) const = default;
};

/// Boundary condition of one marker. @c profile "tracy_top" replaces the
/// Dirichlet value by the top head of the [analytic] problem.
struct BcSpec {
    BoundaryKind kind = BoundaryKind::Neumann;
    double value = 0.0;
    std::string profile;

    bool operator==(const BcSpec&) const = default;
};

/// Axis-aligned box [x0,x1] x [z0,z1] (closed) with its own initial head.
struct IcRegion {
    double x0 = 0.0, x1 = 0.0, z0 = 0.0, z1 = 0.0;
    double psi = 0.0;

    bool operator==(const IcRegion&) const = default;
};

/// uniform: psi everywhere. hydrostatic: psi - (z - datum_z).
/// Regions override in order, the last match wins.
struct InitialCondition {
    std::string kind = "uniform";
    double psi = 0.0;
    double datum_z = 0.0;
    std::vector<IcRegion> regions;

    double at(const Point& x, double z) const;
    bool operator==(const InitialCondition&) const = default;
};

struct OutputSpec {
    std::vector<double> times;  ///< snapshot times; t_end is always added
    bool csv = true;
    bool vtk = false;
    bool jsonl = true;

    bool operator==(const OutputSpec&) const = default;
};

struct ProblemSpec {
    std::string name = "unnamed";
    MeshSpec mesh;
    std::map<std::string, SoilMaterial> materials;  ///< by zone name
    std::map<std::string, BcSpec> boundary;         ///< by marker name
    InitialCondition initial;
    Scheme scheme = Scheme::Fct;
    Quadrature quadrature = Quadrature::Centroid;
    UpwindOptions upwind;
    FctConfig fct;
    TimeSchemeConfig time;
    NewtonConfig newton;
    std::optional<TracyProblem> analytic;
    OutputSpec output;
    double max_wall_seconds = 0.0;  ///< 0: unlimited

    /// Throws ConfigError on inconsistent settings (e.g. fct with Theta != 1).
    void validate() const;
    bool operator==(const ProblemSpec&) const = default;
};

/// Parses the INI-style config text. Relative mesh paths are resolved
/// against @p base_dir when it is not empty. Throws ConfigError (syntax
/// errors carry the line number).
ProblemSpec parse_problem(std::istream& in, const std::string& base_dir = "");
ProblemSpec parse_problem_string(const std::string& text);
ProblemSpec load_problem(const std::string& path);
/// Comma-separated times with optional units ("60 min, 1 day"), in days.
std::vector<double> parse_time_list(const std::string& text);
/// Canonical text; parse_problem(serialize_problem(s)) == s.
std::string serialize_problem(const ProblemSpec& spec);

/// Builds the mesh described by @p spec (generated or loaded).
Mesh build_mesh(const MeshSpec& spec);
/// Mesh, materials by zone id and quadrature/upwind settings.
Discretization build_discretization(const ProblemSpec& spec);
BoundaryConditions build_boundary(const ProblemSpec& spec);
std::vector<double> initial_head(const ProblemSpec& spec, const Mesh& mesh);

struct Snapshot {
    double t = 0.0;
    std::vector<double> psi;
    std::vector<double> theta;
    std::vector<double> kr;
};

struct RunResult {
    std::string name;
    Scheme scheme = Scheme::Fct;
    Mesh mesh;
    std::vector<Snapshot> snapshots;     ///< t = 0 first, then output times
    std::vector<StepDiagnostics> steps;  ///< one per accepted step
    double wall_seconds = 0.0;

    std::vector<double> dt_history() const;
};

/// Called after every accepted step with the new state.
using StepObserver =
    std::function<void(const Discretization&, const SimulationState&, const StepDiagnostics&)>;

/// Time loop to t_end with adaptive steps that land on every output time.
/// Throws StepFailed when dt falls below dt_min or the wall budget runs out.
RunResult run(const ProblemSpec& spec, const StepObserver& observer = {});

/// Mass-balance audit from a JSON-lines diagnostics log: number of records
/// with |mass_balance| > tol.
int audit_mass_balance(std::istream& jsonl, double tol);

struct ConvergenceRow {
    double h = 0.0;
    double t = 0.0;
    double error = 0.0;
    std::optional<double> rate;  ///< log2(e_coarse / e_fine) vs the previous level

    bool operator==(const ConvergenceRow&) const = default;
};

struct ConvergenceOptions {
    int levels = 4;
    std::vector<double> times;
    /// Replace the numerical solution by the nodal interpolant of the exact one.
    bool interpolant = false;
};

/// Runs the base spec (a rect mesh with an [analytic] section) on
/// levels halving hx and hz and reports the L2 error of psi at each time.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& base,
                                              const ConvergenceOptions& opt);
/// log2(e[k-1] / e[k]) for k >= 1.
std::vector<double> convergence_rates(const std::vector<double>& errors);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

/// Columns t,node,x[,z],psi,theta,kr; one row per node and snapshot.
void write_csv_profile(const RunResult& result, std::ostream& out);
/// Legacy ASCII VTK of snapshot @p index with psi, theta and kr point data.
void write_vtk_field(const RunResult& result, std::size_t index, std::ostream& out);
/// One JSON object per accepted step.
void write_diagnostics_jsonl(const RunResult& result, std::ostream& out);
/// Writes the enabled outputs of @p spec into @p dir; returns the file paths.
std::vector<std::string> write_outputs(const ProblemSpec& spec, const RunResult& result,
                                       const std::string& dir);

/// Shortest round-trip decimal text of @p v.
std::string format_number(double v);

std::vector<std::string> builtin_names();
/// Throws ConfigError for unknown names.
ProblemSpec builtin_problem(const std::string& name);
std::map<std::string, ProblemSpec> builtin_problems();

}  // namespace rfct
