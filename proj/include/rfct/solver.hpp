/**
 * @file solver.hpp
 * @brief Residuals, Jacobians, Newton iteration, boundary handling and time
 * stepping for the Galerkin and low-order discretizations.
 *
 * Sign convention for boundary data: the Neumann value g_N is the outward
 * normal flux (positive = water leaving the domain). Residual rows carry the
 * units of m_i theta / dt. At a Dirichlet node the natural (unreplaced)
 * residual r_i equals the boundary inflow needed to hold psi_D.
 */
#pragma once

#include "rfct/assembly.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rfct {

struct TimeSchemeConfig {
    double theta = 1.0;   ///< implicitness Theta
    double dt_init = 1e-3;
    double dt_min = 1e-8;
    double dt_max = 1e-2;
    double growth = 1.5;
    double shrink = 0.5;
    /// Grow dt only when Newton converged within this many iterations.
    int growth_iterations = 5;
    double t_end = 1.0;

    void validate() const;
    bool operator==(const TimeSchemeConfig&) const = default;
};

struct NewtonConfig {
    double abs_tol = 1e-8;
    int max_iters = 25;
    bool line_search = true;
    /// Also require |sum_i R_i| < abs_tol, which bounds the global mass
    /// balance of the step by the tolerance instead of N times it.
    bool balance_check = true;

    void validate() const;
    bool operator==(const NewtonConfig&) const = default;
};

enum class BoundaryKind { Dirichlet, Neumann, Seepage };

/// Boundary condition of one marker. Dirichlet uses @c value unless
/// @c profile is set (psi_D as a function of position); Neumann uses
/// @c value as g_N; Seepage ignores both.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Neumann;
    double value = 0.0;
    std::function<double(const Point&)> profile;
};

using BoundaryConditions = std::map<std::string, BoundaryCondition>;

/// Boundary conditions resolved to nodes. Dirichlet wins over seepage, which
/// wins over Neumann, when a node touches several markers.
struct BoundaryData {
    std::vector<double> load;           ///< b^bc
    std::vector<char> dirichlet;        ///< fixed by a Dirichlet marker
    std::vector<double> dirichlet_value;
    std::vector<char> seepage;          ///< belongs to a seepage face
    std::vector<char> seepage_active;   ///< seepage node currently held at psi = 0

    bool fixed(int i) const { return dirichlet[i] || seepage_active[i]; }
    double fixed_value(int i) const { return dirichlet[i] ? dirichlet_value[i] : 0.0; }
    int num_seepage() const;
};

/// Throws ConfigError when a facet marker has no condition or a condition
/// names a marker the mesh does not have.
BoundaryData resolve_boundary(const Mesh& mesh, const BoundaryConditions& bcs);

/// Everything time-independent about one problem's space discretization.
struct Discretization {
    Mesh mesh;
    std::shared_ptr<const AdjacencyGraph> graph;
    std::vector<SoilMaterial> materials;  ///< by zone id
    std::vector<int> node_zone;
    EdgeMaterialWeights edge_weights;
    GraphOperator mass;
    LumpedMass lumped;
    GraphOperator saturated;
    Quadrature quadrature = Quadrature::Centroid;
    UpwindOptions upwind;

    static Discretization build(Mesh mesh, std::vector<SoilMaterial> by_zone,
                                Quadrature quadrature = Quadrature::Centroid,
                                UpwindOptions upwind = {});

    int num_nodes() const { return mesh.num_nodes(); }
    const SoilMaterial& node_material(int i) const { return materials[node_zone[i]]; }
    std::vector<double> moisture(std::span<const double> psi) const;
    std::vector<double> total_head(std::span<const double> psi) const;
};

/// Data of the step being solved: old state, step size and implicitness.
struct StepInput {
    std::span<const double> psi_old;
    std::span<const double> theta_old;
    double dt = 0.0;
    double theta_scheme = 1.0;
};

/// R_i = sum_j m_ij (theta_j - theta_j^n)/dt + Theta L_i(psi) + (1-Theta) L_i(psi^n),
/// L = A(psi) phi + b. Fixed rows become psi_i - psi_D unless @p natural.
std::vector<double> residual_high(const Discretization& d, const BoundaryData& bc,
                                  std::span<const double> psi, const StepInput& in,
                                  bool natural = false);

/// R~_i = m_i (theta_i - theta_i^n)/dt + [A~(psi) phi]_i + b_i. Requires Theta = 1.
std::vector<double> residual_low(const Discretization& d, const BoundaryData& bc,
                                 std::span<const double> psi, const StepInput& in,
                                 bool natural = false);

/// f(psi) = (M~ - M)(theta - theta^n)/dt + (A~(psi) - A(psi)) phi, so that
/// residual_low = residual_high + f on rows that are not fixed (Theta = 1).
/// Row i of f is the sum of the antidiffusive edge fluxes f_ij at psi^H = psi^L.
std::vector<double> low_order_correction(const Discretization& d, std::span<const double> psi,
                                         const StepInput& in);

GraphOperator jacobian_high(const Discretization& d, const BoundaryData& bc,
                            std::span<const double> psi, const StepInput& in);
/// Upwind selection frozen at @p psi.
GraphOperator jacobian_low(const Discretization& d, const BoundaryData& bc,
                           std::span<const double> psi, const StepInput& in);

/// Sparse direct solver over the adjacency pattern; the symbolic analysis is
/// done once.
class SparseDirectSolver {
public:
    explicit SparseDirectSolver(std::shared_ptr<const AdjacencyGraph> graph);
    /// Solves J x = rhs. Throws NonConvergence on a singular matrix.
    std::vector<double> solve(const GraphOperator& jacobian, std::span<const double> rhs);

private:
    std::shared_ptr<const AdjacencyGraph> graph_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

struct NewtonResult {
    std::vector<double> psi;
    int iterations = 0;
    double residual_norm = 0.0;
};

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
using JacobianFn = std::function<GraphOperator(std::span<const double>)>;

/// Newton iteration with halving backtracking. Converged when ||R||_inf < abs_tol
/// (and |sum R| < abs_tol with balance_check).
/// Throws NonConvergence after max_iters or on a non-finite iterate.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          SparseDirectSolver& linear, std::vector<double> guess,
                          const NewtonConfig& cfg);

double max_norm(std::span<const double> v);

enum class Scheme { Galerkin, LowOrder, Fct };
std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

struct SimulationState {
    double t = 0.0;
    std::vector<double> psi;
    std::vector<double> theta;
    std::vector<char> seepage_active;  ///< seepage nodes held at psi = 0
};

/// Initial state: psi0 with Dirichlet values imposed, theta = theta(psi),
/// seepage nodes with psi >= 0 held.
SimulationState make_initial_state(const Discretization& d, const BoundaryData& bc,
                                   std::vector<double> psi0);

/// Per accepted step record.
struct StepDiagnostics {
    double t = 0.0;
    double dt = 0.0;
    int newton_low = 0;          ///< iterations of the low-order solve(s)
    int newton_high = 0;         ///< iterations of the Galerkin solve(s)
    int retries = 0;             ///< dt halvings before acceptance
    int seepage_switches = 0;
    double theta_min = 0.0;
    double theta_max = 0.0;
    double psi_min = 0.0;
    double psi_max = 0.0;
    int bound_violations = 0;    ///< nodes outside [theta_r, theta_s] +- 1e-10
    double boundary_flux = 0.0;  ///< net outflow through the boundary, per unit time
    double mass_change = 0.0;    ///< sum_i m_i (theta^{n+1} - theta^n)
    double mass_balance = 0.0;   ///< (mass_change + dt * boundary_flux) / dt
    // FCT only
    int limited_edges = 0;       ///< edges with alpha < 1
    double fct_bound_excess = 0.0;     ///< max distance of theta^{n+1} outside its limiter bounds
    double fct_conservation = 0.0;     ///< relative change of sum m_i theta over the correction
    double recovery_error = 0.0;       ///< max |theta(psi^{n+1}) - theta^{n+1}|
    bool high_order_fallback = false;
    std::vector<std::string> warnings;

    int newton_iterations() const { return std::max(newton_low, newton_high); }
};

struct StepOutcome {
    SimulationState state;
    StepDiagnostics diag;
};

/// Result of a fixed-size step attempt; throws NonConvergence on failure.
using Stepper = std::function<StepOutcome(const SimulationState&, double dt)>;

struct SeepageSolve {
    std::vector<double> psi;
    std::vector<double> natural_residual;
    int switches = 0;
};

using BoundarySolveFn = std::function<std::pair<std::vector<double>, std::vector<double>>(
    const BoundaryData&)>;

/// Seepage active-set iteration around a boundary-aware solve. @p solve
/// returns the converged psi and the natural residual for the given boundary
/// data. Held nodes (psi = 0) with inflow r_i > tol are released; released
/// nodes with psi >= 0 are held. At most @p max_switches rounds change the
/// set; when it has not settled by then a warning is appended and the last
/// solve is accepted (bc keeps the set that solve used).
SeepageSolve iterate_seepage(BoundaryData& bc, const BoundarySolveFn& solve, double tol,
                             std::vector<std::string>& warnings, int max_switches = 5);

/// Boundary data with the seepage active set of @p s.
BoundaryData boundary_for(const BoundaryData& bc, const SimulationState& s);

/// Plain Galerkin step (any Theta) or low-order step (Theta = 1).
StepOutcome step_galerkin(const Discretization& d, const BoundaryData& bc,
                          const SimulationState& s, double dt, double theta_scheme,
                          const NewtonConfig& cfg, SparseDirectSolver& linear);
StepOutcome step_low_order(const Discretization& d, const BoundaryData& bc,
                           const SimulationState& s, double dt, const NewtonConfig& cfg,
                           SparseDirectSolver& linear);

/// Fills theta range, bound violations and mass bookkeeping of @p diag.
/// @p boundary_flux is the net outflow rate.
void finish_diagnostics(const Discretization& d, const SimulationState& before,
                        const SimulationState& after, double boundary_flux,
                        StepDiagnostics& diag);

/// Net outflow sum_i b_i - sum_{i fixed} r_i from the natural residual @p r.
double boundary_outflow(const BoundaryData& bc, std::span<const double> natural_residual);

struct AdaptiveStep {
    StepOutcome outcome;
    double dt_used = 0.0;
    double dt_next = 0.0;
};

/// Attempts a step of min(dt_pref, t_target - t); halves on NonConvergence
/// until dt_min (then StepFailed), grows by cfg.growth after an easy step.
AdaptiveStep step_adaptive(const SimulationState& s, double dt_pref, double t_target,
                           const TimeSchemeConfig& cfg, const Stepper& stepper);

}  // namespace rfct
