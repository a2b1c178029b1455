#include "rfct/solver.hpp"

#include "rfct/errors.hpp"

#include <cmath>
#include <tuple>
#include <limits>

namespace rfct {

namespace {

double& entry_ref(GraphOperator& op, int i, int j, int edge) {
    if (i == j) return op.diag()[i];
    return i < j ? op.upper()[edge] : op.lower()[edge];
}

/// Replaces fixed rows by identity rows.
void replace_fixed_rows(GraphOperator& J, const BoundaryData& bc) {
    const AdjacencyGraph& g = J.graph();
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (!bc.fixed(i)) continue;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int j = g.column(k);
            entry_ref(J, i, j, g.slot_edge(k)) = (i == j) ? 1.0 : 0.0;
        }
    }
}

void add_operator(GraphOperator& J, const GraphOperator& A, double scale) {
    for (std::size_t i = 0; i < J.diag().size(); ++i) J.diag()[i] += scale * A.diag()[i];
    for (std::size_t e = 0; e < J.upper().size(); ++e) {
        J.upper()[e] += scale * A.upper()[e];
        J.lower()[e] += scale * A.lower()[e];
    }
}

std::vector<double> delta_theta(const Discretization& d, std::span<const double> psi,
                                const StepInput& in) {
    std::vector<double> dtheta = d.moisture(psi);
    for (std::size_t i = 0; i < dtheta.size(); ++i) dtheta[i] -= in.theta_old[i];
    return dtheta;
}

void replace_fixed_residual(std::vector<double>& r, const BoundaryData& bc,
                            std::span<const double> psi) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (bc.fixed(static_cast<int>(i))) r[i] = psi[i] - bc.fixed_value(static_cast<int>(i));
    }
}

}  // namespace

void TimeSchemeConfig::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("Theta must lie in [0, 1]");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
        throw ConfigError("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
    }
    if (!(growth >= 1.0)) throw ConfigError("growth factor must be >= 1");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink factor must lie in (0, 1)");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
}

void NewtonConfig::validate() const {
    if (!(abs_tol > 0.0)) throw ConfigError("Newton abs_tol must be positive");
    if (max_iters < 1) throw ConfigError("Newton max_iters must be >= 1");
}

int BoundaryData::num_seepage() const {
    return static_cast<int>(std::count(seepage.begin(), seepage.end(), 1));
}

BoundaryData resolve_boundary(const Mesh& mesh, const BoundaryConditions& bcs) {
    for (const auto& [name, bc] : bcs) {
        if (!mesh.marker_id(name)) throw ConfigError("boundary condition for unknown marker '" + name + "'");
    }
    const int n = mesh.num_nodes();
    BoundaryData out;
    out.dirichlet.assign(n, 0);
    out.dirichlet_value.assign(n, 0.0);
    out.seepage.assign(n, 0);
    out.seepage_active.assign(n, 0);

    std::map<std::string, double> neumann;
    for (const auto& f : mesh.facets) {
        const std::string& name = mesh.marker_names[f.marker];
        auto it = bcs.find(name);
        if (it == bcs.end()) throw ConfigError("no boundary condition for marker '" + name + "'");
        const BoundaryCondition& bc = it->second;
        const int count = mesh.dim == 1 ? 1 : 2;
        for (int k = 0; k < count; ++k) {
            const int i = f.nodes[k];
            if (bc.kind == BoundaryKind::Dirichlet) {
                out.dirichlet[i] = 1;
                out.dirichlet_value[i] = bc.profile ? bc.profile(mesh.coords[i]) : bc.value;
            } else if (bc.kind == BoundaryKind::Seepage) {
                out.seepage[i] = 1;
            }
        }
        if (bc.kind == BoundaryKind::Neumann) neumann[name] = bc.value;
    }
    out.load = assemble_neumann(mesh, neumann);
    for (int i = 0; i < n; ++i) {
        if (out.dirichlet[i]) out.seepage[i] = 0;
    }
    return out;
}

Discretization Discretization::build(Mesh mesh, std::vector<SoilMaterial> by_zone,
                                     Quadrature quadrature, UpwindOptions upwind) {
    if (by_zone.size() != mesh.zone_names.size()) {
        throw ConfigError("expected one material per mesh zone (" +
                          std::to_string(mesh.zone_names.size()) + "), got " +
                          std::to_string(by_zone.size()));
    }
    Discretization d;
    d.graph = std::make_shared<const AdjacencyGraph>(build_adjacency(mesh));
    d.mesh = std::move(mesh);
    d.materials = std::move(by_zone);
    d.node_zone = node_zones(d.mesh);
    d.edge_weights = EdgeMaterialWeights(d.mesh, *d.graph);
    d.mass = assemble_consistent_mass(d.mesh, d.graph);
    d.lumped = lump_mass(d.mass);
    d.saturated = assemble_saturated_stiffness(d.mesh, d.graph, d.materials);
    d.quadrature = quadrature;
    d.upwind = upwind;
    return d;
}

std::vector<double> Discretization::moisture(std::span<const double> psi) const {
    std::vector<double> theta(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        theta[i] = node_material(static_cast<int>(i)).moisture_content(psi[i]);
    }
    return theta;
}

std::vector<double> Discretization::total_head(std::span<const double> psi) const {
    std::vector<double> phi(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) phi[i] = psi[i] + mesh.elevation[i];
    return phi;
}

std::vector<double> residual_high(const Discretization& d, const BoundaryData& bc,
                                  std::span<const double> psi, const StepInput& in,
                                  bool natural) {
    const int n = d.num_nodes();
    const auto dtheta = delta_theta(d, psi, in);
    std::vector<double> r = d.mass.apply(dtheta);
    for (auto& v : r) v /= in.dt;

    const auto A = assemble_galerkin_stiffness(d.mesh, d.graph, d.materials, psi, d.quadrature);
    const auto Aphi = A.apply(d.total_head(psi));
    for (int i = 0; i < n; ++i) r[i] += in.theta_scheme * (Aphi[i] + bc.load[i]);
    if (in.theta_scheme < 1.0) {
        const auto A_old =
            assemble_galerkin_stiffness(d.mesh, d.graph, d.materials, in.psi_old, d.quadrature);
        const auto Aphi_old = A_old.apply(d.total_head(in.psi_old));
        for (int i = 0; i < n; ++i) {
            r[i] += (1.0 - in.theta_scheme) * (Aphi_old[i] + bc.load[i]);
        }
    }
    if (!natural) replace_fixed_residual(r, bc, psi);
    return r;
}

std::vector<double> residual_low(const Discretization& d, const BoundaryData& bc,
                                 std::span<const double> psi, const StepInput& in,
                                 bool natural) {
    if (in.theta_scheme != 1.0) throw ConfigError("the low-order residual requires Theta = 1");
    const int n = d.num_nodes();
    const auto dtheta = delta_theta(d, psi, in);
    const auto phi = d.total_head(psi);
    const auto up = assemble_upwind_stiffness(d.saturated, psi, phi, d.materials, d.edge_weights,
                                              d.upwind);
    std::vector<double> r = up.op.apply(phi);
    for (int i = 0; i < n; ++i) r[i] += d.lumped.m[i] * dtheta[i] / in.dt + bc.load[i];
    if (!natural) replace_fixed_residual(r, bc, psi);
    return r;
}

std::vector<double> low_order_correction(const Discretization& d, std::span<const double> psi,
                                         const StepInput& in) {
    const int n = d.num_nodes();
    const auto dtheta = delta_theta(d, psi, in);
    const auto Mdtheta = d.mass.apply(dtheta);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = (d.lumped.m[i] * dtheta[i] - Mdtheta[i]) / in.dt;

    auto add_conductive = [&](std::span<const double> p, double weight) {
        if (weight == 0.0) return;
        const auto phi = d.total_head(p);
        const auto up =
            assemble_upwind_stiffness(d.saturated, p, phi, d.materials, d.edge_weights, d.upwind);
        const auto A = assemble_galerkin_stiffness(d.mesh, d.graph, d.materials, p, d.quadrature);
        const auto low = up.op.apply(phi);
        const auto high = A.apply(phi);
        for (int i = 0; i < n; ++i) f[i] += weight * (low[i] - high[i]);
    };
    add_conductive(psi, in.theta_scheme);
    add_conductive(in.psi_old, 1.0 - in.theta_scheme);
    return f;
}

GraphOperator jacobian_high(const Discretization& d, const BoundaryData& bc,
                            std::span<const double> psi, const StepInput& in) {
    const AdjacencyGraph& g = *d.graph;
    GraphOperator J(d.graph, false);
    std::vector<double> capacity(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        capacity[i] = d.node_material(static_cast<int>(i)).moisture_capacity(psi[i]);
    }
    // M diag(theta') / dt
    for (int i = 0; i < g.num_nodes(); ++i) {
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int j = g.column(k);
            const int e = g.slot_edge(k);
            entry_ref(J, i, j, e) += d.mass.at(i, j, e) * capacity[j] / in.dt;
        }
    }
    const double w = in.theta_scheme;
    const auto A = assemble_galerkin_stiffness(d.mesh, d.graph, d.materials, psi, d.quadrature);
    add_operator(J, A, w);

    // sum_e dkappa_e/dpsi_k (S^e phi)
    const auto phi = d.total_head(psi);
    const auto quad = element_quadrature(d.mesh.dim, d.quadrature);
    const auto edges = element_edges(d.mesh, g);
    const int npe = d.mesh.nodes_per_element();
    for (int e = 0; e < d.mesh.num_elements(); ++e) {
        const SoilMaterial& mat = d.materials[d.mesh.element_zone[e]];
        const auto& el = d.mesh.elements[e];
        std::array<double, 3> dkappa{};
        element_conductivity_factor(d.mesh, e, mat, psi, quad, &dkappa);
        const auto s = element_stiffness(d.mesh, element_geometry(d.mesh, e), mat.ks());
        for (int a = 0; a < npe; ++a) {
            double sphi = 0.0;
            for (int b = 0; b < npe; ++b) sphi += s[a][b] * phi[el[b]];
            for (int b = 0; b < npe; ++b) {
                const int edge = a == b ? -1 : g.edge_index(el[a], el[b]);
                entry_ref(J, el[a], el[b], edge) += w * dkappa[b] * sphi;
            }
        }
    }
    replace_fixed_rows(J, bc);
    return J;
}

GraphOperator jacobian_low(const Discretization& d, const BoundaryData& bc,
                           std::span<const double> psi, const StepInput& in) {
    if (in.theta_scheme != 1.0) throw ConfigError("the low-order Jacobian requires Theta = 1");
    const AdjacencyGraph& g = *d.graph;
    GraphOperator J(d.graph, false);
    for (int i = 0; i < g.num_nodes(); ++i) {
        J.diag()[i] = d.lumped.m[i] * d.node_material(i).moisture_capacity(psi[i]) / in.dt;
    }
    const auto phi = d.total_head(psi);
    const auto up =
        assemble_upwind_stiffness(d.saturated, psi, phi, d.materials, d.edge_weights, d.upwind);
    add_operator(J, up.op, 1.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        const int u = up.upwind_node[e];
        const double dk =
            d.edge_weights.relative_permeability_derivative(e, psi[u], d.materials) * up.base[e];
        const double v = dk * (phi[j] - phi[i]);
        entry_ref(J, i, u, i == u ? -1 : e) += v;
        entry_ref(J, j, u, j == u ? -1 : e) -= v;
    }
    replace_fixed_rows(J, bc);
    return J;
}

SparseDirectSolver::SparseDirectSolver(std::shared_ptr<const AdjacencyGraph> graph)
    : graph_(std::move(graph)) {
    const AdjacencyGraph& g = *graph_;
    const int n = g.num_nodes();
    matrix_.resize(n, n);
    Eigen::VectorXi nnz(n);
    for (int j = 0; j < n; ++j) nnz[j] = g.row_end(j) - g.row_begin(j);
    matrix_.reserve(nnz);
    // The pattern is symmetric, so column j holds the rows listed in row j.
    for (int j = 0; j < n; ++j) {
        for (int k = g.row_begin(j); k < g.row_end(j); ++k) matrix_.insert(g.column(k), j) = 1.0;
    }
    matrix_.makeCompressed();
    lu_.analyzePattern(matrix_);
}

std::vector<double> SparseDirectSolver::solve(const GraphOperator& jacobian,
                                              std::span<const double> rhs) {
    const AdjacencyGraph& g = *graph_;
    const int n = g.num_nodes();
    double* values = matrix_.valuePtr();
    for (int j = 0; j < n; ++j) {
        for (int k = g.row_begin(j); k < g.row_end(j); ++k) {
            values[k] = jacobian.at(g.column(k), j, g.slot_edge(k));
        }
    }
    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success) {
        throw NonConvergence("singular Jacobian", std::numeric_limits<double>::quiet_NaN(), 0);
    }
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::VectorXd x = lu_.solve(b);
    const Eigen::VectorXd r = b - matrix_ * x;
    if (r.lpNorm<Eigen::Infinity>() > 1e-12 * b.lpNorm<Eigen::Infinity>()) x += lu_.solve(r);
    return {x.data(), x.data() + n};
}

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          SparseDirectSolver& linear, std::vector<double> guess,
                          const NewtonConfig& cfg) {
    NewtonResult res;
    res.psi = std::move(guess);
    std::vector<double> r = residual(res.psi);
    res.residual_norm = max_norm(r);
    if (!std::isfinite(res.residual_norm)) {
        throw NonConvergence("non-finite residual at the initial guess", res.residual_norm, 0);
    }
    auto converged = [&](std::span<const double> v) {
        if (!(res.residual_norm < cfg.abs_tol)) return false;
        if (!cfg.balance_check) return true;
        double sum = 0.0;
        for (double x : v) sum += x;
        return std::abs(sum) < cfg.abs_tol;
    };
    std::vector<double> trial(res.psi.size());
    while (!converged(r)) {
        if (res.iterations >= cfg.max_iters) {
            throw NonConvergence("Newton did not converge in " + std::to_string(cfg.max_iters) +
                                     " iterations",
                                 res.residual_norm, res.iterations);
        }
        const auto dx = linear.solve(jacobian(res.psi), r);
        double step = 1.0;
        std::vector<double> r_trial;
        double norm_trial = 0.0;
        for (int halving = 0;; ++halving) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = res.psi[i] - step * dx[i];
            r_trial = residual(trial);
            norm_trial = max_norm(r_trial);
            const bool last = !cfg.line_search || halving == 4;
            if (norm_trial < res.residual_norm || (last && std::isfinite(norm_trial))) break;
            if (last) {
                throw NonConvergence("non-finite Newton iterate", norm_trial, res.iterations + 1);
            }
            step *= 0.5;
        }
        res.psi.swap(trial);
        r.swap(r_trial);
        res.residual_norm = norm_trial;
        ++res.iterations;
    }
    return res;
}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Galerkin: return "galerkin";
        case Scheme::LowOrder: return "low_order";
        case Scheme::Fct: return "fct";
    }
    return "";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "galerkin") return Scheme::Galerkin;
    if (name == "low_order") return Scheme::LowOrder;
    if (name == "fct") return Scheme::Fct;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

SimulationState make_initial_state(const Discretization& d, const BoundaryData& bc,
                                   std::vector<double> psi0) {
    SimulationState s;
    s.psi = std::move(psi0);
    for (std::size_t i = 0; i < s.psi.size(); ++i) {
        if (bc.dirichlet[i]) s.psi[i] = bc.dirichlet_value[i];
    }
    s.theta = d.moisture(s.psi);
    s.seepage_active.assign(s.psi.size(), 0);
    for (std::size_t i = 0; i < s.psi.size(); ++i) {
        if (bc.seepage[i] && s.psi[i] >= 0.0) s.seepage_active[i] = 1;
    }
    return s;
}

BoundaryData boundary_for(const BoundaryData& bc, const SimulationState& s) {
    BoundaryData out = bc;
    if (!s.seepage_active.empty()) out.seepage_active = s.seepage_active;
    return out;
}

SeepageSolve iterate_seepage(BoundaryData& bc, const BoundarySolveFn& solve, double tol,
                             std::vector<std::string>& warnings, int max_switches) {
    SeepageSolve out;
    const int n = static_cast<int>(bc.seepage.size());
    for (;;) {
        std::tie(out.psi, out.natural_residual) = solve(bc);
        std::vector<char> next = bc.seepage_active;
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            if (!bc.seepage[i]) continue;
            if (next[i] && out.natural_residual[i] > tol) {
                next[i] = 0;
                changed = true;
            } else if (!next[i] && out.psi[i] >= 0.0) {
                next[i] = 1;
                changed = true;
            }
        }
        if (!changed) return out;
        if (out.switches == max_switches) {
            warnings.push_back("seepage face did not settle after " +
                               std::to_string(max_switches) + " switches; last state accepted");
            return out;
        }
        bc.seepage_active = std::move(next);
        ++out.switches;
    }
}

double boundary_outflow(const BoundaryData& bc, std::span<const double> natural_residual) {
    double f = 0.0;
    for (std::size_t i = 0; i < natural_residual.size(); ++i) {
        f += bc.load[i];
        if (bc.fixed(static_cast<int>(i))) f -= natural_residual[i];
    }
    return f;
}

void finish_diagnostics(const Discretization& d, const SimulationState& before,
                        const SimulationState& after, double boundary_flux,
                        StepDiagnostics& diag) {
    const int n = d.num_nodes();
    diag.theta_min = std::numeric_limits<double>::infinity();
    diag.theta_max = -diag.theta_min;
    diag.psi_min = diag.theta_min;
    diag.psi_max = diag.theta_max;
    diag.bound_violations = 0;
    diag.mass_change = 0.0;
    for (int i = 0; i < n; ++i) {
        const SoilMaterial& mat = d.node_material(i);
        const double th = after.theta[i];
        diag.theta_min = std::min(diag.theta_min, th);
        diag.theta_max = std::max(diag.theta_max, th);
        diag.psi_min = std::min(diag.psi_min, after.psi[i]);
        diag.psi_max = std::max(diag.psi_max, after.psi[i]);
        if (th < mat.theta_r() - 1e-10 || th > mat.theta_s() + 1e-10) ++diag.bound_violations;
        diag.mass_change += d.lumped.m[i] * (th - before.theta[i]);
    }
    diag.boundary_flux = boundary_flux;
    diag.mass_balance = diag.mass_change / diag.dt + boundary_flux;
}

namespace {

using ResidualAt = std::vector<double> (*)(const Discretization&, const BoundaryData&,
                                           std::span<const double>, const StepInput&, bool);
using JacobianAt = GraphOperator (*)(const Discretization&, const BoundaryData&,
                                     std::span<const double>, const StepInput&);

StepOutcome implicit_step(const Discretization& d, const BoundaryData& bc0,
                          const SimulationState& s, double dt, double theta_scheme,
                          const NewtonConfig& cfg, SparseDirectSolver& linear, ResidualAt res,
                          JacobianAt jac, int StepDiagnostics::*counter) {
    StepOutcome out;
    out.diag.dt = dt;
    const StepInput in{s.psi, s.theta, dt, theta_scheme};
    BoundaryData bc = boundary_for(bc0, s);
    auto solve = [&](const BoundaryData& b) {
        std::vector<double> guess = s.psi;
        for (std::size_t i = 0; i < guess.size(); ++i) {
            if (b.fixed(static_cast<int>(i))) guess[i] = b.fixed_value(static_cast<int>(i));
        }
        auto r = newton_solve([&](std::span<const double> p) { return res(d, b, p, in, false); },
                              [&](std::span<const double> p) { return jac(d, b, p, in); },
                              linear, std::move(guess), cfg);
        out.diag.*counter += r.iterations;
        for (std::size_t i = 0; i < r.psi.size(); ++i) {
            if (b.fixed(static_cast<int>(i))) r.psi[i] = b.fixed_value(static_cast<int>(i));
        }
        auto natural = res(d, b, r.psi, in, true);
        return std::make_pair(std::move(r.psi), std::move(natural));
    };
    auto solved = iterate_seepage(bc, solve, cfg.abs_tol, out.diag.warnings);
    out.diag.seepage_switches = solved.switches;
    out.state.t = s.t + dt;
    out.state.psi = std::move(solved.psi);
    out.state.theta = d.moisture(out.state.psi);
    out.state.seepage_active = bc.seepage_active;
    finish_diagnostics(d, s, out.state, boundary_outflow(bc, solved.natural_residual), out.diag);
    return out;
}

}  // namespace

StepOutcome step_galerkin(const Discretization& d, const BoundaryData& bc,
                          const SimulationState& s, double dt, double theta_scheme,
                          const NewtonConfig& cfg, SparseDirectSolver& linear) {
    return implicit_step(d, bc, s, dt, theta_scheme, cfg, linear, &residual_high, &jacobian_high,
                         &StepDiagnostics::newton_high);
}

StepOutcome step_low_order(const Discretization& d, const BoundaryData& bc,
                           const SimulationState& s, double dt, const NewtonConfig& cfg,
                           SparseDirectSolver& linear) {
    return implicit_step(d, bc, s, dt, 1.0, cfg, linear, &residual_low, &jacobian_low,
                         &StepDiagnostics::newton_low);
}

AdaptiveStep step_adaptive(const SimulationState& s, double dt_pref, double t_target,
                           const TimeSchemeConfig& cfg, const Stepper& stepper) {
    double dt = std::clamp(dt_pref, cfg.dt_min, cfg.dt_max);
    int retries = 0;
    for (;;) {
        const double remaining = t_target - s.t;
        const bool last = remaining <= dt * (1.0 + 1e-9);
        const double dt_try = last ? remaining : dt;
        try {
            AdaptiveStep out{stepper(s, dt_try), dt_try, dt};
            out.outcome.state.t = last ? t_target : s.t + dt_try;
            out.outcome.diag.t = out.outcome.state.t;
            out.outcome.diag.dt = dt_try;
            out.outcome.diag.retries = retries;
            if (out.outcome.diag.newton_iterations() <= cfg.growth_iterations &&
                dt_try >= dt * (1.0 - 1e-9)) {
                out.dt_next = std::min(dt * cfg.growth, cfg.dt_max);
            }
            return out;
        } catch (const NonConvergence& e) {
            dt = std::min(dt, dt_try) * cfg.shrink;
            ++retries;
            if (dt < cfg.dt_min * (1.0 - 1e-12)) {
                throw StepFailed("step at t = " + std::to_string(s.t) +
                                 " failed at the minimum step size: " + e.what());
            }
        }
    }
}

}  // namespace rfct
