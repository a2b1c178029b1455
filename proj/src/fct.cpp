#include "rfct/fct.hpp"

#include "rfct/errors.hpp"
#include "rfct/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rfct {

BoundsVariant bounds_variant_from_string(std::string_view name) {
    if (name == "low") return BoundsVariant::Low;
    if (name == "low_and_old") return BoundsVariant::LowAndOld;
    throw ConfigError("unknown bounds variant '" + std::string(name) + "'");
}

std::string_view to_string(BoundsVariant v) {
    return v == BoundsVariant::Low ? "low" : "low_and_old";
}

HighOrderStart high_order_start_from_string(std::string_view name) {
    if (name == "low_order") return HighOrderStart::LowOrder;
    if (name == "old") return HighOrderStart::Old;
    throw ConfigError("unknown high-order start '" + std::string(name) + "'");
}

std::string_view to_string(HighOrderStart v) {
    return v == HighOrderStart::LowOrder ? "low_order" : "old";
}

EdgeFluxSet compute_raw_fluxes(const Discretization& d, std::span<const double> psi_high,
                               std::span<const double> psi_low,
                               std::span<const double> theta_old, double dt) {
    const AdjacencyGraph& g = *d.graph;
    const auto theta_high = d.moisture(psi_high);
    const auto phi_high = d.total_head(psi_high);
    const auto phi_low = d.total_head(psi_low);
    const auto A = assemble_galerkin_stiffness(d.mesh, d.graph, d.materials, psi_high, d.quadrature);
    const auto low = assemble_upwind_stiffness(d.saturated, psi_low, phi_low, d.materials,
                                               d.edge_weights, d.upwind);
    EdgeFluxSet out;
    out.f.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        const double mass = d.mass.upper()[e] *
                            ((theta_high[i] - theta_old[i]) - (theta_high[j] - theta_old[j])) / dt;
        out.f[e] = mass - A.upper()[e] * (phi_high[j] - phi_high[i]) +
                   low.op.upper()[e] * (phi_low[j] - phi_low[i]);
    }
    return out;
}

void check_flux_consistency(const Discretization& d, const BoundaryData& bc,
                            const EdgeFluxSet& fluxes, std::span<const double> theta_high,
                            std::span<const double> theta_low, double dt, double tol) {
    const AdjacencyGraph& g = *d.graph;
    std::vector<double> sum(g.num_nodes(), 0.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        sum[i] += fluxes.f[e];
        sum[j] -= fluxes.f[e];
    }
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (bc.fixed(i)) continue;
        const double gap = d.lumped.m[i] * (theta_high[i] - theta_low[i]) / dt - sum[i];
        if (!(std::abs(gap) <= tol)) {
            throw ConsistencyError("raw fluxes do not reconstruct the high-order moisture at node " +
                                   std::to_string(i) + " (gap " + std::to_string(gap) + ")");
        }
    }
}

LimiterBounds compute_bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
                             BoundsVariant variant, std::span<const double> theta_old,
                             Backend backend) {
    LimiterBounds b;
    b.lo.resize(g.num_nodes());
    b.hi.resize(g.num_nodes());
    if (variant == BoundsVariant::LowAndOld && theta_old.size() != theta_low.size()) {
        throw InvalidParameter("low_and_old bounds need the old moisture field");
    }
    const auto old = variant == BoundsVariant::LowAndOld ? theta_old : std::span<const double>{};
    if (backend == Backend::Serial) {
        kernels::serial::bounds(g, theta_low, old, b.lo, b.hi);
    } else {
        kernels::omp::bounds(g, theta_low, old, b.lo, b.hi);
    }
    return b;
}

std::vector<double> apply_correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                                     const EdgeFluxSet& fluxes, const CorrectionFactors& alpha,
                                     std::span<const double> lumped, double dt, Backend backend) {
    std::vector<double> out(g.num_nodes());
    if (backend == Backend::Serial) {
        kernels::serial::correction(g, theta_low, fluxes.f, alpha.alpha, lumped, dt, out);
    } else {
        kernels::omp::correction(g, theta_low, fluxes.f, alpha.alpha, lumped, dt, out);
    }
    return out;
}

CorrectionFactors zalesak_limit(const AdjacencyGraph& g, const EdgeFluxSet& fluxes,
                                const LimiterBounds& bounds, std::span<const double> theta_low,
                                std::span<const double> lumped, double dt,
                                std::span<const char> fixed, const LimiterOptions& opt) {
    const int n = g.num_nodes();
    CorrectionFactors out;
    out.alpha.assign(g.num_edges(), 1.0);
    if (opt.admissible_shortcut) {
        const auto full = apply_correction(g, theta_low, fluxes, out, lumped, dt, opt.backend);
        bool admissible = true;
        for (int i = 0; i < n && admissible; ++i) {
            if (!fixed.empty() && fixed[i]) continue;
            admissible = full[i] >= bounds.lo[i] && full[i] <= bounds.hi[i];
        }
        if (admissible) return out;
    }
    const kernels::LimiterInput in{fluxes.f, bounds.lo, bounds.hi, theta_low, lumped, fixed, dt};
    std::vector<double> r_plus(n), r_minus(n);
    if (opt.backend == Backend::Serial) {
        kernels::serial::limiter_ratios(g, in, r_plus, r_minus);
        kernels::serial::limiter_alpha(g, fluxes.f, r_plus, r_minus, out.alpha);
    } else {
        kernels::omp::limiter_ratios(g, in, r_plus, r_minus);
        kernels::omp::limiter_alpha(g, fluxes.f, r_plus, r_minus, out.alpha);
    }
    return out;
}

StepOutcome fct_step(const Discretization& d, const BoundaryData& bc, const SimulationState& s,
                     double dt, const NewtonConfig& newton, const FctConfig& cfg,
                     SparseDirectSolver& linear, FctDetail* detail) {
    const AdjacencyGraph& g = *d.graph;
    const int n = d.num_nodes();

    // 1. low-order predictor (settles the seepage set)
    StepOutcome low = step_low_order(d, bc, s, dt, newton, linear);
    const BoundaryData b = boundary_for(bc, low.state);
    const std::vector<double>& psi_low = low.state.psi;
    const std::vector<double>& theta_low = low.state.theta;
    std::vector<char> fixed(n);
    for (int i = 0; i < n; ++i) fixed[i] = b.fixed(i) ? 1 : 0;

    StepOutcome out;
    out.diag = low.diag;

    // 2. Galerkin solution for the flux computation
    const StepInput in{s.psi, s.theta, dt, 1.0};
    std::vector<double> psi_high;
    try {
        std::vector<double> guess = cfg.high_start == HighOrderStart::LowOrder ? psi_low : s.psi;
        for (int i = 0; i < n; ++i) {
            if (fixed[i]) guess[i] = b.fixed_value(i);
        }
        auto r = newton_solve(
            [&](std::span<const double> p) { return residual_high(d, b, p, in); },
            [&](std::span<const double> p) { return jacobian_high(d, b, p, in); }, linear,
            std::move(guess), newton);
        out.diag.newton_high = r.iterations;
        psi_high = std::move(r.psi);
    } catch (const NonConvergence& e) {
        out.diag.high_order_fallback = true;
        out.diag.newton_high = e.iterations();
        out.diag.warnings.push_back(std::string("high-order solve failed (") + e.what() +
                                    "); step uses the low-order solution");
    }

    // 3. raw antidiffusive fluxes
    EdgeFluxSet fluxes;
    if (psi_high.empty()) {
        fluxes.f.assign(g.num_edges(), 0.0);
    } else {
        fluxes = compute_raw_fluxes(d, psi_high, psi_low, s.theta, dt);
        check_flux_consistency(d, b, fluxes, d.moisture(psi_high), theta_low, dt,
                               cfg.consistency_factor * newton.abs_tol);
    }

    // 4. limiting and corrected moisture
    LimiterBounds bounds = compute_bounds(g, theta_low, cfg.bounds, s.theta, cfg.limiter.backend);
    // Neighbours in another zone may carry moisture outside this node's range.
    for (int i = 0; i < n; ++i) {
        const SoilMaterial& mat = d.node_material(i);
        bounds.lo[i] = std::max(bounds.lo[i], mat.theta_r());
        bounds.hi[i] = std::min(bounds.hi[i], mat.theta_s());
    }
    CorrectionFactors alpha;
    if (out.diag.high_order_fallback) {
        alpha.alpha.assign(g.num_edges(), 0.0);
    } else {
        alpha = zalesak_limit(g, fluxes, bounds, theta_low, d.lumped.m, dt, fixed, cfg.limiter);
    }
    const auto theta_virtual =
        apply_correction(g, theta_low, fluxes, alpha, d.lumped.m, dt, cfg.limiter.backend);

    SimulationState& next = out.state;
    next.t = s.t + dt;
    next.seepage_active = low.state.seepage_active;
    next.theta = theta_virtual;
    for (int i = 0; i < n; ++i) {
        if (fixed[i]) next.theta[i] = theta_low[i];
    }

    // 5. pressure recovery
    next.psi.resize(n);
    if (cfg.limiter.backend == Backend::Serial) {
        kernels::serial::recover(d.materials, d.node_zone, next.theta, psi_low, next.psi);
    } else {
        kernels::omp::recover(d.materials, d.node_zone, next.theta, psi_low, next.psi);
    }
    for (int i = 0; i < n; ++i) {
        if (fixed[i]) next.psi[i] = psi_low[i];
    }

    // diagnostics
    double total_low = 0.0, total_virtual = 0.0, into_fixed = 0.0;
    for (int i = 0; i < n; ++i) {
        total_low += d.lumped.m[i] * theta_low[i];
        total_virtual += d.lumped.m[i] * theta_virtual[i];
    }
    out.diag.limited_edges = 0;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (alpha.alpha[e] < 1.0) ++out.diag.limited_edges;
        const auto [i, j] = g.edge(e);
        if (fixed[i] != fixed[j]) {
            const double af = alpha.alpha[e] * fluxes.f[e];
            into_fixed += fixed[j] ? af : -af;
        }
    }
    out.diag.fct_conservation = std::abs(total_virtual - total_low) / std::abs(total_low);
    out.diag.fct_bound_excess = 0.0;
    out.diag.recovery_error = 0.0;
    for (int i = 0; i < n; ++i) {
        if (fixed[i]) continue;
        const double th = next.theta[i];
        out.diag.fct_bound_excess =
            std::max({out.diag.fct_bound_excess, th - bounds.hi[i], bounds.lo[i] - th});
        out.diag.recovery_error =
            std::max(out.diag.recovery_error,
                     std::abs(d.node_material(i).moisture_content(next.psi[i]) - th));
    }
    out.diag.dt = dt;
    finish_diagnostics(d, s, next, low.diag.boundary_flux - into_fixed, out.diag);

    if (detail) {
        detail->psi_low = psi_low;
        detail->theta_low = theta_low;
        detail->psi_high = std::move(psi_high);
        detail->fluxes = std::move(fluxes);
        detail->bounds = bounds;
        detail->alpha = std::move(alpha);
        detail->theta_virtual = theta_virtual;
    }
    return out;
}

}  // namespace rfct
