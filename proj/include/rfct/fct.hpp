/**
 * @file fct.hpp
 * @brief Flux-corrected transport step: raw antidiffusive fluxes between the
 * Galerkin and low-order solutions, Zalesak limiting, corrected moisture
 * update and nodal pressure recovery.
 */
#pragma once

#include "rfct/solver.hpp"

#include <span>
#include <vector>

namespace rfct {

/// Antidiffusive fluxes per canonical edge: @c f[e] = f_ij for edge (i, j), i < j.
struct EdgeFluxSet {
    std::vector<double> f;

    /// f_ij for the ordered pair (i, j) on edge e.
    double flux(int i, int j, int e) const { return i < j ? f[e] : -f[e]; }
};

struct LimiterBounds {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// alpha_ij per canonical edge (symmetric by construction).
struct CorrectionFactors {
    std::vector<double> alpha;
};

enum class BoundsVariant { Low, LowAndOld };
enum class HighOrderStart { LowOrder, Old };
enum class Backend { Serial, OpenMP };

BoundsVariant bounds_variant_from_string(std::string_view name);
std::string_view to_string(BoundsVariant v);
HighOrderStart high_order_start_from_string(std::string_view name);
std::string_view to_string(HighOrderStart v);

/// f_ij = m_ij[(theta_i^H - theta_i^n) - (theta_j^H - theta_j^n)]/dt
///        - a_ij(psi^H)(phi_j^H - phi_i^H) + a~_ij(psi^L)(phi_j^L - phi_i^L)
EdgeFluxSet compute_raw_fluxes(const Discretization& d, std::span<const double> psi_high,
                               std::span<const double> psi_low,
                               std::span<const double> theta_old, double dt);

/// Throws ConsistencyError when |m_i (theta_i^H - theta_i^L)/dt - sum_j f_ij| > tol
/// at a node that is not fixed.
void check_flux_consistency(const Discretization& d, const BoundaryData& bc,
                            const EdgeFluxSet& fluxes, std::span<const double> theta_high,
                            std::span<const double> theta_low, double dt, double tol);

/// min/max of theta^L over N_i; LowAndOld also includes theta^n over N_i.
LimiterBounds compute_bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
                             BoundsVariant variant = BoundsVariant::Low,
                             std::span<const double> theta_old = {},
                             Backend backend = Backend::OpenMP);

struct LimiterOptions {
    /// Return alpha = 1 on every edge when the unlimited update already meets
    /// every bound; otherwise (and when false) plain Zalesak.
    bool admissible_shortcut = true;
    Backend backend = Backend::OpenMP;
};

/// Zalesak's limiter. Nodes flagged in @p fixed get R+- = 1.
CorrectionFactors zalesak_limit(const AdjacencyGraph& g, const EdgeFluxSet& fluxes,
                                const LimiterBounds& bounds, std::span<const double> theta_low,
                                std::span<const double> lumped, double dt,
                                std::span<const char> fixed = {}, const LimiterOptions& opt = {});

/// theta_i = theta_i^L + dt/m_i sum_j alpha_ij f_ij at every node.
std::vector<double> apply_correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                                     const EdgeFluxSet& fluxes, const CorrectionFactors& alpha,
                                     std::span<const double> lumped, double dt,
                                     Backend backend = Backend::OpenMP);

struct FctConfig {
    BoundsVariant bounds = BoundsVariant::Low;
    HighOrderStart high_start = HighOrderStart::LowOrder;
    LimiterOptions limiter;
    /// Consistency check tolerance as a multiple of the Newton tolerance.
    double consistency_factor = 10.0;

    bool operator==(const FctConfig& o) const {
        return bounds == o.bounds && high_start == o.high_start &&
               limiter.admissible_shortcut == o.limiter.admissible_shortcut &&
               limiter.backend == o.limiter.backend && consistency_factor == o.consistency_factor;
    }
};

/// Intermediate fields of one FCT step, kept for auditing.
struct FctDetail {
    std::vector<double> psi_low;
    std::vector<double> theta_low;
    std::vector<double> psi_high;
    EdgeFluxSet fluxes;
    LimiterBounds bounds;
    CorrectionFactors alpha;
    std::vector<double> theta_virtual;  ///< corrected update including fixed nodes
};

/// One backward Euler FCT step. Propagates NonConvergence of the low-order
/// solve; a failed Galerkin solve falls back to alpha = 0 with a warning.
StepOutcome fct_step(const Discretization& d, const BoundaryData& bc, const SimulationState& s,
                     double dt, const NewtonConfig& newton, const FctConfig& cfg,
                     SparseDirectSolver& linear, FctDetail* detail = nullptr);

}  // namespace rfct
