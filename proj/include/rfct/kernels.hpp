/**
 * @file kernels.hpp
 * @brief Node and edge loops of the flux-corrected step.
 *
 * Two implementations with identical signatures: @c serial scatters over the
 * edge list and is the reference; @c omp gathers over CSR rows so that every
 * node is owned by one thread. Per-node results agree up to summation order.
 * Fluxes and correction factors are stored per canonical edge (i < j); the
 * flux from j to i is the negated value.
 */
#pragma once

#include "rfct/constitutive.hpp"
#include "rfct/mesh.hpp"

#include <span>

namespace rfct::kernels {

/// Arguments shared by the limiter kernels.
struct LimiterInput {
    std::span<const double> flux;        ///< f_ij per edge
    std::span<const double> lo;          ///< theta_i^min
    std::span<const double> hi;          ///< theta_i^max
    std::span<const double> theta_low;   ///< theta^L
    std::span<const double> lumped;      ///< m_i
    std::span<const char> fixed;         ///< nodes with unlimited headroom (may be empty)
    double dt = 0.0;
};

namespace serial {

/// lo/hi = min/max of theta_low over N_i, widened by theta_old over N_i when
/// theta_old is non-empty.
void bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
            std::span<const double> theta_old, std::span<double> lo, std::span<double> hi);
/// Zalesak's nodal ratios R_i^+ and R_i^-.
void limiter_ratios(const AdjacencyGraph& g, const LimiterInput& in, std::span<double> r_plus,
                    std::span<double> r_minus);
/// alpha_ij from the nodal ratios and the flux signs.
void limiter_alpha(const AdjacencyGraph& g, std::span<const double> flux,
                   std::span<const double> r_plus, std::span<const double> r_minus,
                   std::span<double> alpha);
/// out_i = theta_low_i + dt/m_i sum_j alpha_ij f_ij for every node.
void correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                std::span<const double> flux, std::span<const double> alpha,
                std::span<const double> lumped, double dt, std::span<double> out);
/// psi_i = recover_pressure(material of i, theta_i, psi_init_i).
void recover(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
             std::span<const double> theta, std::span<const double> psi_init,
             std::span<double> psi);
void moisture(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
              std::span<const double> psi, std::span<double> theta);

}  // namespace serial

namespace omp {

void bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
            std::span<const double> theta_old, std::span<double> lo, std::span<double> hi);
void limiter_ratios(const AdjacencyGraph& g, const LimiterInput& in, std::span<double> r_plus,
                    std::span<double> r_minus);
void limiter_alpha(const AdjacencyGraph& g, std::span<const double> flux,
                   std::span<const double> r_plus, std::span<const double> r_minus,
                   std::span<double> alpha);
void correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                std::span<const double> flux, std::span<const double> alpha,
                std::span<const double> lumped, double dt, std::span<double> out);
void recover(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
             std::span<const double> theta, std::span<const double> psi_init,
             std::span<double> psi);
void moisture(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
              std::span<const double> psi, std::span<double> theta);

}  // namespace omp

}  // namespace rfct::kernels
