/**
 * @file analytic.hpp
 * @brief Tracy's closed-form steady and transient solutions of Richards'
 * equation for Gardner soil on [0,a] x [0,L].
 *
 * With the Kirchhoff variable hbar = e^(alpha psi) - e^(alpha psi_r) the
 * equation becomes  lap(hbar) + alpha d(hbar)/dz = c d(hbar)/dt,
 * c = alpha (theta_s - theta_r) / K_s. Boundary data: top
 * hbar = hbar0 (1 - cos(2 pi x / a)) / 2, bottom psi = psi_r, no-flow sides,
 * initial psi = psi_r.
 *
 * The transient series decays with gamma1(k) = (lambda_k^2 + alpha^2/4)/c for
 * the x-independent part and gamma2(k) = (lambda_k^2 + (2 pi/a)^2 + alpha^2/4)/c
 * for the cos(2 pi x/a) part.
 */
#pragma once

#include "rfct/mesh.hpp"

#include <functional>
#include <span>

namespace rfct {

struct TracyProblem {
    double a = 10.0;         ///< width [m]
    double L = 10.0;         ///< height [m]
    double alpha = 0.164;    ///< Gardner parameter [1/m]
    double psi_r = -15.24;   ///< reference (initial) head [m]
    double ks = 2.04;        ///< saturated conductivity [m/day]
    double theta_r = 0.05;
    double theta_s = 0.30;
    int series_terms = 200;

    void validate() const;

    double c() const;
    double hbar0() const;
    double beta1() const;
    double lambda(int k) const;
    double gamma1(int k) const;
    double gamma2(int k) const;

    /// Top Dirichlet head psi_top(x).
    double top_head(double x) const;

    bool operator==(const TracyProblem&) const = default;
};

double steady_kirchhoff(const TracyProblem& p, double x, double z);
double steady_head(const TracyProblem& p, double x, double z);

/// Transient part phibar(x, z, t) of the Kirchhoff variable. The series is
/// extended past series_terms until the tail bound is below 1e-10; throws
/// NonConvergence if that needs more than 2^20 terms. At t <= 0 returns
/// -hbar_ss below the top (the initial condition).
double transient_correction(const TracyProblem& p, double x, double z, double t);
/// Throws DomainError when the logarithm argument is not positive.
double transient_head(const TracyProblem& p, double x, double z, double t);

/// L2 norm of psi_h - exact over the mesh with a per-element rule exact for
/// degree-4 polynomials (6-point triangle rule, 3-point Gauss on intervals).
double l2_error(const Mesh& mesh, std::span<const double> psi_h,
                const std::function<double(const Point&)>& exact);

}  // namespace rfct
