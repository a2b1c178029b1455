/**
 * @file constitutive.hpp
 * @brief Pressure-saturation-conductivity closures for variably saturated soil.
 *
 * All closures are written in terms of the pressure head psi [m], negative in
 * unsaturated soil. Every closure has a saturation threshold psi_t: for
 * psi >= psi_t the soil is saturated, S_e = 1 and k_r = 1.
 *
 *   van Genuchten:           S_e = (1 + (alpha |psi|)^n)^(-m)                psi_t = 0
 *   modified van Genuchten:  S_e = (1 + (alpha |psi|)^n)^(-m) / S_E*         psi_t = -psi_e
 *                            S_E* = (1 + (alpha psi_e)^n)^(-m)
 *   Brooks-Corey:            S_e = (alpha |psi|)^(-n)                        psi_t = -1/alpha
 *   Haverkamp:               S_e = B / (B + |psi|^beta)                      psi_t = 0
 *   Gardner:                 S_e = exp(alpha psi)                            psi_t = 0
 *
 * Derivatives are closed form. At a threshold where the closure has a kink
 * (Brooks-Corey, Haverkamp with beta <= 1) the unsaturated one-sided
 * derivative is returned exactly at psi = psi_t.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace rfct {

enum class RetentionKind { BrooksCorey, Haverkamp, VanGenuchten, ModifiedVanGenuchten, Gardner };

std::string_view to_string(RetentionKind kind);
RetentionKind retention_kind_from_string(std::string_view name);

/// Parameters of one retention/conductivity closure. Which fields are used
/// depends on @c kind; unused fields keep their defaults.
struct RetentionModel {
    RetentionKind kind = RetentionKind::VanGenuchten;
    double alpha = 1.0;  ///< 1/m; for Haverkamp the k_r exponent (dimensionless)
    double n = 2.0;
    double m = 0.5;
    double L = 0.5;      ///< pore connectivity (Mualem / Brooks-Corey)
    double A = 1.0;      ///< Haverkamp k_r scale
    double B = 1.0;      ///< Haverkamp S_e scale
    double beta = 1.0;   ///< Haverkamp S_e exponent
    double psi_e = 0.0;  ///< air-entry value [m] (modified VG), > 0

    static RetentionModel van_genuchten(double alpha, double n, std::optional<double> m = {},
                                        double L = 0.5);
    static RetentionModel modified_van_genuchten(double alpha, double n, double psi_e,
                                                 std::optional<double> m = {}, double L = 0.5);
    static RetentionModel brooks_corey(double alpha, double n, double L = 0.5);
    static RetentionModel haverkamp(double A, double B, double alpha, double beta);
    static RetentionModel gardner(double alpha);

    /// Throws InvalidParameter when the parameters violate the variant's invariants.
    void validate() const;

    double saturation_threshold() const;
    double effective_saturation(double psi) const;
    /// dS_e/dpsi
    double saturation_derivative(double psi) const;
    double relative_permeability(double psi) const;
    /// dk_r/dpsi
    double relative_permeability_derivative(double psi) const;

    bool operator==(const RetentionModel&) const = default;
};

/// Symmetric 2x2 saturated conductivity tensor [m/day]. One-dimensional
/// problems use @c xx as the conductivity along the line.
struct ConductivityTensor {
    double xx = 1.0;
    double xz = 0.0;
    double zz = 1.0;

    static ConductivityTensor isotropic(double k) { return {k, 0.0, k}; }
    bool is_positive_definite() const;
    bool operator==(const ConductivityTensor&) const = default;
};

/// Constitutive closure of one material zone.
class SoilMaterial {
public:
    SoilMaterial() = default;
    SoilMaterial(RetentionModel retention, double theta_r, double theta_s, ConductivityTensor ks,
                 double compressibility = 0.0, double reference_density = 1000.0);

    const RetentionModel& retention() const { return retention_; }
    double theta_r() const { return theta_r_; }
    double theta_s() const { return theta_s_; }
    const ConductivityTensor& ks() const { return ks_; }
    double compressibility() const { return compressibility_; }
    double reference_density() const { return rho0_; }

    double effective_saturation(double psi) const { return retention_.effective_saturation(psi); }
    double moisture_content(double psi) const;
    /// Specific moisture capacity dtheta/dpsi [1/m].
    double moisture_capacity(double psi) const;
    double relative_permeability(double psi) const { return retention_.relative_permeability(psi); }
    double relative_permeability_derivative(double psi) const {
        return retention_.relative_permeability_derivative(psi);
    }
    /// rho(psi) = rho0 exp(beta psi)
    double density(double psi) const;

    bool operator==(const SoilMaterial&) const = default;

private:
    RetentionModel retention_{};
    double theta_r_ = 0.0;
    double theta_s_ = 1.0;
    ConductivityTensor ks_{};
    double compressibility_ = 0.0;
    double rho0_ = 1000.0;
};

/// Closed-form inverse of the van Genuchten moisture curve.
/// Throws DomainError unless theta_r < theta < theta_s, InvalidParameter for
/// other retention variants.
double pressure_from_moisture_analytic(const SoilMaterial& mat, double theta);

/// Newton iteration on g(psi) = rho(psi) theta(psi) - rho(psi_init) theta_target,
/// started from psi_init. Throws NonConvergence after @p max_iters or when the
/// iteration hits a zero derivative.
double recover_pressure_newton(const SoilMaterial& mat, double theta_target, double psi_init,
                               int max_iters = 50);

/// Bracketed bisection on the same residual as recover_pressure_newton.
double recover_pressure_bisection(const SoilMaterial& mat, double theta_target, double psi_init);

/// Nodal pressure recovery used by the flux-corrected step: Newton first,
/// bisection when Newton fails. Targets at or above theta_s map to a saturated
/// head (psi_init when already saturated, else the saturation threshold).
double recover_pressure(const SoilMaterial& mat, double theta_target, double psi_init);

}  // namespace rfct
