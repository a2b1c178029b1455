#include "rfct/constitutive.hpp"

#include "rfct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfct {

namespace {

constexpr double kBisectionLow = -1.0e6;

// Unsaturated van Genuchten core in terms of u = (alpha |psi|)^n, which keeps
// 1 - S^(1/m) = u / (1 + u) free of cancellation near saturation.
double vg_saturation(double alpha, double n, double m, double psi) {
    const double u = std::pow(alpha * std::abs(psi), n);
    return std::pow(1.0 + u, -m);
}

double vg_saturation_derivative(double alpha, double n, double m, double psi) {
    const double a = std::abs(psi);
    const double u = std::pow(alpha * a, n);
    // d/dpsi = m n alpha^n |psi|^(n-1) (1+u)^(-m-1)
    return m * n * alpha * std::pow(alpha * a, n - 1.0) * std::pow(1.0 + u, -m - 1.0);
}

// Mualem bracket g = 1 - (1 - S^(1/m))^m evaluated from the VG saturation s.
double mualem_bracket(double s, double m) {
    const double inner = 1.0 - std::pow(s, 1.0 / m);
    return 1.0 - std::pow(inner, m);
}

double mualem_bracket_derivative(double s, double m) {
    const double inner = 1.0 - std::pow(s, 1.0 / m);
    return std::pow(inner, m - 1.0) * std::pow(s, 1.0 / m - 1.0);
}

}  // namespace

std::string_view to_string(RetentionKind kind) {
    switch (kind) {
    case RetentionKind::BrooksCorey: return "brooks_corey";
    case RetentionKind::Haverkamp: return "haverkamp";
    case RetentionKind::VanGenuchten: return "van_genuchten";
    case RetentionKind::ModifiedVanGenuchten: return "modified_van_genuchten";
    case RetentionKind::Gardner: return "gardner";
    }
    return "unknown";
}

RetentionKind retention_kind_from_string(std::string_view name) {
    if (name == "brooks_corey") return RetentionKind::BrooksCorey;
    if (name == "haverkamp") return RetentionKind::Haverkamp;
    if (name == "van_genuchten") return RetentionKind::VanGenuchten;
    if (name == "modified_van_genuchten") return RetentionKind::ModifiedVanGenuchten;
    if (name == "gardner") return RetentionKind::Gardner;
    throw InvalidParameter("unknown retention model '" + std::string(name) + "'");
}

RetentionModel RetentionModel::van_genuchten(double alpha, double n, std::optional<double> m,
                                             double L) {
    RetentionModel r;
    r.kind = RetentionKind::VanGenuchten;
    r.alpha = alpha;
    r.n = n;
    r.m = m.value_or(1.0 - 1.0 / n);
    r.L = L;
    r.validate();
    return r;
}

RetentionModel RetentionModel::modified_van_genuchten(double alpha, double n, double psi_e,
                                                      std::optional<double> m, double L) {
    RetentionModel r = van_genuchten(alpha, n, m, L);
    r.kind = RetentionKind::ModifiedVanGenuchten;
    r.psi_e = psi_e;
    r.validate();
    return r;
}

RetentionModel RetentionModel::brooks_corey(double alpha, double n, double L) {
    RetentionModel r;
    r.kind = RetentionKind::BrooksCorey;
    r.alpha = alpha;
    r.n = n;
    r.L = L;
    r.validate();
    return r;
}

RetentionModel RetentionModel::haverkamp(double A, double B, double alpha, double beta) {
    RetentionModel r;
    r.kind = RetentionKind::Haverkamp;
    r.A = A;
    r.B = B;
    r.alpha = alpha;
    r.beta = beta;
    r.validate();
    return r;
}

RetentionModel RetentionModel::gardner(double alpha) {
    RetentionModel r;
    r.kind = RetentionKind::Gardner;
    r.alpha = alpha;
    r.validate();
    return r;
}

void RetentionModel::validate() const {
    auto require = [this](bool ok, const char* what) {
        if (!ok) {
            throw InvalidParameter(std::string(to_string(kind)) + ": " + what);
        }
    };
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    switch (kind) {
    case RetentionKind::VanGenuchten:
    case RetentionKind::ModifiedVanGenuchten:
        require(n > 1.0, "n must exceed 1");
        require(m > 0.0 && m < 1.0, "m must lie in (0, 1)");
        require(L >= 0.0, "L must be non-negative");
        if (kind == RetentionKind::ModifiedVanGenuchten) {
            require(psi_e > 0.0, "psi_e must be positive");
        }
        break;
    case RetentionKind::BrooksCorey:
        require(n > 0.0, "pore-size index n must be positive");
        require(L >= 0.0, "L must be non-negative");
        break;
    case RetentionKind::Haverkamp:
        require(A > 0.0 && B > 0.0, "A and B must be positive");
        require(beta > 0.0, "beta must be positive");
        break;
    case RetentionKind::Gardner:
        break;
    }
}

double RetentionModel::saturation_threshold() const {
    switch (kind) {
    case RetentionKind::BrooksCorey: return -1.0 / alpha;
    case RetentionKind::ModifiedVanGenuchten: return -psi_e;
    default: return 0.0;
    }
}

double RetentionModel::effective_saturation(double psi) const {
    if (psi >= saturation_threshold()) return 1.0;
    switch (kind) {
    case RetentionKind::VanGenuchten:
        return vg_saturation(alpha, n, m, psi);
    case RetentionKind::ModifiedVanGenuchten:
        return vg_saturation(alpha, n, m, psi) / vg_saturation(alpha, n, m, -psi_e);
    case RetentionKind::BrooksCorey:
        return std::pow(alpha * std::abs(psi), -n);
    case RetentionKind::Haverkamp:
        return B / (B + std::pow(std::abs(psi), beta));
    case RetentionKind::Gardner:
        return std::exp(alpha * psi);
    }
    return 1.0;
}

double RetentionModel::saturation_derivative(double psi) const {
    const double threshold = saturation_threshold();
    const bool kinked = kind == RetentionKind::BrooksCorey || kind == RetentionKind::Haverkamp;
    if (psi > threshold || (psi == threshold && !kinked)) return 0.0;
    switch (kind) {
    case RetentionKind::VanGenuchten:
        return vg_saturation_derivative(alpha, n, m, psi);
    case RetentionKind::ModifiedVanGenuchten:
        return vg_saturation_derivative(alpha, n, m, psi) / vg_saturation(alpha, n, m, -psi_e);
    case RetentionKind::BrooksCorey: {
        // S = (alpha|psi|)^-n  =>  dS/dpsi = n S / |psi|
        const double a = std::abs(psi);
        return n * std::pow(alpha * a, -n) / a;
    }
    case RetentionKind::Haverkamp: {
        const double a = std::abs(psi);
        const double p = std::pow(a, beta);
        return B * beta * std::pow(a, beta - 1.0) / ((B + p) * (B + p));
    }
    case RetentionKind::Gardner:
        return alpha * std::exp(alpha * psi);
    }
    return 0.0;
}

double RetentionModel::relative_permeability(double psi) const {
    if (psi >= saturation_threshold()) return 1.0;
    switch (kind) {
    case RetentionKind::VanGenuchten: {
        const double s = vg_saturation(alpha, n, m, psi);
        const double u = std::pow(alpha * std::abs(psi), n);
        const double g = 1.0 - std::pow(u / (1.0 + u), m);
        return std::pow(s, L) * g * g;
    }
    case RetentionKind::ModifiedVanGenuchten: {
        const double s_star = vg_saturation(alpha, n, m, -psi_e);
        const double s_vg = vg_saturation(alpha, n, m, psi);
        const double s = s_vg / s_star;
        const double ratio = mualem_bracket(s_vg, m) / mualem_bracket(s_star, m);
        return std::pow(s, L) * ratio * ratio;
    }
    case RetentionKind::BrooksCorey:
        return std::pow(effective_saturation(psi), L + 2.0 + 2.0 / n);
    case RetentionKind::Haverkamp:
        return A / (A + std::pow(std::abs(psi), alpha));
    case RetentionKind::Gardner:
        return std::exp(alpha * psi);
    }
    return 1.0;
}

double RetentionModel::relative_permeability_derivative(double psi) const {
    const double threshold = saturation_threshold();
    const bool kinked = kind == RetentionKind::BrooksCorey || kind == RetentionKind::Haverkamp;
    if (psi > threshold || (psi == threshold && !kinked)) return 0.0;
    switch (kind) {
    case RetentionKind::VanGenuchten: {
        const double s = vg_saturation(alpha, n, m, psi);
        const double ds = vg_saturation_derivative(alpha, n, m, psi);
        const double u = std::pow(alpha * std::abs(psi), n);
        const double inner = u / (1.0 + u);
        const double g = 1.0 - std::pow(inner, m);
        const double dg_ds = std::pow(inner, m - 1.0) * std::pow(s, 1.0 / m - 1.0);
        const double dk_ds = L * std::pow(s, L - 1.0) * g * g + std::pow(s, L) * 2.0 * g * dg_ds;
        return dk_ds * ds;
    }
    case RetentionKind::ModifiedVanGenuchten: {
        const double s_star = vg_saturation(alpha, n, m, -psi_e);
        const double s_vg = vg_saturation(alpha, n, m, psi);
        const double ds_vg = vg_saturation_derivative(alpha, n, m, psi);
        const double s = s_vg / s_star;
        const double g0 = mualem_bracket(s_star, m);
        const double g = mualem_bracket(s_vg, m);
        const double dg = mualem_bracket_derivative(s_vg, m) * ds_vg;
        const double ds = ds_vg / s_star;
        return (L * std::pow(s, L - 1.0) * ds * g * g + std::pow(s, L) * 2.0 * g * dg) / (g0 * g0);
    }
    case RetentionKind::BrooksCorey: {
        const double e = L + 2.0 + 2.0 / n;
        const double s = std::pow(alpha * std::abs(psi), -n);
        return e * std::pow(s, e - 1.0) * saturation_derivative(psi);
    }
    case RetentionKind::Haverkamp: {
        const double a = std::abs(psi);
        const double p = std::pow(a, alpha);
        return A * alpha * std::pow(a, alpha - 1.0) / ((A + p) * (A + p));
    }
    case RetentionKind::Gardner:
        return alpha * std::exp(alpha * psi);
    }
    return 0.0;
}

bool ConductivityTensor::is_positive_definite() const {
    return xx > 0.0 && zz > 0.0 && xx * zz - xz * xz > 0.0;
}

SoilMaterial::SoilMaterial(RetentionModel retention, double theta_r, double theta_s,
                           ConductivityTensor ks, double compressibility, double reference_density)
    : retention_(retention), theta_r_(theta_r), theta_s_(theta_s), ks_(ks),
      compressibility_(compressibility), rho0_(reference_density) {
    retention_.validate();
    if (!(theta_r >= 0.0 && theta_r < theta_s && theta_s <= 1.0)) {
        throw InvalidParameter("moisture bounds must satisfy 0 <= theta_r < theta_s <= 1");
    }
    if (!ks_.is_positive_definite()) {
        throw InvalidParameter("saturated conductivity must be symmetric positive definite");
    }
    if (compressibility < 0.0 || !(reference_density > 0.0)) {
        throw InvalidParameter("compressibility must be >= 0 and density > 0");
    }
}

double SoilMaterial::moisture_content(double psi) const {
    return theta_r_ + retention_.effective_saturation(psi) * (theta_s_ - theta_r_);
}

double SoilMaterial::moisture_capacity(double psi) const {
    return retention_.saturation_derivative(psi) * (theta_s_ - theta_r_);
}

double SoilMaterial::density(double psi) const {
    return rho0_ * std::exp(compressibility_ * psi);
}

double pressure_from_moisture_analytic(const SoilMaterial& mat, double theta) {
    const auto& r = mat.retention();
    if (r.kind != RetentionKind::VanGenuchten) {
        throw InvalidParameter("closed-form inverse is only available for van Genuchten");
    }
    if (!(theta > mat.theta_r() && theta < mat.theta_s())) {
        throw DomainError("theta must lie strictly between theta_r and theta_s");
    }
    const double se = (theta - mat.theta_r()) / (mat.theta_s() - mat.theta_r());
    return -std::pow(std::pow(se, -1.0 / r.m) - 1.0, 1.0 / r.n) / r.alpha;
}

double recover_pressure_newton(const SoilMaterial& mat, double theta_target, double psi_init,
                               int max_iters) {
    const double beta = mat.compressibility();
    const double target_mass = mat.density(psi_init) * theta_target;
    const double scale = mat.reference_density() * (mat.theta_s() - mat.theta_r());

    double psi = psi_init;
    double g = 0.0;
    for (int k = 0; k < max_iters; ++k) {
        const double rho = mat.density(psi);
        const double theta = mat.moisture_content(psi);
        g = rho * theta - target_mass;
        if (std::abs(g) / scale < 1e-12) return psi;
        const double dg = rho * (beta * theta + mat.moisture_capacity(psi));
        if (!(dg > 0.0) || !std::isfinite(dg)) {
            throw NonConvergence("pressure recovery hit a zero derivative", std::abs(g) / scale, k);
        }
        const double step = g / dg;
        psi -= step;
        if (!std::isfinite(psi)) break;
        if (std::abs(step) < 1e-12) return psi;
    }
    throw NonConvergence("pressure recovery did not converge", std::abs(g) / scale, max_iters);
}

double recover_pressure_bisection(const SoilMaterial& mat, double theta_target, double psi_init) {
    const double target_mass = mat.density(psi_init) * theta_target;
    auto g = [&](double psi) { return mat.density(psi) * mat.moisture_content(psi) - target_mass; };

    double lo = kBisectionLow;
    while (g(lo) > 0.0 && lo > -1e15) lo *= 10.0;
    double hi = mat.compressibility() > 0.0
                    ? std::max(psi_init, mat.retention().saturation_threshold())
                    : mat.retention().saturation_threshold();
    if (mat.compressibility() > 0.0) {
        double width = 1.0;
        while (g(hi) < 0.0 && width < 1e12) {
            hi += width;
            width *= 2.0;
        }
    }
    if (g(lo) > 0.0) return lo;
    if (g(hi) < 0.0) return hi;
    for (int k = 0; k < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++k) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double recover_pressure(const SoilMaterial& mat, double theta_target, double psi_init) {
    if (mat.compressibility() == 0.0) {
        if (mat.moisture_content(psi_init) == theta_target) return psi_init;
        if (theta_target >= mat.theta_s()) {
            return std::max(psi_init, mat.retention().saturation_threshold());
        }
    }
    try {
        return recover_pressure_newton(mat, theta_target, psi_init);
    } catch (const NonConvergence&) {
        return recover_pressure_bisection(mat, theta_target, psi_init);
    }
}

}  // namespace rfct
