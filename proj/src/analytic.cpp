#include "rfct/analytic.hpp"

#include "rfct/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace rfct {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailTolerance = 1e-10;
constexpr int kMaxTerms = 1 << 20;

struct BaryRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

const BaryRule& triangle_rule() {
    static const BaryRule rule = [] {
        const double a = 0.445948490915965, wa = 0.223381589678011;
        const double b = 0.091576213509771, wb = 0.109951743655322;
        return BaryRule{{{a, a, 1 - 2 * a}, {a, 1 - 2 * a, a}, {1 - 2 * a, a, a},
                         {b, b, 1 - 2 * b}, {b, 1 - 2 * b, b}, {1 - 2 * b, b, b}},
                        {wa, wa, wa, wb, wb, wb}};
    }();
    return rule;
}

const BaryRule& interval_rule() {
    static const BaryRule rule = [] {
        const double d = 0.5 * std::sqrt(0.6);
        return BaryRule{{{0.5 + d, 0.5 - d, 0.0}, {0.5, 0.5, 0.0}, {0.5 - d, 0.5 + d, 0.0}},
                        {5.0 / 18, 8.0 / 18, 5.0 / 18}};
    }();
    return rule;
}

}  // namespace

void TracyProblem::validate() const {
    if (!(a > 0 && L > 0 && alpha > 0 && ks > 0)) {
        throw InvalidParameter("Tracy problem needs a, L, alpha, Ks > 0");
    }
    if (!(psi_r < 0)) throw InvalidParameter("Tracy problem needs psi_r < 0");
    if (!(theta_r >= 0 && theta_r < theta_s && theta_s <= 1)) {
        throw InvalidParameter("Tracy problem needs 0 <= theta_r < theta_s <= 1");
    }
    if (series_terms < 1) throw InvalidParameter("series_terms must be >= 1");
}

double TracyProblem::c() const { return alpha * (theta_s - theta_r) / ks; }
double TracyProblem::hbar0() const { return 1.0 - std::exp(alpha * psi_r); }
double TracyProblem::beta1() const {
    return std::sqrt(0.25 * alpha * alpha + std::pow(2 * kPi / a, 2));
}
double TracyProblem::lambda(int k) const { return k * kPi / L; }
double TracyProblem::gamma1(int k) const {
    return (std::pow(lambda(k), 2) + 0.25 * alpha * alpha) / c();
}
double TracyProblem::gamma2(int k) const {
    return (std::pow(lambda(k), 2) + std::pow(2 * kPi / a, 2) + 0.25 * alpha * alpha) / c();
}

double TracyProblem::top_head(double x) const {
    return std::log(std::exp(alpha * psi_r) + 0.5 * hbar0() * (1 - std::cos(2 * kPi * x / a))) /
           alpha;
}

double steady_kirchhoff(const TracyProblem& p, double x, double z) {
    const double half = 0.5 * p.alpha;
    const double b1 = p.beta1();
    return 0.5 * p.hbar0() * std::exp(half * (p.L - z)) *
           (std::sinh(half * z) / std::sinh(half * p.L) -
            std::cos(2 * kPi * x / p.a) * std::sinh(b1 * z) / std::sinh(b1 * p.L));
}

double steady_head(const TracyProblem& p, double x, double z) {
    return std::log(std::exp(p.alpha * p.psi_r) + steady_kirchhoff(p, x, z)) / p.alpha;
}

double transient_correction(const TracyProblem& p, double x, double z, double t) {
    if (t <= 0.0) return z >= p.L ? 0.0 : -steady_kirchhoff(p, x, z);
    const double c = p.c();
    const double pref = p.hbar0() / (p.L * c) * std::exp(0.5 * p.alpha * (p.L - z));
    const double cx = std::cos(2 * kPi * x / p.a);
    // |term_k| <= pref * 2c / lambda_k * exp(-lambda_k^2 t / c); successive
    // exponents differ by at least (2N + 3)(pi/L)^2 t / c past term N.
    auto tail_bound = [&](int n) {
        const double lam = p.lambda(n + 1);
        const double ratio = std::exp(-(2.0 * n + 3.0) * std::pow(kPi / p.L, 2) * t / c);
        return pref * 2 * c / lam * std::exp(-lam * lam * t / c) / (1.0 - ratio);
    };
    int terms = p.series_terms;
    while (tail_bound(terms) > kTailTolerance) {
        if (terms >= kMaxTerms) {
            throw NonConvergence("Tracy series tail above tolerance", tail_bound(terms), terms);
        }
        terms *= 2;
    }
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double lam = p.lambda(k);
        const double g1 = p.gamma1(k);
        const double g2 = p.gamma2(k);
        const double s = std::sin(lam * z);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * lam * (std::exp(-g1 * t) / g1 - std::exp(-g2 * t) / g2 * cx) * s;
    }
    return pref * sum;
}

double transient_head(const TracyProblem& p, double x, double z, double t) {
    const double arg = std::exp(p.alpha * p.psi_r) + steady_kirchhoff(p, x, z) +
                       transient_correction(p, x, z, t);
    if (!(arg > 0.0)) {
        throw DomainError("Tracy transient solution: non-positive logarithm argument at (" +
                          std::to_string(x) + ", " + std::to_string(z) + ", " +
                          std::to_string(t) + ")");
    }
    return std::log(arg) / p.alpha;
}

double l2_error(const Mesh& mesh, std::span<const double> psi_h,
                const std::function<double(const Point&)>& exact) {
    const BaryRule& rule = mesh.dim == 1 ? interval_rule() : triangle_rule();
    const int npe = mesh.nodes_per_element();
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        const double measure = mesh.element_measure(e);
        double local = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            Point x{0.0, 0.0};
            double uh = 0.0;
            for (int k = 0; k < npe; ++k) {
                const double w = rule.points[q][k];
                x[0] += w * mesh.coords[el[k]][0];
                x[1] += w * mesh.coords[el[k]][1];
                uh += w * psi_h[el[k]];
            }
            const double diff = uh - exact(x);
            local += rule.weights[q] * diff * diff;
        }
        sum += measure * local;
    }
    return std::sqrt(sum);
}

}  // namespace rfct
