#include "rfct/kernels.hpp"

#include <algorithm>
#include <vector>

namespace rfct::kernels {

namespace {

double ratio(double q, double p) { return std::min(1.0, q / p); }

double edge_alpha(double f, double rp_i, double rm_i, double rp_j, double rm_j) {
    if (f > 0.0) return std::min(rp_i, rm_j);
    if (f < 0.0) return std::min(rm_i, rp_j);
    return 1.0;
}

}  // namespace

namespace serial {

void bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
            std::span<const double> theta_old, std::span<double> lo, std::span<double> hi) {
    const int n = g.num_nodes();
    for (int i = 0; i < n; ++i) lo[i] = hi[i] = theta_low[i];
    auto widen = [&](int i, double v) {
        lo[i] = std::min(lo[i], v);
        hi[i] = std::max(hi[i], v);
    };
    for (const auto& [i, j] : g.edges()) {
        widen(i, theta_low[j]);
        widen(j, theta_low[i]);
    }
    if (theta_old.empty()) return;
    for (int i = 0; i < n; ++i) widen(i, theta_old[i]);
    for (const auto& [i, j] : g.edges()) {
        widen(i, theta_old[j]);
        widen(j, theta_old[i]);
    }
}

void limiter_ratios(const AdjacencyGraph& g, const LimiterInput& in, std::span<double> r_plus,
                    std::span<double> r_minus) {
    const int n = g.num_nodes();
    std::vector<double> p_plus(n, 0.0), p_minus(n, 0.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        const double f = in.flux[e];
        p_plus[i] += std::max(f, 0.0);
        p_minus[i] += std::min(f, 0.0);
        p_plus[j] += std::max(-f, 0.0);
        p_minus[j] += std::min(-f, 0.0);
    }
    for (int i = 0; i < n; ++i) {
        if (!in.fixed.empty() && in.fixed[i]) {
            r_plus[i] = r_minus[i] = 1.0;
            continue;
        }
        const double scale = in.lumped[i] / in.dt;
        const double q_plus = scale * (in.hi[i] - in.theta_low[i]);
        const double q_minus = scale * (in.lo[i] - in.theta_low[i]);
        r_plus[i] = p_plus[i] > 0.0 ? ratio(q_plus, p_plus[i]) : 1.0;
        r_minus[i] = p_minus[i] < 0.0 ? ratio(q_minus, p_minus[i]) : 1.0;
    }
}

void limiter_alpha(const AdjacencyGraph& g, std::span<const double> flux,
                   std::span<const double> r_plus, std::span<const double> r_minus,
                   std::span<double> alpha) {
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        alpha[e] = edge_alpha(flux[e], r_plus[i], r_minus[i], r_plus[j], r_minus[j]);
    }
}

void correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                std::span<const double> flux, std::span<const double> alpha,
                std::span<const double> lumped, double dt, std::span<double> out) {
    const int n = g.num_nodes();
    std::vector<double> sum(n, 0.0);
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        const double af = alpha[e] * flux[e];
        sum[i] += af;
        sum[j] -= af;
    }
    for (int i = 0; i < n; ++i) out[i] = theta_low[i] + dt / lumped[i] * sum[i];
}

void recover(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
             std::span<const double> theta, std::span<const double> psi_init,
             std::span<double> psi) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        psi[i] = recover_pressure(by_zone[node_zone[i]], theta[i], psi_init[i]);
    }
}

void moisture(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
              std::span<const double> psi, std::span<double> theta) {
    for (std::size_t i = 0; i < psi.size(); ++i) {
        theta[i] = by_zone[node_zone[i]].moisture_content(psi[i]);
    }
}

}  // namespace serial

namespace omp {

void bounds(const AdjacencyGraph& g, std::span<const double> theta_low,
            std::span<const double> theta_old, std::span<double> lo, std::span<double> hi) {
    const int n = g.num_nodes();
    const bool with_old = !theta_old.empty();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double a = theta_low[i];
        double b = a;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int j = g.column(k);
            a = std::min(a, theta_low[j]);
            b = std::max(b, theta_low[j]);
            if (with_old) {
                a = std::min(a, theta_old[j]);
                b = std::max(b, theta_old[j]);
            }
        }
        lo[i] = a;
        hi[i] = b;
    }
}

void limiter_ratios(const AdjacencyGraph& g, const LimiterInput& in, std::span<double> r_plus,
                    std::span<double> r_minus) {
    const int n = g.num_nodes();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        if (!in.fixed.empty() && in.fixed[i]) {
            r_plus[i] = r_minus[i] = 1.0;
            continue;
        }
        double p_plus = 0.0;
        double p_minus = 0.0;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int e = g.slot_edge(k);
            if (e < 0) continue;
            const double f = i < g.column(k) ? in.flux[e] : -in.flux[e];
            p_plus += std::max(f, 0.0);
            p_minus += std::min(f, 0.0);
        }
        const double scale = in.lumped[i] / in.dt;
        r_plus[i] = p_plus > 0.0 ? ratio(scale * (in.hi[i] - in.theta_low[i]), p_plus) : 1.0;
        r_minus[i] = p_minus < 0.0 ? ratio(scale * (in.lo[i] - in.theta_low[i]), p_minus) : 1.0;
    }
}

void limiter_alpha(const AdjacencyGraph& g, std::span<const double> flux,
                   std::span<const double> r_plus, std::span<const double> r_minus,
                   std::span<double> alpha) {
    const int m = g.num_edges();
#pragma omp parallel for schedule(static)
    for (int e = 0; e < m; ++e) {
        const auto& ij = g.edge(e);
        alpha[e] = edge_alpha(flux[e], r_plus[ij[0]], r_minus[ij[0]], r_plus[ij[1]], r_minus[ij[1]]);
    }
}

void correction(const AdjacencyGraph& g, std::span<const double> theta_low,
                std::span<const double> flux, std::span<const double> alpha,
                std::span<const double> lumped, double dt, std::span<double> out) {
    const int n = g.num_nodes();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int e = g.slot_edge(k);
            if (e < 0) continue;
            const double af = alpha[e] * flux[e];
            sum += i < g.column(k) ? af : -af;
        }
        out[i] = theta_low[i] + dt / lumped[i] * sum;
    }
}

void recover(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
             std::span<const double> theta, std::span<const double> psi_init,
             std::span<double> psi) {
    const long n = static_cast<long>(theta.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < n; ++i) {
        psi[i] = recover_pressure(by_zone[node_zone[i]], theta[i], psi_init[i]);
    }
}

void moisture(std::span<const SoilMaterial> by_zone, std::span<const int> node_zone,
              std::span<const double> psi, std::span<double> theta) {
    const long n = static_cast<long>(psi.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) theta[i] = by_zone[node_zone[i]].moisture_content(psi[i]);
}

}  // namespace omp

}  // namespace rfct::kernels
