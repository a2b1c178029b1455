// Acceptance harness: one PASS/FAIL line per criterion, with the measured
// numbers behind each verdict. Exits 0 once every check has run; --strict
// turns any FAIL into exit code 1.
#include "oracles.hpp"

#include "rfct/app.hpp"
#include "rfct/errors.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace rfct;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const char* title, Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "):"
              << v.detail.str() << std::endl;
    failures += !v.pass;
}

std::string fmt(double v, const char* spec = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// --- criterion 1 -----------------------------------------------------------

struct Ladder {
    Scheme scheme;
    std::vector<double> paper_errors;
    double rate_min, rate_max;
};

void criterion_tracy(Verdict& v) {
    const std::vector<Ladder> ladders{
        {Scheme::Fct, {1.790696, 0.822607, 0.203059, 0.048256}, 1.9, 1e9},
        {Scheme::Galerkin, {4.784264, 1.120624, 0.251717, 0.054404}, 1.8, 1e9},
        {Scheme::LowOrder, {1.397881, 0.692613, 0.356681, 0.186918}, 0.8, 1.1},
    };
    for (const auto& l : ladders) {
        auto spec = builtin_problem("tracy2d");
        spec.scheme = l.scheme;
        ConvergenceOptions opt;
        opt.levels = 4;
        opt.times = {5e-4};
        std::vector<ConvergenceRow> rows;
        try {
            rows = convergence_study(spec, opt);
        } catch (const std::exception& e) {
            v.require(false, std::string(to_string(l.scheme)) + " run threw: " + e.what());
            continue;
        }
        v.detail << ' ' << to_string(l.scheme) << " errors";
        for (const auto& r : rows) v.detail << ' ' << fmt(r.error);
        v.detail << " rates";
        for (const auto& r : rows) {
            if (r.rate) v.detail << ' ' << fmt(*r.rate, "%.3f");
        }
        v.detail << ';';
        const std::string name(to_string(l.scheme));
        for (int k : {2, 3}) {
            const double r = *rows[k].rate;
            v.require(r >= l.rate_min && r <= l.rate_max,
                      name + " rate " + fmt(r, "%.3f") + " outside [" + fmt(l.rate_min) + ", " +
                          (l.rate_max > 1e8 ? std::string("inf") : fmt(l.rate_max)) + "]");
        }
        for (int k = 0; k < 4; ++k) {
            const double ratio = rows[k].error / l.paper_errors[k];
            v.require(ratio >= 0.5 && ratio <= 1.5, name + " level " + std::to_string(k) +
                                                        " error off the table value by x" +
                                                        fmt(ratio, "%.2f"));
        }
    }
}

// --- criteria 2, 3, 4, 8: one run per builtin and scheme ---------------------

struct RunAudit {
    bool completed = false;
    std::string error;
    int steps = 0;
    int theta_violations = 0;
    double worst_bound_excess = 0.0;
    double worst_conservation = 0.0;
    double worst_balance = 0.0;
    double psi_min = 0.0;
    double seconds = 0.0;
};

RunAudit audit_run(ProblemSpec spec, Scheme scheme) {
    spec.scheme = scheme;
    RunAudit a;
    const auto t0 = std::chrono::steady_clock::now();
    auto observer = [&](const Discretization& d, const SimulationState& s, const StepDiagnostics& diag) {
        ++a.steps;
        for (int i = 0; i < d.num_nodes(); ++i) {
            const SoilMaterial& m = d.node_material(i);
            if (s.theta[i] < m.theta_r() - 1e-10 || s.theta[i] > m.theta_s() + 1e-10) ++a.theta_violations;
            a.psi_min = std::min(a.psi_min, s.psi[i]);
        }
        a.worst_bound_excess = std::max(a.worst_bound_excess, diag.fct_bound_excess);
        a.worst_conservation = std::max(a.worst_conservation, diag.fct_conservation);
        a.worst_balance = std::max(a.worst_balance, std::abs(diag.mass_balance));
    };
    try {
        run(spec, observer);
        a.completed = true;
    } catch (const std::exception& e) {
        a.error = e.what();
    }
    a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return a;
}

// --- criterion 5 -----------------------------------------------------------

void criterion_limiter(Verdict& v) {
    std::mt19937_64 rng(20240601);
    int bad = 0, admissible = 0, ones = 0;
    std::string first;
    for (int k = 0; k < 1000; ++k) {
        const auto c = oracle::random_limiter_case(rng, k % 4 == 0);
        const auto res = oracle::audit_limiter(c);
        if (!res.ok) {
            if (bad == 0) first = "case " + std::to_string(k) + ": " + res.failure;
            ++bad;
        }
        admissible += res.admissible;
        ones += res.admissible && res.all_ones;
    }
    v.detail << " 1000 systems (<= 6 nodes), " << admissible << " admissible (alpha == 1 in " << ones
             << "), " << bad << " audit failures";
    v.require(bad == 0, first);
}

// --- criterion 6 -----------------------------------------------------------

void criterion_analytic(Verdict& v) {
    const TracyProblem p;
    double worst_residual = 0.0, worst_rate_dev = 0.0, worst_top = 0.0;
    for (auto [x, z] : {std::pair{5.0, 5.0}, {2.0, 8.0}, {7.5, 1.5}, {4.0, 9.2}, {0.7, 3.3}}) {
        const double norm = std::abs(steady_kirchhoff(p, x, z));
        const double coarse = std::abs(oracle::steady_pde_residual(p, x, z, 0.2));
        const double fine = std::abs(oracle::steady_pde_residual(p, x, z, 0.1));
        worst_residual = std::max(worst_residual, fine / norm);
        worst_rate_dev = std::max(worst_rate_dev, std::abs(std::log2(coarse / fine) - 4.0));
    }
    for (int k = 0; k <= 100; ++k) {
        const double x = p.a * k / 100.0;
        worst_top = std::max(worst_top, std::abs(steady_head(p, x, p.L) - p.top_head(x)));
    }
    double worst_fit = 0.0;
    for (double z : {3.0, 5.0, 7.0}) {
        worst_fit = std::max(worst_fit, std::abs(oracle::fitted_rate_mode1(p, z, 0.4, 0.6) / p.gamma1(1) - 1));
        worst_fit = std::max(worst_fit, std::abs(oracle::fitted_rate_mode2(p, z, 0.4, 0.6) / p.gamma2(1) - 1));
    }
    double worst_late = 0.0;
    for (double x : {1.0, 5.0, 9.0}) {
        for (double z : {1.0, 5.0, 9.0}) {
            worst_late = std::max(worst_late,
                                  std::abs(transient_head(p, x, z, 40.0 / p.gamma1(1)) - steady_head(p, x, z)));
        }
    }
    v.detail << " PDE residual/|hbar| " << fmt(worst_residual) << ", FD rate deviation from 4 "
             << fmt(worst_rate_dev, "%.3f") << ", top mismatch " << fmt(worst_top)
             << ", decay-rate fit error " << fmt(100 * worst_fit, "%.2f") << "%, |transient - steady| at 40/gamma1 "
             << fmt(worst_late);
    v.require(worst_residual < 1e-6, "PDE residual");
    v.require(worst_rate_dev < 0.5, "FD refinement rate");
    v.require(worst_top < 1e-12, "top boundary");
    v.require(worst_fit < 0.05, "decay rates");
    v.require(worst_late < 1e-8, "late-time limit");
}

// --- criterion 7 -----------------------------------------------------------

void criterion_kernels(Verdict& v) {
    const SoilMaterial loam(RetentionModel::van_genuchten(3.35, 2.0), 0.102, 0.368,
                            ConductivityTensor::isotropic(7.967));
    const SoilMaterial aniso(RetentionModel::van_genuchten(1.389, 1.592, 0.372), 0.045, 0.43,
                             ConductivityTensor{2.0, 0.4, 0.7});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> head(-2.0, -0.05);
    double mass = 0.0, stiff = 0.0, resid = 0.0, jac_h = 0.0, jac_l = 0.0, up = 0.0;
    const std::vector<Mesh> meshes{generate_interval_mesh(1.0, 5), generate_rect_triangulation(1, 1, 1, 1),
                                   generate_rect_triangulation(1, 1, 1, 1, Diagonal::Crossed),
                                   generate_rect_triangulation(2, 1, 1, 1)};
    for (const auto& mesh : meshes) {
        for (const auto& mat : {loam, aniso}) {
            const auto d = Discretization::build(mesh, {mat});
            const int n = mesh.num_nodes();
            const auto m_ref = oracle::consistent_mass(mesh);
            mass = std::max(mass, oracle::max_abs_diff(oracle::dense_of(d.mass), m_ref) / oracle::max_abs(m_ref));

            std::vector<double> psi(n), psi_old(n);
            for (auto& p : psi) p = head(rng);
            for (auto& p : psi_old) p = head(rng);
            const std::vector<SoilMaterial> zones{mat};
            const auto a_ref = oracle::stiffness(mesh, zones, oracle::centroid_kr(mesh, zones, psi));
            const auto a = assemble_galerkin_stiffness(mesh, d.graph, zones, psi);
            stiff = std::max(stiff, oracle::max_abs_diff(oracle::dense_of(a), a_ref) / oracle::max_abs(a_ref));

            const auto u_ref = oracle::upwind(mesh, mat, psi, true);
            const auto u = assemble_upwind_stiffness(d.saturated, psi, d.total_head(psi), d.materials,
                                                     d.edge_weights);
            up = std::max(up, oracle::max_abs_diff(oracle::dense_of(u.op), u_ref) / oracle::max_abs(u_ref));

            BoundaryConditions bcs;
            for (const auto& name : mesh.marker_names) bcs[name] = {BoundaryKind::Neumann, 0.03, {}};
            bcs[mesh.marker_names.front()] = {BoundaryKind::Dirichlet, -0.4, {}};
            const auto bc = resolve_boundary(d.mesh, bcs);
            for (int i = 0; i < n; ++i) {
                if (bc.dirichlet[i]) psi[i] = -0.4;
            }
            const auto theta_old = d.moisture(psi_old);
            const StepInput in{psi_old, theta_old, 0.01, 1.0};
            const auto r = residual_high(d, bc, psi, in, true);
            const auto r_ref = oracle::residual_high(mesh, mat, bc.load, psi, psi_old, 0.01);
            double scale = 0.0;
            for (double x : r_ref) scale = std::max(scale, std::abs(x));
            resid = std::max(resid, oracle::max_abs_diff(r, r_ref) / scale);

            const auto fd_h = oracle::fd_jacobian(
                [&](std::span<const double> x) { return residual_high(d, bc, x, in); }, psi);
            jac_h = std::max(jac_h, oracle::relative_error(oracle::dense_of(jacobian_high(d, bc, psi, in)), fd_h));

            const auto fd_l = oracle::fd_jacobian(
                [&](std::span<const double> x) { return residual_low(d, bc, x, in); }, psi);
            const auto jl = oracle::dense_of(jacobian_low(d, bc, psi, in));
            auto selection = [&](std::span<const double> x) {
                return assemble_upwind_stiffness(d.saturated, x, d.total_head(x), d.materials, d.edge_weights)
                    .upwind_node;
            };
            const auto base = selection(psi);
            for (int k = 0; k < n; ++k) {
                const double step = 1e-6 * (std::abs(psi[k]) + 1.0);
                auto plus = psi, minus = psi;
                plus[k] += step;
                minus[k] -= step;
                if (selection(plus) != base || selection(minus) != base) continue;
                double col = 1.0;
                for (int i = 0; i < n; ++i) col = std::max(col, std::abs(fd_l[i][k]));
                for (int i = 0; i < n; ++i) jac_l = std::max(jac_l, std::abs(jl[i][k] - fd_l[i][k]) / col);
            }
        }
    }
    double cap = 0.0, dkr = 0.0, trip = 0.0;
    for (const auto& mat : oracle::sample_materials()) {
        cap = std::max(cap, oracle::capacity_fd_error(mat));
        dkr = std::max(dkr, oracle::kr_derivative_fd_error(mat));
        trip = std::max(trip, oracle::roundtrip_error(mat));
    }
    v.detail << " mass " << fmt(mass) << ", stiffness " << fmt(stiff) << ", upwind " << fmt(up)
             << ", residual " << fmt(resid) << ", Jacobian FD high " << fmt(jac_h) << " low " << fmt(jac_l)
             << ", capacity FD " << fmt(cap) << ", dk_r FD " << fmt(dkr) << ", round trip " << fmt(trip);
    v.require(mass < 1e-13, "mass");
    v.require(stiff < 1e-12, "stiffness");
    v.require(up < 1e-12, "upwind");
    v.require(resid < 1e-12, "residual");
    v.require(jac_h < 1e-5, "Galerkin Jacobian");
    v.require(jac_l < 1e-5, "low-order Jacobian");
    v.require(cap < 1e-5, "capacity derivative");
    v.require(dkr < 1e-5, "k_r derivative");
    v.require(trip < 1e-10, "round trip");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    bool strict = false;
    app.add_flag("--strict", strict, "Exit with status 1 when any criterion fails");
    CLI11_PARSE(app, argc, argv);

    {
        Verdict v;
        criterion_tracy(v);
        report(1, "Tracy convergence ladder at t = 5e-4 day", v);
    }

    std::map<std::pair<std::string, Scheme>, RunAudit> audits;
    for (const auto& name : builtin_names()) {
        for (Scheme s : {Scheme::LowOrder, Scheme::Fct}) {
            audits[{name, s}] = audit_run(builtin_problem(name), s);
        }
    }

    {
        Verdict v;
        for (const auto& [key, a] : audits) {
            const std::string id = key.first + "/" + std::string(to_string(key.second));
            v.detail << ' ' << id << ' ' << a.steps << " steps " << a.theta_violations << " violations";
            if (key.second == Scheme::Fct) v.detail << " excess " << fmt(a.worst_bound_excess);
            v.detail << ';';
            v.require(a.completed, id + " did not finish: " + a.error);
            v.require(a.theta_violations == 0, id + " theta outside [theta_r, theta_s]");
            v.require(a.worst_bound_excess <= 1e-12, id + " outside Zalesak bounds");
        }
        report(2, "bound preservation, low_order and fct, all builtins", v);
    }

    {
        Verdict v;
        const double tol = 10 * NewtonConfig{}.abs_tol;
        for (const auto& [key, a] : audits) {
            if (key.second != Scheme::Fct) continue;
            v.detail << ' ' << key.first << " conservation " << fmt(a.worst_conservation) << " balance "
                     << fmt(a.worst_balance) << ';';
            v.require(a.worst_conservation < 1e-12, key.first + " conservation");
            v.require(a.worst_balance <= tol, key.first + " mass balance");
        }
        report(3, "FCT conservation and mass balance", v);
    }

    {
        Verdict v;
        const auto galerkin = audit_run(builtin_problem("celia"), Scheme::Galerkin);
        const double threshold = -10.0 - 0.01;
        const auto& low = audits.at({"celia", Scheme::LowOrder});
        const auto& fct = audits.at({"celia", Scheme::Fct});
        v.detail << " min psi: galerkin " << fmt(galerkin.psi_min, "%.4f") << " m over " << galerkin.steps
                 << " steps" << (galerkin.completed ? "" : " (then " + galerkin.error + ")")
                 << ", low_order " << fmt(low.psi_min, "%.4f") << ", fct " << fmt(fct.psi_min, "%.4f");
        v.require(galerkin.psi_min < threshold, "no Galerkin undershoot");
        v.require(low.psi_min >= threshold && low.completed, "low_order undershoot");
        v.require(fct.psi_min >= threshold && fct.completed, "fct undershoot");
        report(4, "Celia oscillation contrast", v);
    }

    {
        Verdict v;
        criterion_limiter(v);
        report(5, "limiter oracle equivalence", v);
    }
    {
        Verdict v;
        criterion_analytic(v);
        report(6, "analytic solution self-consistency", v);
    }
    {
        Verdict v;
        criterion_kernels(v);
        report(7, "numerical kernel oracles", v);
    }
    {
        Verdict v;
        const double tol = 10 * NewtonConfig{}.abs_tol;
        for (const char* name : {"rain_garden", "bioswale2d"}) {
            for (Scheme s : {Scheme::LowOrder, Scheme::Fct}) {
                const auto& a = audits.at({name, s});
                const std::string id = std::string(name) + "/" + std::string(to_string(s));
                v.detail << ' ' << id << ' ' << a.steps << " steps in " << fmt(a.seconds, "%.1f") << " s;";
                v.require(a.steps >= 20, id + " fewer than 20 steps");
                v.require(a.theta_violations == 0 && a.worst_bound_excess <= 1e-12, id + " bounds");
                if (s == Scheme::Fct) {
                    v.require(a.worst_conservation < 1e-12 && a.worst_balance <= tol, id + " conservation");
                }
            }
        }
        report(8, "rain_garden and bioswale2d smoke runs", v);
    }

    std::cout << failures << " of 8 criteria failed" << std::endl;
    return strict && failures > 0 ? 1 : 0;
}
