#include "rfct/app.hpp"

#include "rfct/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <set>

namespace rfct {

Discretization build_discretization(const ProblemSpec& spec) {
    Mesh mesh = build_mesh(spec.mesh);
    std::vector<SoilMaterial> by_zone;
    for (const auto& zone : mesh.zone_names) {
        auto it = spec.materials.find(zone);
        if (it == spec.materials.end()) {
            throw ConfigError("mesh zone '" + zone + "' has no [materials." + zone + "] section");
        }
        by_zone.push_back(it->second);
    }
    for (const auto& [zone, mat] : spec.materials) {
        if (!mesh.zone_id(zone)) {
            throw ConfigError("[materials." + zone + "]: the mesh has no zone '" + zone + "'");
        }
    }
    return Discretization::build(std::move(mesh), std::move(by_zone), spec.quadrature, spec.upwind);
}

BoundaryConditions build_boundary(const ProblemSpec& spec) {
    BoundaryConditions out;
    for (const auto& [marker, bc] : spec.boundary) {
        BoundaryCondition c{bc.kind, bc.value, {}};
        if (bc.profile == "tracy_top") {
            const TracyProblem p = spec.analytic.value();
            c.profile = [p](const Point& x) { return p.top_head(x[0]); };
        }
        out[marker] = std::move(c);
    }
    return out;
}

std::vector<double> initial_head(const ProblemSpec& spec, const Mesh& mesh) {
    std::vector<double> psi(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        psi[i] = spec.initial.at(mesh.coords[i], mesh.elevation[i]);
    }
    return psi;
}

std::vector<double> RunResult::dt_history() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.dt);
    return out;
}

namespace {

Snapshot snapshot(const Discretization& d, const SimulationState& s) {
    Snapshot out{s.t, s.psi, s.theta, std::vector<double>(s.psi.size())};
    for (int i = 0; i < d.num_nodes(); ++i) {
        out.kr[i] = d.node_material(i).relative_permeability(s.psi[i]);
    }
    return out;
}

}  // namespace

RunResult run(const ProblemSpec& spec, const StepObserver& observer) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    spec.validate();

    const Discretization d = build_discretization(spec);
    const BoundaryData bc = resolve_boundary(d.mesh, build_boundary(spec));
    SparseDirectSolver linear(d.graph);

    Stepper stepper;
    switch (spec.scheme) {
    case Scheme::Galerkin:
        stepper = [&](const SimulationState& s, double dt) {
            return step_galerkin(d, bc, s, dt, spec.time.theta, spec.newton, linear);
        };
        break;
    case Scheme::LowOrder:
        stepper = [&](const SimulationState& s, double dt) {
            return step_low_order(d, bc, s, dt, spec.newton, linear);
        };
        break;
    case Scheme::Fct:
        stepper = [&](const SimulationState& s, double dt) {
            return fct_step(d, bc, s, dt, spec.newton, spec.fct, linear);
        };
        break;
    }

    RunResult result;
    result.name = spec.name;
    result.scheme = spec.scheme;
    result.mesh = d.mesh;

    SimulationState state = make_initial_state(d, bc, initial_head(spec, d.mesh));
    result.snapshots.push_back(snapshot(d, state));

    std::set<double> targets(spec.output.times.begin(), spec.output.times.end());
    targets.insert(spec.time.t_end);
    targets.erase(0.0);

    double dt = spec.time.dt_init;
    for (double target : targets) {
        while (target - state.t > 1e-12 * std::max(1.0, std::abs(target))) {
            if (spec.max_wall_seconds > 0.0 &&
                std::chrono::duration<double>(clock::now() - start).count() > spec.max_wall_seconds) {
                throw StepFailed("wall-time budget of " + format_number(spec.max_wall_seconds) +
                                 " s exhausted at t = " + format_number(state.t));
            }
            AdaptiveStep step = step_adaptive(state, dt, target, spec.time, stepper);
            state = std::move(step.outcome.state);
            result.steps.push_back(std::move(step.outcome.diag));
            dt = step.dt_next;
            if (observer) observer(d, state, result.steps.back());
        }
        result.snapshots.push_back(snapshot(d, state));
    }
    result.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

int audit_mass_balance(std::istream& jsonl, double tol) {
    int bad = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(jsonl, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), line_no);
        }
        if (!rec.contains("mass_balance")) throw ParseError("record without mass_balance", line_no);
        if (!(std::abs(rec["mass_balance"].get<double>()) <= tol)) ++bad;
    }
    return bad;
}

std::vector<double> convergence_rates(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t k = 1; k < errors.size(); ++k) out.push_back(std::log2(errors[k - 1] / errors[k]));
    return out;
}

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& base,
                                              const ConvergenceOptions& opt) {
    if (!base.analytic) throw ConfigError("convergence study needs an [analytic] section");
    if (base.mesh.kind != "rect") throw ConfigError("convergence study needs a rect mesh");
    if (opt.levels < 1) throw ConfigError("convergence study needs at least one level");
    const TracyProblem& p = *base.analytic;
    std::vector<double> times = opt.times.empty() ? base.output.times : opt.times;
    if (times.empty()) times = {base.time.t_end};
    std::sort(times.begin(), times.end());

    // errors[time][level]
    std::vector<std::vector<double>> errors(times.size());
    std::vector<double> h(opt.levels);
    for (int level = 0; level < opt.levels; ++level) {
        ProblemSpec spec = base;
        spec.mesh.hx = base.mesh.hx / std::pow(2.0, level);
        spec.mesh.hz = base.mesh.hz / std::pow(2.0, level);
        spec.output.times = times;
        spec.time.t_end = times.back();
        h[level] = spec.mesh.hx;

        if (opt.interpolant) {
            const Mesh mesh = build_mesh(spec.mesh);
            for (std::size_t k = 0; k < times.size(); ++k) {
                std::vector<double> psi(mesh.num_nodes());
                for (int i = 0; i < mesh.num_nodes(); ++i) {
                    psi[i] = transient_head(p, mesh.coords[i][0], mesh.coords[i][1], times[k]);
                }
                errors[k].push_back(l2_error(mesh, psi, [&](const Point& x) {
                    return transient_head(p, x[0], x[1], times[k]);
                }));
            }
            continue;
        }

        const RunResult r = run(spec);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto snap = std::find_if(r.snapshots.begin(), r.snapshots.end(),
                                           [&](const Snapshot& s) { return s.t == times[k]; });
            if (snap == r.snapshots.end()) {
                throw ConsistencyError("no snapshot at t = " + format_number(times[k]));
            }
            errors[k].push_back(l2_error(r.mesh, snap->psi, [&](const Point& x) {
                return transient_head(p, x[0], x[1], times[k]);
            }));
        }
    }

    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto rates = convergence_rates(errors[k]);
        for (int level = 0; level < opt.levels; ++level) {
            ConvergenceRow row{h[level], times[k], errors[k][level], std::nullopt};
            if (level > 0) row.rate = rates[level - 1];
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace rfct
