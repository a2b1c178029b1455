#include "rfct/app.hpp"

#include "rfct/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace rfct {

void write_csv_profile(const RunResult& result, std::ostream& out) {
    const Mesh& mesh = result.mesh;
    const bool two_d = mesh.dim == 2;
    out << (two_d ? "t,node,x,z,psi,theta,kr\n" : "t,node,x,psi,theta,kr\n");
    for (const Snapshot& s : result.snapshots) {
        const std::string t = format_number(s.t);
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            out << t << ',' << i << ',' << format_number(mesh.coords[i][0]);
            if (two_d) out << ',' << format_number(mesh.coords[i][1]);
            out << ',' << format_number(s.psi[i]) << ',' << format_number(s.theta[i]) << ','
                << format_number(s.kr[i]) << '\n';
        }
    }
}

void write_vtk_field(const RunResult& result, std::size_t index, std::ostream& out) {
    if (index >= result.snapshots.size()) throw std::out_of_range("snapshot index out of range");
    const Mesh& mesh = result.mesh;
    const Snapshot& s = result.snapshots[index];
    const int npe = mesh.nodes_per_element();
    out << "# vtk DataFile Version 3.0\n";
    out << result.name << ' ' << to_string(result.scheme) << " t=" << format_number(s.t) << '\n';
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (mesh.dim == 1 && mesh.vertical) {
            out << "0 " << format_number(mesh.coords[i][0]) << " 0\n";
        } else {
            out << format_number(mesh.coords[i][0]) << ' ' << format_number(mesh.coords[i][1])
                << " 0\n";
        }
    }
    out << "CELLS " << mesh.num_elements() << ' ' << mesh.num_elements() * (npe + 1) << '\n';
    for (const auto& el : mesh.elements) {
        out << npe;
        for (int k = 0; k < npe; ++k) out << ' ' << el[k];
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) out << (npe == 2 ? 3 : 5) << '\n';
    out << "CELL_DATA " << mesh.num_elements() << "\nSCALARS zone int 1\nLOOKUP_TABLE default\n";
    for (int z : mesh.element_zone) out << z << '\n';
    out << "POINT_DATA " << mesh.num_nodes() << '\n';
    auto scalars = [&](const char* name, const std::vector<double>& v) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : v) out << format_number(x) << '\n';
    };
    scalars("psi", s.psi);
    scalars("theta", s.theta);
    scalars("kr", s.kr);
}

void write_diagnostics_jsonl(const RunResult& result, std::ostream& out) {
    for (const StepDiagnostics& d : result.steps) {
        nlohmann::ordered_json rec;
        rec["t"] = d.t;
        rec["dt"] = d.dt;
        rec["newton_low"] = d.newton_low;
        rec["newton_high"] = d.newton_high;
        rec["retries"] = d.retries;
        rec["seepage_switches"] = d.seepage_switches;
        rec["theta_min"] = d.theta_min;
        rec["theta_max"] = d.theta_max;
        rec["psi_min"] = d.psi_min;
        rec["psi_max"] = d.psi_max;
        rec["bound_violations"] = d.bound_violations;
        rec["boundary_flux"] = d.boundary_flux;
        rec["mass_change"] = d.mass_change;
        rec["mass_balance"] = d.mass_balance;
        if (result.scheme == Scheme::Fct) {
            rec["limited_edges"] = d.limited_edges;
            rec["fct_bound_excess"] = d.fct_bound_excess;
            rec["fct_conservation"] = d.fct_conservation;
            rec["recovery_error"] = d.recovery_error;
            rec["high_order_fallback"] = d.high_order_fallback;
        }
        rec["warnings"] = d.warnings;
        out << rec.dump() << '\n';
    }
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
    out << "t,h,error,rate\n";
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << format_number(r.h) << ',' << format_number(r.error)
            << ',' << (r.rate ? format_number(*r.rate) : "") << '\n';
    }
}

std::vector<std::string> write_outputs(const ProblemSpec& spec, const RunResult& result,
                                       const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> paths;
    auto open = [&](const fs::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
        paths.push_back(p.string());
        return f;
    };
    const std::string stem = spec.name + "_" + std::string(to_string(result.scheme));
    if (spec.output.csv) {
        auto f = open(fs::path(dir) / (stem + ".csv"));
        write_csv_profile(result, f);
    }
    if (spec.output.vtk) {
        for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "_%04zu.vtk", k);
            auto f = open(fs::path(dir) / (stem + suffix));
            write_vtk_field(result, k, f);
        }
    }
    if (spec.output.jsonl) {
        auto f = open(fs::path(dir) / (stem + "_diagnostics.jsonl"));
        write_diagnostics_jsonl(result, f);
    }
    return paths;
}

}  // namespace rfct
