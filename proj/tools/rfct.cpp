// Command-line front end: solve, converge, list-problems, mesh-info,
// export-problem.
#include "rfct/app.hpp"
#include "rfct/errors.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kConfigExit = 2;
constexpr int kSolverExit = 3;

rfct::ProblemSpec load(const std::string& what) {
    // A config path, or the name of a builtin problem.
    if (std::filesystem::exists(what)) return rfct::load_problem(what);
    for (const auto& name : rfct::builtin_names()) {
        if (name == what) return rfct::builtin_problem(name);
    }
    throw rfct::ConfigError("no config file or builtin problem named '" + what + "'");
}

int solve(const std::string& cfg, const std::string& scheme, const std::string& out_dir) {
    auto spec = load(cfg);
    if (!scheme.empty()) spec.scheme = rfct::scheme_from_string(scheme);
    spec.validate();
    const auto result = rfct::run(spec);
    const auto files = rfct::write_outputs(spec, result, out_dir);
    int violations = 0;
    double worst_balance = 0.0;
    for (const auto& d : result.steps) {
        violations += d.bound_violations;
        worst_balance = std::max(worst_balance, std::abs(d.mass_balance));
    }
    std::cout << spec.name << " (" << rfct::to_string(spec.scheme) << "): " << result.steps.size()
              << " steps to t = " << rfct::format_number(result.snapshots.back().t)
              << ", bound violations " << violations << ", max |mass balance| "
              << rfct::format_number(worst_balance) << ", wall " << result.wall_seconds << " s\n";
    for (const auto& f : files) std::cout << "  wrote " << f << '\n';
    return 0;
}

int converge(const std::string& cfg, int levels, const std::string& times,
             const std::string& scheme, const std::string& out) {
    auto spec = load(cfg);
    if (!scheme.empty()) spec.scheme = rfct::scheme_from_string(scheme);
    rfct::ConvergenceOptions opt;
    opt.levels = levels;
    if (!times.empty()) opt.times = rfct::parse_time_list(times);
    const auto rows = rfct::convergence_study(spec, opt);
    if (out.empty()) {
        rfct::write_convergence_csv(rows, std::cout);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + out + "'");
        rfct::write_convergence_csv(rows, f);
        std::cout << "wrote " << out << '\n';
    }
    return 0;
}

int mesh_info(const std::string& path) {
    const auto mesh = rfct::load_mesh(path);
    std::cout << "dimension " << mesh.dim << "\nnodes " << mesh.num_nodes() << "\nelements "
              << mesh.num_elements() << "\nboundary facets " << mesh.facets.size()
              << "\nmeasure " << rfct::format_number(mesh.total_measure()) << "\nzones";
    for (const auto& z : mesh.zone_names) std::cout << ' ' << z;
    std::cout << "\nmarkers";
    for (const auto& m : mesh.marker_names) std::cout << ' ' << m;
    std::cout << '\n';
    return 0;
}

int export_problem(const std::string& name, const std::string& dir, bool with_mesh) {
    auto spec = rfct::builtin_problem(name);
    std::filesystem::create_directories(dir);
    if (with_mesh) {
        const auto mesh = rfct::build_mesh(spec.mesh);
        const auto mesh_file = std::filesystem::path(dir) / (name + ".rmesh");
        rfct::save_mesh(mesh, mesh_file.string());
        const rfct::MeshSpec generated = spec.mesh;
        spec.mesh = rfct::MeshSpec{};
        spec.mesh.kind = "file";
        spec.mesh.path = name + ".rmesh";
        std::cout << "wrote " << mesh_file.string() << " (" << generated.kind << ")\n";
    }
    const auto cfg = std::filesystem::path(dir) / (name + ".cfg");
    std::ofstream f(cfg, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + cfg.string() + "'");
    f << rfct::serialize_problem(spec);
    std::cout << "wrote " << cfg.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Richards equation solver with flux-corrected transport"};
    app.require_subcommand(1);

    std::string cfg, scheme, out_dir = "output", times, out, name, dir = ".";
    int levels = 4;
    bool with_mesh = false;

    auto* solve_cmd = app.add_subcommand("solve", "Run a problem and write its outputs");
    solve_cmd->add_option("config", cfg, "Config file or builtin problem name")->required();
    solve_cmd->add_option("--scheme", scheme, "galerkin, low_order or fct");
    solve_cmd->add_option("--out", out_dir, "Output directory");

    auto* conv_cmd = app.add_subcommand("converge", "Mesh refinement study against the analytic solution");
    conv_cmd->add_option("config", cfg, "Config file or builtin problem name")->required();
    conv_cmd->add_option("--levels", levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    conv_cmd->add_option("--times", times, "Comma-separated report times (units allowed)");
    conv_cmd->add_option("--scheme", scheme, "galerkin, low_order or fct");
    conv_cmd->add_option("--csv", out, "Write the table to this file instead of stdout");

    auto* list_cmd = app.add_subcommand("list-problems", "List the builtin problems");

    auto* info_cmd = app.add_subcommand("mesh-info", "Summarize a mesh file");
    info_cmd->add_option("file", cfg, "Mesh file")->required();

    auto* export_cmd = app.add_subcommand("export-problem", "Write a builtin problem as a config file");
    export_cmd->add_option("name", name, "Builtin problem name")->required();
    export_cmd->add_option("--dir", dir, "Output directory");
    export_cmd->add_flag("--with-mesh", with_mesh, "Also write the mesh and reference it by path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*solve_cmd) return solve(cfg, scheme, out_dir);
        if (*conv_cmd) return converge(cfg, levels, times, scheme, out);
        if (*list_cmd) {
            for (const auto& n : rfct::builtin_names()) std::cout << n << '\n';
            return 0;
        }
        if (*info_cmd) return mesh_info(cfg);
        if (*export_cmd) return export_problem(name, dir, with_mesh);
    } catch (const rfct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const rfct::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const rfct::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigExit;
    } catch (const rfct::InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return kConfigExit;
    } catch (const rfct::StepFailed& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverExit;
    } catch (const rfct::NonConvergence& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverExit;
    } catch (const rfct::ConsistencyError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
