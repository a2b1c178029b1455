#include "rfct/assembly.hpp"

#include "rfct/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rfct {

namespace {

constexpr std::array<std::array<int, 2>, 3> kLocalPairs{{{0, 1}, {0, 2}, {1, 2}}};

int local_pair_count(int dim) { return dim == 1 ? 1 : 3; }

}  // namespace

GraphOperator::GraphOperator(std::shared_ptr<const AdjacencyGraph> graph, bool symmetric)
    : graph_(std::move(graph)), symmetric_(symmetric) {
    diag_.assign(graph_->num_nodes(), 0.0);
    upper_.assign(graph_->num_edges(), 0.0);
    if (!symmetric_) lower_.assign(graph_->num_edges(), 0.0);
}

double GraphOperator::entry(int i, int j) const {
    if (i == j) return diag_[i];
    const int e = graph_->edge_index(i, j);
    return e < 0 ? 0.0 : at(i, j, e);
}

void GraphOperator::add(int i, int j, int edge, double value) {
    if (i == j) {
        diag_[i] += value;
    } else if (i < j || symmetric_) {
        upper_[edge] += value;
    } else {
        lower_[edge] += value;
    }
}

std::vector<double> GraphOperator::apply(std::span<const double> u) const {
    const AdjacencyGraph& g = *graph_;
    std::vector<double> y(g.num_nodes(), 0.0);
    for (int i = 0; i < g.num_nodes(); ++i) {
        double s = 0.0;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int j = g.column(k);
            s += at(i, j, g.slot_edge(k)) * u[j];
        }
        y[i] = s;
    }
    return y;
}

std::vector<double> GraphOperator::row_sums() const {
    std::vector<double> ones(graph_->num_nodes(), 1.0);
    return apply(ones);
}

ElementGeometry element_geometry(const Mesh& mesh, int e) {
    ElementGeometry g;
    const auto& el = mesh.elements[e];
    if (mesh.dim == 1) {
        const double h = mesh.coords[el[1]][0] - mesh.coords[el[0]][0];
        g.measure = std::abs(h);
        g.grad[0] = {-1.0 / h, 0.0};
        g.grad[1] = {1.0 / h, 0.0};
        return g;
    }
    const Point& a = mesh.coords[el[0]];
    const Point& b = mesh.coords[el[1]];
    const Point& c = mesh.coords[el[2]];
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    g.measure = 0.5 * std::abs(det);
    // grad lambda_k = rot90(opposite edge) / det
    g.grad[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
    g.grad[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
    g.grad[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
    return g;
}

std::array<std::array<double, 3>, 3> element_stiffness(const Mesh& mesh, const ElementGeometry& g,
                                                      const ConductivityTensor& k) {
    std::array<std::array<double, 3>, 3> s{};
    const int npe = mesh.nodes_per_element();
    for (int a = 0; a < npe; ++a) {
        for (int b = 0; b < npe; ++b) {
            if (mesh.dim == 1) {
                s[a][b] = g.measure * k.xx * g.grad[b][0] * g.grad[a][0];
            } else {
                const double kx = k.xx * g.grad[b][0] + k.xz * g.grad[b][1];
                const double kz = k.xz * g.grad[b][0] + k.zz * g.grad[b][1];
                s[a][b] = g.measure * (kx * g.grad[a][0] + kz * g.grad[a][1]);
            }
        }
    }
    return s;
}

std::vector<std::array<int, 3>> element_edges(const Mesh& mesh, const AdjacencyGraph& graph) {
    std::vector<std::array<int, 3>> out(mesh.num_elements(), {-1, -1, -1});
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (int p = 0; p < local_pair_count(mesh.dim); ++p) {
            out[e][p] = graph.edge_index(el[kLocalPairs[p][0]], el[kLocalPairs[p][1]]);
        }
    }
    return out;
}

ElementQuadrature element_quadrature(int dim, Quadrature rule) {
    ElementQuadrature q;
    if (rule == Quadrature::Centroid) {
        q.points.push_back(dim == 1 ? std::array<double, 3>{0.5, 0.5, 0.0}
                                    : std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3});
        q.weights.push_back(1.0);
        return q;
    }
    if (dim == 1) {
        const double d = 0.5 * std::sqrt(0.6);
        q.points = {{0.5 + d, 0.5 - d, 0.0}, {0.5, 0.5, 0.0}, {0.5 - d, 0.5 + d, 0.0}};
        q.weights = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    } else {
        q.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
        q.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    }
    return q;
}

double element_conductivity_factor(const Mesh& mesh, int e, const SoilMaterial& mat,
                                   std::span<const double> psi, const ElementQuadrature& quad,
                                   std::array<double, 3>* dkappa) {
    const auto& el = mesh.elements[e];
    const int npe = mesh.nodes_per_element();
    double kappa = 0.0;
    if (dkappa) dkappa->fill(0.0);
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
        double psi_q = 0.0;
        for (int a = 0; a < npe; ++a) psi_q += quad.points[q][a] * psi[el[a]];
        kappa += quad.weights[q] * mat.relative_permeability(psi_q);
        if (dkappa) {
            const double dk = quad.weights[q] * mat.relative_permeability_derivative(psi_q);
            for (int a = 0; a < npe; ++a) (*dkappa)[a] += dk * quad.points[q][a];
        }
    }
    return kappa;
}

EdgeMaterialWeights::EdgeMaterialWeights(const Mesh& mesh, const AdjacencyGraph& graph) {
    std::vector<std::vector<std::pair<int, double>>> acc(graph.num_edges());
    const auto edges = element_edges(mesh, graph);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double w = mesh.element_measure(e);
        const int zone = mesh.element_zone[e];
        for (int p = 0; p < local_pair_count(mesh.dim); ++p) {
            auto& list = acc[edges[e][p]];
            auto it = std::find_if(list.begin(), list.end(),
                                   [zone](const auto& z) { return z.first == zone; });
            if (it == list.end()) {
                list.emplace_back(zone, w);
            } else {
                it->second += w;
            }
        }
    }
    for (auto& list : acc) {
        std::sort(list.begin(), list.end());
        double total = 0.0;
        for (const auto& z : list) total += z.second;
        for (const auto& z : list) {
            zone_.push_back(z.first);
            weight_.push_back(z.second / total);
        }
        ptr_.push_back(static_cast<int>(zone_.size()));
    }
}

double EdgeMaterialWeights::relative_permeability(int edge, double psi,
                                                  std::span<const SoilMaterial> by_zone) const {
    double k = 0.0;
    for (int s = ptr_[edge]; s < ptr_[edge + 1]; ++s) {
        k += weight_[s] * by_zone[zone_[s]].relative_permeability(psi);
    }
    return k;
}

double EdgeMaterialWeights::relative_permeability_derivative(
    int edge, double psi, std::span<const SoilMaterial> by_zone) const {
    double k = 0.0;
    for (int s = ptr_[edge]; s < ptr_[edge + 1]; ++s) {
        k += weight_[s] * by_zone[zone_[s]].relative_permeability_derivative(psi);
    }
    return k;
}

std::vector<int> node_zones(const Mesh& mesh) {
    const int nz = static_cast<int>(mesh.zone_names.size());
    std::vector<double> acc(static_cast<std::size_t>(mesh.num_nodes()) * nz, 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double w = mesh.element_measure(e);
        for (int a = 0; a < mesh.nodes_per_element(); ++a) {
            acc[static_cast<std::size_t>(mesh.elements[e][a]) * nz + mesh.element_zone[e]] += w;
        }
    }
    std::vector<int> zone(mesh.num_nodes(), 0);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        double best = -1.0;
        for (int z = 0; z < nz; ++z) {
            const double w = acc[static_cast<std::size_t>(i) * nz + z];
            if (w > best) {
                best = w;
                zone[i] = z;
            }
        }
    }
    return zone;
}

GraphOperator assemble_consistent_mass(const Mesh& mesh,
                                       const std::shared_ptr<const AdjacencyGraph>& graph) {
    GraphOperator M(graph, true);
    const auto edges = element_edges(mesh, *graph);
    const int npe = mesh.nodes_per_element();
    // m_ab = |e| (1 + delta_ab) / ((d+1)(d+2))
    const double denom = (mesh.dim + 1.0) * (mesh.dim + 2.0);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double w = mesh.element_measure(e) / denom;
        const auto& el = mesh.elements[e];
        for (int a = 0; a < npe; ++a) M.diag()[el[a]] += 2.0 * w;
        for (int p = 0; p < local_pair_count(mesh.dim); ++p) M.upper()[edges[e][p]] += w;
    }
    return M;
}

LumpedMass lump_mass(const GraphOperator& mass) { return {mass.row_sums()}; }

GraphOperator lumped_operator(const LumpedMass& lumped,
                              const std::shared_ptr<const AdjacencyGraph>& graph) {
    GraphOperator op(graph, true);
    op.diag() = lumped.m;
    return op;
}

GraphOperator assemble_saturated_stiffness(const Mesh& mesh,
                                           const std::shared_ptr<const AdjacencyGraph>& graph,
                                           std::span<const SoilMaterial> by_zone) {
    GraphOperator A(graph, true);
    const auto edges = element_edges(mesh, *graph);
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto geom = element_geometry(mesh, e);
        const auto s = element_stiffness(mesh, geom, by_zone[mesh.element_zone[e]].ks());
        const auto& el = mesh.elements[e];
        for (int a = 0; a < npe; ++a) A.diag()[el[a]] += s[a][a];
        for (int p = 0; p < local_pair_count(mesh.dim); ++p) {
            A.upper()[edges[e][p]] += s[kLocalPairs[p][0]][kLocalPairs[p][1]];
        }
    }
    return A;
}

GraphOperator assemble_galerkin_stiffness(const Mesh& mesh,
                                          const std::shared_ptr<const AdjacencyGraph>& graph,
                                          std::span<const SoilMaterial> by_zone,
                                          std::span<const double> psi, Quadrature rule) {
    GraphOperator A(graph, true);
    const auto edges = element_edges(mesh, *graph);
    const auto quad = element_quadrature(mesh.dim, rule);
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const SoilMaterial& mat = by_zone[mesh.element_zone[e]];
        const auto geom = element_geometry(mesh, e);
        const auto s = element_stiffness(mesh, geom, mat.ks());
        const double kappa = element_conductivity_factor(mesh, e, mat, psi, quad);
        const auto& el = mesh.elements[e];
        for (int a = 0; a < npe; ++a) A.diag()[el[a]] += kappa * s[a][a];
        for (int p = 0; p < local_pair_count(mesh.dim); ++p) {
            A.upper()[edges[e][p]] += kappa * s[kLocalPairs[p][0]][kLocalPairs[p][1]];
        }
    }
    return A;
}

UpwindStiffness assemble_upwind_stiffness(const GraphOperator& saturated,
                                          std::span<const double> psi,
                                          std::span<const double> phi,
                                          std::span<const SoilMaterial> by_zone,
                                          const EdgeMaterialWeights& weights,
                                          const UpwindOptions& options) {
    const AdjacencyGraph& g = saturated.graph();
    UpwindStiffness out{GraphOperator(saturated.graph_ptr(), true), {}, {}};
    out.upwind_node.resize(g.num_edges());
    out.base.resize(g.num_edges());
    auto& off = out.op.upper();
    auto& diag = out.op.diag();
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto [i, j] = g.edge(e);
        const double as = saturated.upper()[e];
        int up = as * (phi[j] - phi[i]) >= 0.0 ? i : j;
        if (options.flip) up = up == i ? j : i;
        const double base = options.mmatrix_fix ? -std::max(0.0, -as) : as;
        const double value = weights.relative_permeability(e, psi[up], by_zone) * base;
        out.upwind_node[e] = up;
        out.base[e] = base;
        off[e] = value;
        diag[i] -= value;
        diag[j] -= value;
    }
    return out;
}

std::vector<double> assemble_neumann(const Mesh& mesh, const std::map<std::string, double>& flux) {
    std::vector<double> b(mesh.num_nodes(), 0.0);
    std::vector<double> by_marker(mesh.marker_names.size(), 0.0);
    std::vector<char> active(mesh.marker_names.size(), 0);
    for (const auto& [name, g] : flux) {
        auto id = mesh.marker_id(name);
        if (!id) throw ConfigError("unknown boundary marker '" + name + "'");
        by_marker[*id] = g;
        active[*id] = 1;
    }
    for (const auto& f : mesh.facets) {
        if (!active[f.marker]) continue;
        const double g = by_marker[f.marker];
        if (mesh.dim == 1) {
            b[f.nodes[0]] += g;
        } else {
            const Point& p = mesh.coords[f.nodes[0]];
            const Point& q = mesh.coords[f.nodes[1]];
            const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
            b[f.nodes[0]] += 0.5 * g * len;
            b[f.nodes[1]] += 0.5 * g * len;
        }
    }
    return b;
}

}  // namespace rfct
