/**
 * @file assembly.hpp
 * @brief P1 finite element operators stored over the mesh adjacency graph.
 *
 * A GraphOperator keeps one diagonal value per node and off-diagonal values per
 * canonical edge (i < j): @c upper holds a_ij, @c lower holds a_ji and is empty
 * for symmetric operators. Edge indexing gives O(1) pairing of (i, j) and (j, i)
 * for the antidiffusive flux machinery.
 */
#pragma once

#include "rfct/constitutive.hpp"
#include "rfct/mesh.hpp"

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rfct {

class GraphOperator {
public:
    GraphOperator() = default;
    GraphOperator(std::shared_ptr<const AdjacencyGraph> graph, bool symmetric);

    const AdjacencyGraph& graph() const { return *graph_; }
    const std::shared_ptr<const AdjacencyGraph>& graph_ptr() const { return graph_; }
    bool symmetric() const { return symmetric_; }

    std::vector<double>& diag() { return diag_; }
    const std::vector<double>& diag() const { return diag_; }
    std::vector<double>& upper() { return upper_; }
    const std::vector<double>& upper() const { return upper_; }
    std::vector<double>& lower() { return symmetric_ ? upper_ : lower_; }
    const std::vector<double>& lower() const { return symmetric_ ? upper_ : lower_; }

    /// a_ij for j adjacent to i through @p edge (or the diagonal when i == j).
    double at(int i, int j, int edge) const {
        if (i == j) return diag_[i];
        return (i < j || symmetric_) ? upper_[edge] : lower_[edge];
    }
    /// a_ij looked up through the adjacency graph; 0 outside the pattern.
    double entry(int i, int j) const;
    void add(int i, int j, int edge, double value);

    /// y = A u
    std::vector<double> apply(std::span<const double> u) const;
    std::vector<double> row_sums() const;

private:
    std::shared_ptr<const AdjacencyGraph> graph_;
    bool symmetric_ = true;
    std::vector<double> diag_;
    std::vector<double> upper_;
    std::vector<double> lower_;
};

struct LumpedMass {
    std::vector<double> m;
};

/// Geometry of one simplex: measure and gradients of the barycentric basis.
struct ElementGeometry {
    double measure = 0.0;
    std::array<Point, 3> grad{};
};

ElementGeometry element_geometry(const Mesh& mesh, int e);

/// Local stiffness s_ab = |e| (K grad v_b) . grad v_a for a given tensor.
std::array<std::array<double, 3>, 3> element_stiffness(const Mesh& mesh, const ElementGeometry& g,
                                                      const ConductivityTensor& k);

/// Edge index of every local node pair of every element; pair order (0,1), (0,2), (1,2).
std::vector<std::array<int, 3>> element_edges(const Mesh& mesh, const AdjacencyGraph& graph);

enum class Quadrature { Centroid, ThreePoint };

/// Quadrature for k_r over one element: barycentric points with weights summing to 1.
struct ElementQuadrature {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};

ElementQuadrature element_quadrature(int dim, Quadrature rule);

/// Element conductivity factor kappa_e = sum_q w_q k_r(psi_h(x_q)) and optionally
/// its derivative with respect to the element's nodal pressure heads.
double element_conductivity_factor(const Mesh& mesh, int e, const SoilMaterial& mat,
                                   std::span<const double> psi, const ElementQuadrature& quad,
                                   std::array<double, 3>* dkappa = nullptr);

/// Material weights per edge: every element containing the edge contributes its
/// zone with weight |e|, normalized to sum to 1.
class EdgeMaterialWeights {
public:
    EdgeMaterialWeights() = default;
    EdgeMaterialWeights(const Mesh& mesh, const AdjacencyGraph& graph);

    /// sum_m w_m k_r^m(psi)
    double relative_permeability(int edge, double psi, std::span<const SoilMaterial> by_zone) const;
    double relative_permeability_derivative(int edge, double psi,
                                            std::span<const SoilMaterial> by_zone) const;

private:
    std::vector<int> ptr_{0};
    std::vector<int> zone_;
    std::vector<double> weight_;
};

/// Node material used for nodal moisture content: the zone with the largest
/// incident element measure (lowest zone id on ties).
std::vector<int> node_zones(const Mesh& mesh);

GraphOperator assemble_consistent_mass(const Mesh& mesh,
                                       const std::shared_ptr<const AdjacencyGraph>& graph);
LumpedMass lump_mass(const GraphOperator& mass);
GraphOperator lumped_operator(const LumpedMass& lumped,
                              const std::shared_ptr<const AdjacencyGraph>& graph);

GraphOperator assemble_saturated_stiffness(const Mesh& mesh,
                                           const std::shared_ptr<const AdjacencyGraph>& graph,
                                           std::span<const SoilMaterial> by_zone);

GraphOperator assemble_galerkin_stiffness(const Mesh& mesh,
                                          const std::shared_ptr<const AdjacencyGraph>& graph,
                                          std::span<const SoilMaterial> by_zone,
                                          std::span<const double> psi,
                                          Quadrature rule = Quadrature::Centroid);

struct UpwindOptions {
    bool mmatrix_fix = true;
    /// Select the opposite node of the default branch (diagnostic switch).
    bool flip = false;

    bool operator==(const UpwindOptions&) const = default;
};

struct UpwindStiffness {
    GraphOperator op;
    std::vector<int> upwind_node;      ///< node whose k_r was used, per edge
    std::vector<double> base;          ///< a_s,ij or -max(0, -a_s,ij) with the fix, per edge
};

/// Upwind conductivity operator: off-diagonals k~_r,ij a_s,ij (or
/// -k~_r,ij max(0, -a_s,ij) with the M-matrix fix), diagonal set for zero row
/// sums. k~_r,ij = k_r(psi_i) when a_s,ij (phi_j - phi_i) >= 0 for the
/// canonical orientation i < j, otherwise k_r(psi_j).
UpwindStiffness assemble_upwind_stiffness(const GraphOperator& saturated,
                                          std::span<const double> psi,
                                          std::span<const double> phi,
                                          std::span<const SoilMaterial> by_zone,
                                          const EdgeMaterialWeights& weights,
                                          const UpwindOptions& options = {});

/// b_i = int_{Gamma_N} g_N v_i dS for the listed markers (g_N = outward flux, m/day).
/// Throws ConfigError for markers missing from the mesh.
std::vector<double> assemble_neumann(const Mesh& mesh, const std::map<std::string, double>& flux);

}  // namespace rfct
