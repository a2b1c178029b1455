/**
 * @file mesh.hpp
 * @brief 1D interval and 2D triangular simplicial meshes plus the node adjacency graph.
 *
 * Coordinates are (x) in 1D and (x, z) in 2D with z positive up. Nodal
 * elevation is the last coordinate for vertical columns and 2D meshes, zero
 * for horizontal 1D meshes.
 *
 * ASCII mesh format (whitespace delimited, '#' starts a comment):
 *
 *     rmesh <dim> <num_nodes> <num_elements> <num_boundary_facets>
 *     x [z]                    one line per node
 *     n0 n1 [n2] zone          one line per element; zone is a name
 *     n0 [n1] marker           one line per boundary facet
 *
 * 1D files carry an optional trailing header token "horizontal"; without it
 * the single coordinate is treated as elevation.
 */
#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rfct {

using Point = std::array<double, 2>;

struct BoundaryFacet {
    std::array<int, 2> nodes{-1, -1};  ///< second entry unused (-1) in 1D
    int marker = -1;

    bool operator==(const BoundaryFacet&) const = default;
};

struct Mesh {
    int dim = 1;
    bool vertical = true;  ///< 1D only: coordinate is elevation
    std::vector<Point> coords;
    std::vector<double> elevation;
    std::vector<std::array<int, 3>> elements;  ///< third entry unused (-1) in 1D
    std::vector<int> element_zone;
    std::vector<std::string> zone_names;
    std::vector<BoundaryFacet> facets;
    std::vector<std::string> marker_names;

    int num_nodes() const { return static_cast<int>(coords.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }
    int nodes_per_element() const { return dim + 1; }

    /// Signed length (1D) or area (2D) of element @p e.
    double signed_measure(int e) const;
    double element_measure(int e) const;
    double total_measure() const;

    std::optional<int> zone_id(const std::string& name) const;
    std::optional<int> marker_id(const std::string& name) const;
    int add_zone(const std::string& name);
    int add_marker(const std::string& name);

    /// Orients 2D triangles counter-clockwise and fills elevation.
    void finalize();
    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    bool operator==(const Mesh&) const = default;
};

Mesh generate_interval_mesh(double length, int num_elements, bool vertical = true);

enum class Diagonal { Right, Crossed };

/// Structured triangulation of [0,width] x [0,height] with cells hx by hz.
/// Markers: "bottom", "top", "left", "right"; single zone "default".
Mesh generate_rect_triangulation(double width, double height, double hx, double hz,
                                 Diagonal diagonal = Diagonal::Right);

/// General structured triangulation with optional holes, zoning and marker
/// assignment. @p keep_cell receives the cell center; @p zone_of receives the
/// element centroid; @p marker_of receives the facet midpoint and returns a
/// marker name.
struct GridTriangulation {
    double width = 1.0;
    double height = 1.0;
    double hx = 1.0;
    double hz = 1.0;
    Diagonal diagonal = Diagonal::Right;
    std::function<bool(const Point&)> keep_cell;
    std::function<std::string(const Point&)> zone_of;
    std::function<std::string(const Point&)> marker_of;
};

Mesh triangulate_grid(const GridTriangulation& grid);

Mesh load_mesh(const std::string& path);
Mesh read_mesh(std::istream& in);
void save_mesh(const Mesh& mesh, const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);

/// Node neighborhoods N_i = {j : i and j share an element}, stored in CSR
/// order with sorted columns (i itself included), plus the canonical edge
/// list (i < j).
class AdjacencyGraph {
public:
    AdjacencyGraph() = default;

    int num_nodes() const { return static_cast<int>(row_ptr_.size()) - 1; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Slots of row i are [row_begin(i), row_end(i)).
    int row_begin(int i) const { return row_ptr_[i]; }
    int row_end(int i) const { return row_ptr_[i + 1]; }
    int column(int slot) const { return cols_[slot]; }
    /// Edge index of the slot, or -1 for the diagonal slot.
    int slot_edge(int slot) const { return slot_edge_[slot]; }
    int diag_slot(int i) const { return diag_slot_[i]; }
    /// Slot holding (j, i) for the slot holding (i, j).
    int transpose_slot(int slot) const { return transpose_slot_[slot]; }

    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// Edge index for the pair {i, j}, or -1 when not adjacent / i == j.
    int edge_index(int i, int j) const;
    std::vector<int> neighbors(int i) const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }

    friend AdjacencyGraph build_adjacency(const Mesh& mesh);

private:
    std::vector<int> row_ptr_{0};
    std::vector<int> cols_;
    std::vector<int> slot_edge_;
    std::vector<int> diag_slot_;
    std::vector<int> transpose_slot_;
    std::vector<std::array<int, 2>> edges_;
};

AdjacencyGraph build_adjacency(const Mesh& mesh);

}  // namespace rfct
