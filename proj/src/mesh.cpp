#include "rfct/mesh.hpp"

#include "rfct/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rfct {

namespace {

int checked_division(double length, double h, const char* what) {
    if (!(h > 0.0) || !(length > 0.0)) {
        throw InvalidParameter(std::string(what) + ": sizes must be positive");
    }
    const double q = length / h;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
        throw InvalidParameter(std::string(what) + ": cell size must divide the domain length");
    }
    return static_cast<int>(r);
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

double Mesh::signed_measure(int e) const {
    const auto& el = elements[e];
    if (dim == 1) {
        return coords[el[1]][0] - coords[el[0]][0];
    }
    const Point& a = coords[el[0]];
    const Point& b = coords[el[1]];
    const Point& c = coords[el[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double Mesh::element_measure(int e) const { return std::abs(signed_measure(e)); }

double Mesh::total_measure() const {
    double s = 0.0;
    for (int e = 0; e < num_elements(); ++e) s += element_measure(e);
    return s;
}

std::optional<int> Mesh::zone_id(const std::string& name) const {
    auto it = std::find(zone_names.begin(), zone_names.end(), name);
    if (it == zone_names.end()) return std::nullopt;
    return static_cast<int>(it - zone_names.begin());
}

std::optional<int> Mesh::marker_id(const std::string& name) const {
    auto it = std::find(marker_names.begin(), marker_names.end(), name);
    if (it == marker_names.end()) return std::nullopt;
    return static_cast<int>(it - marker_names.begin());
}

int Mesh::add_zone(const std::string& name) {
    if (auto id = zone_id(name)) return *id;
    zone_names.push_back(name);
    return static_cast<int>(zone_names.size()) - 1;
}

int Mesh::add_marker(const std::string& name) {
    if (auto id = marker_id(name)) return *id;
    marker_names.push_back(name);
    return static_cast<int>(marker_names.size()) - 1;
}

void Mesh::finalize() {
    if (dim == 2) {
        for (int e = 0; e < num_elements(); ++e) {
            if (signed_measure(e) < 0.0) std::swap(elements[e][1], elements[e][2]);
        }
    } else {
        for (auto& el : elements) {
            if (coords[el[1]][0] < coords[el[0]][0]) std::swap(el[0], el[1]);
            el[2] = -1;
        }
    }
    elevation.resize(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        elevation[i] = dim == 2 ? coords[i][1] : (vertical ? coords[i][0] : 0.0);
    }
}

void Mesh::validate() const {
    if (dim != 1 && dim != 2) throw ValidationError("dimension must be 1 or 2");
    const int nn = num_nodes();
    const int npe = nodes_per_element();
    if (static_cast<int>(elevation.size()) != nn) {
        throw ValidationError("elevation must be defined at every node");
    }
    if (element_zone.size() != elements.size()) {
        throw ValidationError("every element needs a material zone");
    }
    std::map<std::vector<int>, int> facet_count;
    for (int e = 0; e < num_elements(); ++e) {
        const auto& el = elements[e];
        for (int a = 0; a < npe; ++a) {
            if (el[a] < 0 || el[a] >= nn) {
                throw ValidationError("element " + std::to_string(e) + " references a missing node");
            }
            for (int b = 0; b < a; ++b) {
                if (el[a] == el[b]) {
                    throw ValidationError("element " + std::to_string(e) +
                                          " has duplicate node indices");
                }
            }
        }
        if (!(signed_measure(e) > 0.0)) {
            throw ValidationError("element " + std::to_string(e) +
                                  " has non-positive measure after orientation");
        }
        if (element_zone[e] < 0 || element_zone[e] >= static_cast<int>(zone_names.size())) {
            throw ValidationError("element " + std::to_string(e) + " has an invalid material zone");
        }
        if (dim == 1) {
            facet_count[{el[0]}]++;
            facet_count[{el[1]}]++;
        } else {
            for (int a = 0; a < 3; ++a) {
                int p = el[a], q = el[(a + 1) % 3];
                facet_count[{std::min(p, q), std::max(p, q)}]++;
            }
        }
    }
    for (const auto& [key, count] : facet_count) {
        if (count > 2) throw ValidationError("nonconforming mesh: facet shared by more than 2 elements");
    }
    for (const auto& f : facets) {
        std::vector<int> key;
        if (dim == 1) {
            key = {f.nodes[0]};
        } else {
            key = {std::min(f.nodes[0], f.nodes[1]), std::max(f.nodes[0], f.nodes[1])};
        }
        auto it = facet_count.find(key);
        if (it == facet_count.end() || it->second != 1) {
            throw ValidationError("boundary facet is not on the boundary (must belong to exactly 1 element)");
        }
        if (f.marker < 0 || f.marker >= static_cast<int>(marker_names.size())) {
            throw ValidationError("boundary facet has an invalid marker");
        }
    }
}

Mesh generate_interval_mesh(double length, int num_elements, bool vertical) {
    if (num_elements < 1 || !(length > 0.0)) {
        throw InvalidParameter("interval mesh needs a positive length and at least one element");
    }
    Mesh mesh;
    mesh.dim = 1;
    mesh.vertical = vertical;
    const double h = length / num_elements;
    for (int i = 0; i <= num_elements; ++i) {
        mesh.coords.push_back({i == num_elements ? length : i * h, 0.0});
    }
    const int zone = mesh.add_zone("default");
    for (int e = 0; e < num_elements; ++e) {
        mesh.elements.push_back({e, e + 1, -1});
        mesh.element_zone.push_back(zone);
    }
    mesh.facets.push_back({{0, -1}, mesh.add_marker("bottom")});
    mesh.facets.push_back({{num_elements, -1}, mesh.add_marker("top")});
    mesh.finalize();
    return mesh;
}

Mesh triangulate_grid(const GridTriangulation& grid) {
    const int nx = checked_division(grid.width, grid.hx, "grid width");
    const int nz = checked_division(grid.height, grid.hz, "grid height");
    const double hx = grid.width / nx;
    const double hz = grid.height / nz;

    Mesh mesh;
    mesh.dim = 2;
    auto corner = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= nz; ++j) {
        for (int i = 0; i <= nx; ++i) {
            mesh.coords.push_back({i == nx ? grid.width : i * hx, j == nz ? grid.height : j * hz});
        }
    }

    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < nz; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Point center{(i + 0.5) * hx, (j + 0.5) * hz};
            if (grid.keep_cell && !grid.keep_cell(center)) continue;
            const int n00 = corner(i, j), n10 = corner(i + 1, j);
            const int n01 = corner(i, j + 1), n11 = corner(i + 1, j + 1);
            if (grid.diagonal == Diagonal::Right) {
                tris.push_back({n00, n10, n11});
                tris.push_back({n00, n11, n01});
            } else {
                const int c = static_cast<int>(mesh.coords.size());
                mesh.coords.push_back(center);
                tris.push_back({n00, n10, c});
                tris.push_back({n10, n11, c});
                tris.push_back({n11, n01, c});
                tris.push_back({n01, n00, c});
            }
        }
    }

    // Drop corner nodes not used by any kept cell and renumber compactly.
    std::vector<int> used(mesh.coords.size(), 0);
    for (const auto& t : tris)
        for (int v : t) used[v] = 1;
    std::vector<int> renumber(mesh.coords.size(), -1);
    std::vector<Point> coords;
    for (std::size_t v = 0; v < mesh.coords.size(); ++v) {
        if (used[v]) {
            renumber[v] = static_cast<int>(coords.size());
            coords.push_back(mesh.coords[v]);
        }
    }
    mesh.coords = std::move(coords);

    for (auto t : tris) {
        for (int& v : t) v = renumber[v];
        const Point c{(mesh.coords[t[0]][0] + mesh.coords[t[1]][0] + mesh.coords[t[2]][0]) / 3.0,
                      (mesh.coords[t[0]][1] + mesh.coords[t[1]][1] + mesh.coords[t[2]][1]) / 3.0};
        mesh.elements.push_back(t);
        mesh.element_zone.push_back(mesh.add_zone(grid.zone_of ? grid.zone_of(c) : "default"));
    }

    // Boundary facets: triangle edges owned by exactly one element, in element order.
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.elements) {
        for (int a = 0; a < 3; ++a) {
            int p = t[a], q = t[(a + 1) % 3];
            count[{std::min(p, q), std::max(p, q)}]++;
        }
    }
    for (const auto& t : mesh.elements) {
        for (int a = 0; a < 3; ++a) {
            int p = t[a], q = t[(a + 1) % 3];
            if (count[{std::min(p, q), std::max(p, q)}] != 1) continue;
            const Point mid{0.5 * (mesh.coords[p][0] + mesh.coords[q][0]),
                            0.5 * (mesh.coords[p][1] + mesh.coords[q][1])};
            std::string name;
            if (grid.marker_of) {
                name = grid.marker_of(mid);
            } else {
                const double tol = 1e-9 * std::max(grid.width, grid.height);
                if (mid[1] < tol) name = "bottom";
                else if (mid[1] > grid.height - tol) name = "top";
                else if (mid[0] < tol) name = "left";
                else if (mid[0] > grid.width - tol) name = "right";
                else name = "interior";
            }
            mesh.facets.push_back({{p, q}, mesh.add_marker(name)});
        }
    }
    mesh.finalize();
    mesh.validate();
    return mesh;
}

Mesh generate_rect_triangulation(double width, double height, double hx, double hz,
                                 Diagonal diagonal) {
    GridTriangulation grid;
    grid.width = width;
    grid.height = height;
    grid.hx = hx;
    grid.hz = hz;
    grid.diagonal = diagonal;
    return triangulate_grid(grid);
}

Mesh read_mesh(std::istream& in) {
    int line_no = 0;
    std::string raw;
    auto next_tokens = [&]() -> std::vector<std::string> {
        while (std::getline(in, raw)) {
            ++line_no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            std::istringstream ls(raw);
            std::vector<std::string> toks;
            for (std::string t; ls >> t;) toks.push_back(t);
            if (!toks.empty()) return toks;
        }
        throw ParseError("unexpected end of file", line_no + 1);
    };
    auto to_int = [&](const std::string& s) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) {
            throw ParseError("expected an integer, got '" + s + "'", line_no);
        }
        return v;
    };
    auto to_double = [&](const std::string& s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) {
            throw ParseError("expected a number, got '" + s + "'", line_no);
        }
        return v;
    };

    auto header = next_tokens();
    if (header.size() < 5 || header.size() > 6 || header[0] != "rmesh") {
        throw ParseError("expected header 'rmesh <dim> <nodes> <elements> <facets>'", line_no);
    }
    Mesh mesh;
    mesh.dim = to_int(header[1]);
    if (mesh.dim != 1 && mesh.dim != 2) throw ParseError("dimension must be 1 or 2", line_no);
    const int nn = to_int(header[2]);
    const int ne = to_int(header[3]);
    const int nf = to_int(header[4]);
    if (nn < 0 || ne < 0 || nf < 0) throw ParseError("counts must be non-negative", line_no);
    if (header.size() == 6) {
        if (header[5] != "horizontal" || mesh.dim != 1) {
            throw ParseError("unknown header option '" + header[5] + "'", line_no);
        }
        mesh.vertical = false;
    }

    for (int i = 0; i < nn; ++i) {
        auto t = next_tokens();
        if (static_cast<int>(t.size()) != mesh.dim) {
            throw ParseError("node line needs " + std::to_string(mesh.dim) + " coordinate(s)", line_no);
        }
        Point p{to_double(t[0]), mesh.dim == 2 ? to_double(t[1]) : 0.0};
        mesh.coords.push_back(p);
    }
    const int npe = mesh.dim + 1;
    for (int e = 0; e < ne; ++e) {
        auto t = next_tokens();
        if (static_cast<int>(t.size()) != npe + 1) {
            throw ParseError("element line needs " + std::to_string(npe) + " nodes and a zone", line_no);
        }
        std::array<int, 3> el{-1, -1, -1};
        for (int a = 0; a < npe; ++a) el[a] = to_int(t[a]);
        mesh.elements.push_back(el);
        mesh.element_zone.push_back(mesh.add_zone(t[npe]));
    }
    for (int f = 0; f < nf; ++f) {
        auto t = next_tokens();
        if (static_cast<int>(t.size()) != mesh.dim + 1) {
            throw ParseError("facet line needs " + std::to_string(mesh.dim) + " node(s) and a marker",
                             line_no);
        }
        BoundaryFacet facet;
        for (int a = 0; a < mesh.dim; ++a) facet.nodes[a] = to_int(t[a]);
        facet.marker = mesh.add_marker(t[mesh.dim]);
        mesh.facets.push_back(facet);
    }
    for (const auto& el : mesh.elements) {
        for (int a = 0; a < npe; ++a) {
            if (el[a] < 0 || el[a] >= nn) throw ValidationError("element references a missing node");
        }
    }
    mesh.finalize();
    mesh.validate();
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
    return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "rmesh " << mesh.dim << ' ' << mesh.num_nodes() << ' ' << mesh.num_elements() << ' '
        << mesh.facets.size();
    if (mesh.dim == 1 && !mesh.vertical) out << " horizontal";
    out << '\n';
    for (const auto& p : mesh.coords) {
        out << format_double(p[0]);
        if (mesh.dim == 2) out << ' ' << format_double(p[1]);
        out << '\n';
    }
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int a = 0; a < mesh.nodes_per_element(); ++a) out << mesh.elements[e][a] << ' ';
        out << mesh.zone_names[mesh.element_zone[e]] << '\n';
    }
    for (const auto& f : mesh.facets) {
        for (int a = 0; a < mesh.dim; ++a) out << f.nodes[a] << ' ';
        out << mesh.marker_names[f.marker] << '\n';
    }
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file '" + path + "'");
    write_mesh(mesh, out);
}

int AdjacencyGraph::edge_index(int i, int j) const {
    if (i == j) return -1;
    auto begin = cols_.begin() + row_ptr_[i];
    auto end = cols_.begin() + row_ptr_[i + 1];
    auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return slot_edge_[it - cols_.begin()];
}

std::vector<int> AdjacencyGraph::neighbors(int i) const {
    return {cols_.begin() + row_ptr_[i], cols_.begin() + row_ptr_[i + 1]};
}

AdjacencyGraph build_adjacency(const Mesh& mesh) {
    const int nn = mesh.num_nodes();
    const int npe = mesh.nodes_per_element();
    std::vector<std::vector<int>> nbr(nn);
    for (int i = 0; i < nn; ++i) nbr[i].push_back(i);
    for (const auto& el : mesh.elements) {
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b)
                if (a != b) nbr[el[a]].push_back(el[b]);
    }
    AdjacencyGraph g;
    g.row_ptr_.assign(nn + 1, 0);
    for (int i = 0; i < nn; ++i) {
        std::sort(nbr[i].begin(), nbr[i].end());
        nbr[i].erase(std::unique(nbr[i].begin(), nbr[i].end()), nbr[i].end());
        g.row_ptr_[i + 1] = g.row_ptr_[i] + static_cast<int>(nbr[i].size());
    }
    g.cols_.reserve(g.row_ptr_[nn]);
    for (int i = 0; i < nn; ++i) g.cols_.insert(g.cols_.end(), nbr[i].begin(), nbr[i].end());

    g.slot_edge_.assign(g.cols_.size(), -1);
    g.diag_slot_.assign(nn, -1);
    for (int i = 0; i < nn; ++i) {
        for (int s = g.row_ptr_[i]; s < g.row_ptr_[i + 1]; ++s) {
            const int j = g.cols_[s];
            if (j == i) {
                g.diag_slot_[i] = s;
            } else if (i < j) {
                g.slot_edge_[s] = static_cast<int>(g.edges_.size());
                g.edges_.push_back({i, j});
            }
        }
    }
    g.transpose_slot_.assign(g.cols_.size(), -1);
    for (int i = 0; i < nn; ++i) {
        for (int s = g.row_ptr_[i]; s < g.row_ptr_[i + 1]; ++s) {
            const int j = g.cols_[s];
            auto begin = g.cols_.begin() + g.row_ptr_[j];
            auto end = g.cols_.begin() + g.row_ptr_[j + 1];
            const int t = static_cast<int>(std::lower_bound(begin, end, i) - g.cols_.begin());
            g.transpose_slot_[s] = t;
            if (i > j) g.slot_edge_[s] = g.slot_edge_[t];
        }
    }
    return g;
}

}  // namespace rfct
