#include "doctest.h"
#include "oracles.hpp"

#include "rfct/app.hpp"
#include "rfct/errors.hpp"
#include "rfct/mesh.hpp"

#include <set>
#include <sstream>

using namespace rfct;

namespace {

void check_adjacency_against_scan(const Mesh& mesh) {
    const auto g = build_adjacency(mesh);
    const auto brute = oracle::adjacency(mesh);
    REQUIRE(g.num_nodes() == mesh.num_nodes());
    int pairs = 0;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        std::vector<int> row;
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) row.push_back(g.column(k));
        CHECK(row == brute[i]);
        for (int k = g.row_begin(i); k < g.row_end(i); ++k) {
            const int j = g.column(k);
            CHECK(g.column(g.transpose_slot(k)) == i);
            if (j == i) {
                CHECK(g.slot_edge(k) == -1);
                CHECK(g.diag_slot(i) == k);
            } else {
                const int e = g.slot_edge(k);
                CHECK(g.edge_index(i, j) == e);
                CHECK(g.edge(e)[0] == std::min(i, j));
                CHECK(g.edge(e)[1] == std::max(i, j));
                ++pairs;
            }
        }
    }
    CHECK(pairs == 2 * g.num_edges());
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("interval meshes") {
    const auto one = generate_interval_mesh(1.0, 1);
    CHECK(one.num_nodes() == 2);
    CHECK(one.num_elements() == 1);
    REQUIRE(one.facets.size() == 2);
    std::set<int> ends{one.facets[0].nodes[0], one.facets[1].nodes[0]};
    CHECK(ends == std::set<int>{0, 1});

    const auto column = generate_interval_mesh(1.0, 100);
    CHECK(column.num_nodes() == 101);
    for (int e = 0; e < column.num_elements(); ++e) {
        CHECK(column.element_measure(e) == doctest::Approx(0.01).epsilon(1e-12));
    }
    CHECK(column.elevation.back() == doctest::Approx(1.0));

    const auto hydrus = generate_interval_mesh(20.0, 400);
    CHECK(hydrus.num_nodes() == 401);
    CHECK(hydrus.element_measure(17) == doctest::Approx(0.05).epsilon(1e-12));

    const auto flat = generate_interval_mesh(2.0, 4, false);
    for (double z : flat.elevation) CHECK(z == 0.0);
}

TEST_CASE("rectangle triangulations") {
    const auto m = generate_rect_triangulation(10, 10, 5, 5);
    CHECK(m.num_nodes() == 9);
    CHECK(m.num_elements() == 8);
    CHECK(m.total_measure() == doctest::Approx(100.0));
    for (int e = 0; e < m.num_elements(); ++e) CHECK(m.signed_measure(e) > 0.0);

    const auto coarse = generate_rect_triangulation(10, 10, 1.25, 1.25);
    CHECK(coarse.num_nodes() == 81);
    CHECK(coarse.num_elements() == 128);
    for (const char* name : {"bottom", "top", "left", "right"}) CHECK(coarse.marker_id(name));

    const auto crossed = generate_rect_triangulation(2, 1, 1, 1, Diagonal::Crossed);
    CHECK(crossed.num_nodes() == 6 + 2);
    CHECK(crossed.num_elements() == 8);

    CHECK_THROWS_AS(generate_rect_triangulation(1, 1, 0.3, 0.5), InvalidParameter);
}

TEST_CASE("adjacency matches a brute-force element scan") {
    const auto one = generate_interval_mesh(1.0, 1);
    const auto g1 = build_adjacency(one);
    CHECK(g1.neighbors(0) == std::vector<int>{0, 1});
    CHECK(g1.neighbors(1) == std::vector<int>{0, 1});

    std::istringstream tri("rmesh 2 3 1 3\n0 0\n1 0\n0 1\n0 1 2 soil\n0 1 b\n1 2 b\n2 0 b\n");
    const auto t = read_mesh(tri);
    const auto gt = build_adjacency(t);
    for (int i = 0; i < 3; ++i) CHECK(gt.neighbors(i) == std::vector<int>{0, 1, 2});

    for (const auto& mesh :
         {generate_rect_triangulation(10, 10, 5, 5), generate_interval_mesh(1.0, 7),
          generate_rect_triangulation(3, 2, 1, 1, Diagonal::Crossed),
          generate_rect_triangulation(10, 10, 1.25, 1.25)}) {
        check_adjacency_against_scan(mesh);
    }
}

TEST_CASE("interior nodes have at least four neighbours") {
    const auto m = generate_rect_triangulation(4, 3, 0.5, 0.5);
    const auto g = build_adjacency(m);
    std::vector<char> on_boundary(m.num_nodes(), 0);
    for (const auto& f : m.facets) on_boundary[f.nodes[0]] = on_boundary[f.nodes[1]] = 1;
    for (int i = 0; i < m.num_nodes(); ++i) {
        if (!on_boundary[i]) CHECK(g.neighbors(i).size() - 1 >= 4);
    }
}

TEST_CASE("mesh files") {
    std::istringstream tri("# one triangle\nrmesh 2 3 1 1\n0 0\n1 0\n0 1\n0 1 2 soil\n0 1 bottom\n");
    const auto t = read_mesh(tri);
    CHECK(t.num_nodes() == 3);
    CHECK(t.zone_names == std::vector<std::string>{"soil"});

    std::istringstream dup("rmesh 2 3 1 0\n0 0\n1 0\n0 1\n0 1 1 soil\n");
    CHECK_THROWS_AS(read_mesh(dup), ValidationError);

    std::istringstream truncated("rmesh 2 3 1 0\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(truncated), ParseError);

    std::istringstream horiz("rmesh 1 2 1 2 horizontal\n0\n1\n0 1 soil\n0 left\n1 right\n");
    const auto h = read_mesh(horiz);
    CHECK_FALSE(h.vertical);
    CHECK(h.elevation == std::vector<double>{0.0, 0.0});

    const auto m = generate_rect_triangulation(3, 2, 0.5, 0.25, Diagonal::Crossed);
    std::ostringstream out;
    write_mesh(m, out);
    std::istringstream back(out.str());
    CHECK(read_mesh(back) == m);
}

TEST_CASE("bioswale cross-section zones") {
    const auto spec = builtin_problem("bioswale2d");
    const auto m = build_mesh(spec.mesh);
    std::set<std::string> zones(m.zone_names.begin(), m.zone_names.end());
    CHECK(zones == std::set<std::string>{"root_zone", "swale_channel", "base"});
    // 3 m x 5 m minus the 0.2 m pipe opening
    CHECK(m.total_measure() == doctest::Approx(15.0 - 0.04).epsilon(1e-12));
    CHECK(m.marker_id("pipe"));
    CHECK_NOTHROW(m.validate());
}

}  // TEST_SUITE
