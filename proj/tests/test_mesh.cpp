#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "porofem/errors.hpp"
#include "porofem/mesh.hpp"

using namespace porofem;

namespace {

int count_tag(const Mesh &m, BoundaryTag tag) {
    int n = 0;
    for (const Facet &f : m.facets())
        if (f.tag == tag) ++n;
    return n;
}

std::vector<std::pair<double, double>> sorted_coords(const Mesh &m) {
    std::vector<std::pair<double, double>> c;
    for (int v = 0; v < m.num_vertices(); ++v) c.emplace_back(m.vertex(v).x, m.vertex(v).y);
    std::sort(c.begin(), c.end());
    return c;
}

}  // namespace

TEST_CASE("smallest decomposition: n = 1") {
    const Mesh m = unit_square_mesh(1);
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_cells() == 2);
    CHECK(m.num_edges() == 5);
    CHECK(count_tag(m, BoundaryTag::Top) + count_tag(m, BoundaryTag::Bottom) +
              count_tag(m, BoundaryTag::Lateral) ==
          4);
}

TEST_CASE("n = 0 rejected") { CHECK_THROWS_AS(unit_square_mesh(0), MeshError); }

TEST_CASE("benchmark mesh: n = 10") {
    const Mesh m = unit_square_mesh(10);
    CHECK(m.num_vertices() == 121);
    CHECK(m.num_cells() == 200);
    CHECK(m.mesh_size() == doctest::Approx(std::sqrt(2.0) * 0.1));
}

TEST_CASE("Euler relation by enumeration on the 2x2 grid") {
    const Mesh m = unit_square_mesh(2);
    CHECK(m.num_vertices() == 9);
    CHECK(m.num_edges() == 16);
    CHECK(m.num_cells() == 8);
    CHECK(m.num_vertices() - m.num_edges() + m.num_cells() == 1);
}

TEST_CASE("mesh invariants across sizes") {
    for (const int n : {1, 2, 3, 5}) {
        const Mesh m = unit_square_mesh(n);
        CAPTURE(n);

        double area = 0.0;
        for (int k = 0; k < m.num_cells(); ++k) {
            CHECK(m.cell_area(k) > 0.0);
            area += m.cell_area(k);
        }
        CHECK(area == doctest::Approx(1.0).epsilon(1e-14));

        CHECK(m.num_vertices() - m.num_edges() + m.num_cells() == 1);

        int boundary = 0;
        for (const Facet &f : m.facets()) {
            if (f.on_boundary()) {
                ++boundary;
                CHECK(f.tag != BoundaryTag::Interior);
                CHECK(f.cell_lo >= 0);
                CHECK(f.cell_hi == -1);
            } else {
                CHECK(f.tag == BoundaryTag::Interior);
                CHECK(f.cell_lo >= 0);
                CHECK(f.cell_hi > f.cell_lo);
            }
        }
        CHECK(boundary == 4 * n);
        CHECK(count_tag(m, BoundaryTag::Top) == n);
        CHECK(count_tag(m, BoundaryTag::Bottom) == n);
        CHECK(count_tag(m, BoundaryTag::Lateral) == 2 * n);
    }
}

TEST_CASE("interior normals point from the lower owner to the higher one") {
    const Mesh m = unit_square_mesh(3);
    auto centroid = [&](int k) {
        const auto v = m.cell_vertices(k);
        return (1.0 / 3.0) * (v[0] + v[1] + v[2]);
    };
    for (const Facet &f : m.facets()) {
        if (f.on_boundary()) continue;
        CHECK(dot(f.normal, centroid(f.cell_hi) - centroid(f.cell_lo)) > 0.0);
        CHECK(norm(f.normal) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("normals are reproducible across rebuilds") {
    const Mesh a = unit_square_mesh(4);
    const Mesh b = unit_square_mesh(4);
    REQUIRE(a.num_edges() == b.num_edges());
    for (int e = 0; e < a.num_edges(); ++e) {
        CHECK(a.facet(e).normal.x == b.facet(e).normal.x);
        CHECK(a.facet(e).normal.y == b.facet(e).normal.y);
        CHECK(a.facet(e).a == b.facet(e).a);
        CHECK(a.facet(e).b == b.facet(e).b);
    }
}

TEST_CASE("red refinement splits each triangle into four") {
    const Mesh m = unit_square_mesh(1);
    const Mesh r = refine(m);
    CHECK(r.num_cells() == 8);

    double area = 0.0;
    for (int k = 0; k < r.num_cells(); ++k) area += r.cell_area(k);
    CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("refine(unit_square_mesh(4)) matches unit_square_mesh(8) up to ordering") {
    const auto ca = sorted_coords(refine(unit_square_mesh(4)));
    const auto cb = sorted_coords(unit_square_mesh(8));
    REQUIRE(ca.size() == cb.size());
    for (size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].first == doctest::Approx(cb[i].first).epsilon(1e-15));
        CHECK(ca[i].second == doctest::Approx(cb[i].second).epsilon(1e-15));
    }
}

TEST_CASE("refine twice gives 16x the cells and inherits tags") {
    const Mesh m = unit_square_mesh(2);
    const Mesh rr = refine(refine(m));
    CHECK(rr.num_cells() == 16 * m.num_cells());
    CHECK(count_tag(rr, BoundaryTag::Top) == 4 * count_tag(m, BoundaryTag::Top));
    CHECK(count_tag(rr, BoundaryTag::Bottom) == 4 * count_tag(m, BoundaryTag::Bottom));
    CHECK(count_tag(rr, BoundaryTag::Lateral) == 4 * count_tag(m, BoundaryTag::Lateral));
}

TEST_CASE("plain-text dump format") {
    const Mesh m = unit_square_mesh(1);
    std::ostringstream os;
    dump(m, os);
    std::istringstream is(os.str());
    std::string word;
    int nv = 0, nc = 0;
    is >> word >> nv >> word >> nc;
    CHECK(nv == 4);
    CHECK(nc == 2);
    double x = -1, y = -1;
    is >> x >> y;
    CHECK(x == 0.0);
    CHECK(y == 0.0);
}

TEST_CASE("degenerate cells rejected") {
    std::vector<Vec2> verts{{0, 0}, {1, 0}, {2, 0}};
    std::vector<std::array<int, 3>> cells{{0, 1, 2}};
    CHECK_THROWS_AS(Mesh::from_data(verts, cells), MeshError);
}
