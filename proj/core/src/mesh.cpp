#include "porofem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "porofem/errors.hpp"

namespace porofem {

namespace {

constexpr double kGeomTol = 1e-12;

BoundaryTag classify_boundary_edge(const Vec2 &pa, const Vec2 &pb) {
    if (std::abs(pa.y - 1.0) < kGeomTol && std::abs(pb.y - 1.0) < kGeomTol)
        return BoundaryTag::Top;
    if (std::abs(pa.y) < kGeomTol && std::abs(pb.y) < kGeomTol)
        return BoundaryTag::Bottom;
    const bool left = std::abs(pa.x) < kGeomTol && std::abs(pb.x) < kGeomTol;
    const bool right = std::abs(pa.x - 1.0) < kGeomTol && std::abs(pb.x - 1.0) < kGeomTol;
    if (left || right) return BoundaryTag::Lateral;
    throw MeshError("boundary facet not on the unit-square boundary");
}

}  // namespace

Mesh Mesh::from_data(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells) {
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.cells_ = std::move(cells);

    const int nv = m.num_vertices();
    const int nc = m.num_cells();
    m.areas_.resize(nc);
    for (int k = 0; k < nc; ++k) {
        const auto &c = m.cells_[k];
        for (int i = 0; i < 3; ++i)
            if (c[i] < 0 || c[i] >= nv) throw MeshError("cell vertex index out of range");
        const Vec2 p0 = m.vertices_[c[0]], p1 = m.vertices_[c[1]], p2 = m.vertices_[c[2]];
        const double area = 0.5 * cross(p1 - p0, p2 - p0);
        if (area <= 0.0) throw MeshError("cell " + std::to_string(k) + " has non-positive area");
        m.areas_[k] = area;
    }

    // Edge numbering: lexicographic on sorted vertex pairs.
    std::map<std::pair<int, int>, int> edge_id;
    for (int k = 0; k < nc; ++k) {
        const auto &c = m.cells_[k];
        for (int i = 0; i < 3; ++i) {
            int a = c[(i + 1) % 3], b = c[(i + 2) % 3];
            if (a > b) std::swap(a, b);
            edge_id.emplace(std::make_pair(a, b), 0);
        }
    }
    int ne = 0;
    for (auto &kv : edge_id) kv.second = ne++;

    m.facets_.assign(ne, Facet{});
    for (const auto &kv : edge_id) {
        Facet &f = m.facets_[kv.second];
        f.a = kv.first.first;
        f.b = kv.first.second;
    }

    m.cell_edges_.resize(nc);
    m.cell_edge_signs_.resize(nc);
    for (int k = 0; k < nc; ++k) {
        const auto &c = m.cells_[k];
        for (int i = 0; i < 3; ++i) {
            int a = c[(i + 1) % 3], b = c[(i + 2) % 3];
            if (a > b) std::swap(a, b);
            const int e = edge_id.at({a, b});
            m.cell_edges_[k][i] = e;
            Facet &f = m.facets_[e];
            if (f.cell_lo < 0) {
                f.cell_lo = k;
            } else if (f.cell_hi < 0) {
                if (k < f.cell_lo) {
                    f.cell_hi = f.cell_lo;
                    f.cell_lo = k;
                } else {
                    f.cell_hi = k;
                }
            } else {
                throw MeshError("edge shared by more than two cells");
            }
        }
    }

    // Fix normals: out of cell_lo, toward cell_hi (or outward on the boundary).
    auto centroid = [&m](int k) {
        const auto v = m.cell_vertices(k);
        return (1.0 / 3.0) * (v[0] + v[1] + v[2]);
    };
    for (Facet &f : m.facets_) {
        const Vec2 pa = m.vertices_[f.a], pb = m.vertices_[f.b];
        const Vec2 t = pb - pa;
        f.length = norm(t);
        if (f.length <= 0.0) throw MeshError("degenerate edge");
        Vec2 n = perp(t);
        n *= 1.0 / norm(n);
        const Vec2 mid = 0.5 * (pa + pb);
        const Vec2 ref = f.on_boundary() ? mid - centroid(f.cell_lo)
                                         : centroid(f.cell_hi) - centroid(f.cell_lo);
        if (dot(n, ref) < 0.0) n = -n;
        f.normal = n;
    }

    // Edge signs: +1 where the fixed normal leaves the cell (cell_lo side).
    for (int k = 0; k < nc; ++k)
        for (int i = 0; i < 3; ++i)
            m.cell_edge_signs_[k][i] =
                m.facets_[m.cell_edges_[k][i]].cell_lo == k ? 1.0 : -1.0;

    // Boundary tags and the Euler relation for the simply connected square.
    int nb = 0;
    for (Facet &f : m.facets_) {
        if (!f.on_boundary()) continue;
        f.tag = classify_boundary_edge(m.vertices_[f.a], m.vertices_[f.b]);
        ++nb;
    }
    if (nb == 0) throw MeshError("mesh has no boundary facets");
    if (nv - ne + nc != 1)
        throw MeshError("Euler relation violated: V - E + C = " +
                        std::to_string(nv - ne + nc));

    m.vertex_tags_.assign(nv, BoundaryTag::Interior);
    for (const Facet &f : m.facets_) {
        if (!f.on_boundary()) continue;
        for (int v : {f.a, f.b}) {
            BoundaryTag &t = m.vertex_tags_[v];
            // Top/Bottom take precedence over Lateral at the corners.
            if (t == BoundaryTag::Interior || t == BoundaryTag::Lateral) t = f.tag;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (m.vertex_tags_[v] != BoundaryTag::Interior) m.boundary_vertices_.push_back(v);

    double hmax = 0.0;
    for (const Facet &f : m.facets_) hmax = std::max(hmax, f.length);
    m.h_ = hmax;
    return m;
}

Mesh unit_square_mesh(int n) {
    if (n < 1) throw MeshError("unit_square_mesh requires n >= 1");
    std::vector<Vec2> verts;
    verts.reserve(static_cast<size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::array<int, 3>> cells;
    cells.reserve(2 * static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            // Lower-left to upper-right diagonal, both children CCW.
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    return Mesh::from_data(std::move(verts), std::move(cells));
}

Mesh refine(const Mesh &mesh) {
    std::vector<Vec2> verts(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) verts[v] = mesh.vertex(v);

    // One midpoint vertex per parent edge.
    std::vector<int> midpoint(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Facet &f = mesh.facet(e);
        midpoint[e] = static_cast<int>(verts.size());
        verts.push_back(0.5 * (mesh.vertex(f.a) + mesh.vertex(f.b)));
    }

    std::vector<std::array<int, 3>> cells;
    cells.reserve(4 * static_cast<size_t>(mesh.num_cells()));
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto &c = mesh.cell(k);
        // m[i] is the midpoint of the edge opposite local vertex i.
        const int m0 = midpoint[mesh.cell_edge(k, 0)];
        const int m1 = midpoint[mesh.cell_edge(k, 1)];
        const int m2 = midpoint[mesh.cell_edge(k, 2)];
        cells.push_back({c[0], m2, m1});
        cells.push_back({m2, c[1], m0});
        cells.push_back({m1, m0, c[2]});
        cells.push_back({m0, m1, m2});
    }
    return Mesh::from_data(std::move(verts), std::move(cells));
}

void dump(const Mesh &mesh, std::ostream &os) {
    os << "vertices " << mesh.num_vertices() << " cells " << mesh.num_cells() << "\n";
    char buf[80];
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%.16g %.16g", mesh.vertex(v).x, mesh.vertex(v).y);
        os << buf << "\n";
    }
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto &c = mesh.cell(k);
        os << c[0] << " " << c[1] << " " << c[2] << "\n";
    }
}

}  // namespace porofem
