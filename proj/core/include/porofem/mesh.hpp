#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "porofem/tensor.hpp"

namespace porofem {

enum class BoundaryTag { Interior, Top, Bottom, Lateral };

// One mesh edge with its adjacency record.  Vertices are stored sorted
// (a < b).  The unit normal is fixed at construction: for interior edges it
// points from the lower-indexed owning cell into the higher-indexed one, for
// boundary edges it points out of the single owning cell.
struct Facet {
    int a = -1, b = -1;      // sorted vertex indices
    int cell_lo = -1;        // owning cell the normal points out of
    int cell_hi = -1;        // second owner, -1 on the boundary
    Vec2 normal{};           // unit normal, fixed orientation
    double length = 0.0;
    BoundaryTag tag = BoundaryTag::Interior;

    bool on_boundary() const { return cell_hi < 0; }
};

// Immutable 2D simplicial triangulation of the unit square.  Cells are
// positively oriented vertex triples; edges are numbered lexicographically by
// their sorted vertex pair so flux DOF ordering is stable across runs.
class Mesh {
  public:
    // Builds the full facet/adjacency structure and validates the invariants
    // (positive cell areas, edge ownership counts, Euler relation, boundary
    // tag coverage).  Throws MeshError on violation.
    static Mesh from_data(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(facets_.size()); }

    const Vec2 &vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3> &cell(int k) const { return cells_[k]; }
    const Facet &facet(int e) const { return facets_[e]; }
    const std::vector<Facet> &facets() const { return facets_; }

    double cell_area(int k) const { return areas_[k]; }
    std::array<Vec2, 3> cell_vertices(int k) const {
        const auto &c = cells_[k];
        return {vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]};
    }

    // Global edge index of the local edge opposite local vertex i.
    int cell_edge(int k, int i) const { return cell_edges_[k][i]; }
    // +1 when the global edge normal points out of cell k, -1 otherwise.
    double cell_edge_sign(int k, int i) const { return cell_edge_signs_[k][i]; }

    // Vertices lying on the boundary (sorted, unique).
    const std::vector<int> &boundary_vertices() const { return boundary_vertices_; }
    // Tag of a boundary vertex: Top wins over Lateral at the top corners,
    // Bottom wins at the bottom corners.
    BoundaryTag vertex_tag(int v) const { return vertex_tags_[v]; }

    double mesh_size() const { return h_; }

  private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<Facet> facets_;
    std::vector<double> areas_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<std::array<double, 3>> cell_edge_signs_;
    std::vector<int> boundary_vertices_;
    std::vector<BoundaryTag> vertex_tags_;
    double h_ = 0.0;
};

// Structured n x n grid of squares, each split by the lower-left to
// upper-right diagonal; h = 1/n.  Boundary facets tagged by location
// (y=1 Top, y=0 Bottom, x in {0,1} Lateral).  Rejects n = 0.
Mesh unit_square_mesh(int n);

// Uniform red refinement: every triangle splits into 4 congruent children,
// h halves, boundary tags are inherited from the parent edges.
Mesh refine(const Mesh &mesh);

// Plain-text dump: "vertices <n> cells <m>" header, vertex coordinate lines,
// then cell index triples.
void dump(const Mesh &mesh, std::ostream &os);

}  // namespace porofem
