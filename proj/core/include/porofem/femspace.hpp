#pragma once

#include <array>
#include <vector>

#include "porofem/mesh.hpp"
#include "porofem/tensor.hpp"

namespace porofem {

// Quadrature rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1},
// stored in barycentric coordinates; positive weights summing to 1/2.
struct QuadratureRule {
    int order = 0;  // exact for polynomials up to this degree
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

// Rules exact to at least the requested order, 1 <= order <= 4.  All weights
// are positive (the order-3 request returns the positive 6-point degree-4
// rule rather than the negative-weight 4-point one).
QuadratureRule quadrature(int order);

// P1 hat functions on one cell: values come from barycentric coordinates,
// gradients are constant.
struct P1Basis {
    std::array<Vec2, 3> grad;
    double area = 0.0;

    static double value(int i, const std::array<double, 3> &bary) { return bary[i]; }
};

// Throws FemError for degenerate (non-positive area) cells.
P1Basis eval_p1_basis(const std::array<Vec2, 3> &verts);

// Lowest-order Raviart-Thomas basis on one cell.  The DOF is the integral of
// the normal component over the edge with respect to the mesh's fixed global
// edge normal; basis field i is tied to the edge opposite local vertex i.
struct RT0Basis {
    std::array<Vec2, 3> opposite;   // vertex opposite each edge
    std::array<double, 3> coeff;    // sign / (2 |K|)
    std::array<double, 3> div;      // constant divergence, sign / |K|
    double area = 0.0;

    Vec2 value(int i, const Vec2 &x) const { return coeff[i] * (x - opposite[i]); }
};

RT0Basis eval_rt0_basis(const std::array<Vec2, 3> &verts, const std::array<double, 3> &edge_signs);

// Degree-of-freedom maps for the three-field discretization:
// continuous P1 vector displacement, RT0 flux, P0 pressure.
class SpaceTriple {
  public:
    explicit SpaceTriple(const Mesh &mesh);

    const Mesh &mesh() const { return *mesh_; }

    int ndof_u() const { return 2 * mesh_->num_vertices(); }
    int ndof_q() const { return mesh_->num_edges(); }
    int ndof_p() const { return mesh_->num_cells(); }

    // Displacement DOF of vertex v, component c (0 = x, 1 = y).
    static int u_dof(int v, int c) { return 2 * v + c; }

    const P1Basis &p1(int cell) const { return p1_[cell]; }
    const RT0Basis &rt0(int cell) const { return rt0_[cell]; }

    // Physical coordinates of a barycentric point in a cell.
    Vec2 point(int cell, const std::array<double, 3> &bary) const {
        const auto v = mesh_->cell_vertices(cell);
        return bary[0] * v[0] + bary[1] * v[1] + bary[2] * v[2];
    }

  private:
    const Mesh *mesh_;
    std::vector<P1Basis> p1_;
    std::vector<RT0Basis> rt0_;
};

// Interpolation helpers (also used by the error measurement and tests).

// Vertex interpolation of a vector field into P1; fn(x) -> Vec2.
template <class F>
std::vector<double> interpolate_p1(const Mesh &mesh, F &&fn) {
    std::vector<double> u(2 * static_cast<size_t>(mesh.num_vertices()));
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 val = fn(mesh.vertex(v));
        u[2 * v] = val.x;
        u[2 * v + 1] = val.y;
    }
    return u;
}

// Edge-flux interpolation into RT0: dof = integral of fn . n over the edge
// (two-point Gauss, exact for cubic normal components).
template <class F>
std::vector<double> interpolate_rt0(const Mesh &mesh, F &&fn) {
    std::vector<double> q(mesh.num_edges());
    const double s = 1.0 / (2.0 * std::sqrt(3.0));
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Facet &f = mesh.facet(e);
        const Vec2 pa = mesh.vertex(f.a), pb = mesh.vertex(f.b);
        const Vec2 mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        const Vec2 g1 = mid - 2.0 * s * half, g2 = mid + 2.0 * s * half;
        q[e] = 0.5 * f.length * (dot(fn(g1), f.normal) + dot(fn(g2), f.normal));
    }
    return q;
}

// Cell-average interpolation into P0 using the given quadrature rule.
template <class F>
std::vector<double> interpolate_p0(const SpaceTriple &space, const QuadratureRule &rule, F &&fn) {
    const Mesh &mesh = space.mesh();
    std::vector<double> p(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        double s = 0.0;
        for (int qp = 0; qp < rule.size(); ++qp)
            s += rule.weights[qp] * fn(space.point(k, rule.points[qp]));
        p[k] = 2.0 * s;  // reference weights sum to 1/2
    }
    return p;
}

}  // namespace porofem
