#include "porofem/femspace.hpp"

#include <cmath>

#include "porofem/errors.hpp"

namespace porofem {

QuadratureRule quadrature(int order) {
    if (order < 1 || order > 4) throw FemError("unsupported quadrature order " + std::to_string(order));
    QuadratureRule r;
    r.order = order;
    if (order == 1) {
        r.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
        r.weights = {0.5};
        return r;
    }
    if (order == 2) {
        r.points = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
        r.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return r;
    }
    // Six-point degree-4 rule (positive weights), served for orders 3 and 4.
    const double a1 = 0.816847572980459, b1 = 0.091576213509771, w1 = 0.109951743655322;
    const double a2 = 0.108103018168070, b2 = 0.445948490915965, w2 = 0.223381589678011;
    r.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    r.weights = {0.5 * w1, 0.5 * w1, 0.5 * w1, 0.5 * w2, 0.5 * w2, 0.5 * w2};
    return r;
}

P1Basis eval_p1_basis(const std::array<Vec2, 3> &verts) {
    const double area = 0.5 * cross(verts[1] - verts[0], verts[2] - verts[0]);
    if (area <= 0.0) throw FemError("degenerate cell in eval_p1_basis");
    P1Basis b;
    b.area = area;
    for (int i = 0; i < 3; ++i) {
        // grad of the hat at vertex i is normal to the opposite edge.
        const Vec2 e = verts[(i + 2) % 3] - verts[(i + 1) % 3];
        b.grad[i] = (1.0 / (2.0 * area)) * perp(e);
    }
    return b;
}

RT0Basis eval_rt0_basis(const std::array<Vec2, 3> &verts, const std::array<double, 3> &edge_signs) {
    const double area = 0.5 * cross(verts[1] - verts[0], verts[2] - verts[0]);
    if (area <= 0.0) throw FemError("degenerate cell in eval_rt0_basis");
    RT0Basis b;
    b.area = area;
    for (int i = 0; i < 3; ++i) {
        b.opposite[i] = verts[i];
        b.coeff[i] = edge_signs[i] / (2.0 * area);
        b.div[i] = edge_signs[i] / area;
    }
    return b;
}

SpaceTriple::SpaceTriple(const Mesh &mesh) : mesh_(&mesh) {
    p1_.reserve(mesh.num_cells());
    rt0_.reserve(mesh.num_cells());
    for (int k = 0; k < mesh.num_cells(); ++k) {
        const auto v = mesh.cell_vertices(k);
        p1_.push_back(eval_p1_basis(v));
        rt0_.push_back(eval_rt0_basis(
            v, {mesh.cell_edge_sign(k, 0), mesh.cell_edge_sign(k, 1), mesh.cell_edge_sign(k, 2)}));
    }
}

}  // namespace porofem
