#include "cbfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbfem {

int Mesh::element_of(double x) const {
    if (x < x_min || x > x_max) {
        throw std::domain_error("Mesh::element_of: x outside the domain");
    }
    const int e = static_cast<int>(std::floor((x - x_min) / h));
    return std::clamp(e, 0, n_elements - 1);
}

Mesh build_mesh(double x_min, double x_max, int n_elements, ElementOrder order) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || x_min >= x_max) {
        throw std::invalid_argument("build_mesh: domain bounds must be finite with x_min < x_max");
    }
    if (n_elements < 2) {
        throw std::invalid_argument("build_mesh: at least 2 elements are required");
    }
    Mesh mesh;
    mesh.x_min = x_min;
    mesh.x_max = x_max;
    mesh.n_elements = n_elements;
    mesh.order = order;
    mesh.h = (x_max - x_min) / n_elements;

    // Affine-combination node formula keeps endpoints (and any node whose
    // weights cancel, such as x = 0 on [-6, 2]) exact in floating point.
    const int subdivisions = order == ElementOrder::p1 ? n_elements : 2 * n_elements;
    mesh.nodes.resize(subdivisions + 1);
    for (int i = 0; i <= subdivisions; ++i) {
        mesh.nodes[i] = (x_min * (subdivisions - i) + x_max * i) / subdivisions;
    }
    return mesh;
}

ElementMatrices p1_element_matrices(double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("p1_element_matrices: h must be positive");
    }
    ElementMatrices e;
    e.size = 2;
    e.mass = {{{2 * h / 6, h / 6, 0}, {h / 6, 2 * h / 6, 0}, {0, 0, 0}}};
    e.stiffness = {{{1 / h, -1 / h, 0}, {-1 / h, 1 / h, 0}, {0, 0, 0}}};
    e.convection = {{{-0.5, -0.5, 0}, {0.5, 0.5, 0}, {0, 0, 0}}};
    return e;
}

ElementMatrices p2_element_matrices(double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("p2_element_matrices: h must be positive");
    }
    ElementMatrices e;
    e.size = 3;
    const double m = h / 30.0;
    e.mass = {{{4 * m, 2 * m, -m}, {2 * m, 16 * m, 2 * m}, {-m, 2 * m, 4 * m}}};
    const double s = 1.0 / (3.0 * h);
    e.stiffness = {{{7 * s, -8 * s, s}, {-8 * s, 16 * s, -8 * s}, {s, -8 * s, 7 * s}}};
    e.convection = {{{-3.0 / 6, -4.0 / 6, 1.0 / 6}, {4.0 / 6, 0.0, -4.0 / 6}, {-1.0 / 6, 4.0 / 6, 3.0 / 6}}};
    return e;
}

ElementMatrices element_matrices(const Mesh& mesh) {
    return mesh.order == ElementOrder::p1 ? p1_element_matrices(mesh.h) : p2_element_matrices(mesh.h);
}

std::array<double, 3> basis_values(const Mesh& mesh, int e, double x) {
    const double xl = mesh.x_min + e * mesh.h;
    const double xr = xl + mesh.h;
    const double h = mesh.h;
    if (mesh.order == ElementOrder::p1) {
        return {(xr - x) / h, (x - xl) / h, 0.0};
    }
    const double xm = xl + 0.5 * h;
    const double h2 = h * h;
    return {2 * (x - xm) * (x - xr) / h2, -4 * (x - xl) * (x - xr) / h2, 2 * (x - xl) * (x - xm) / h2};
}

}  // namespace cbfem
