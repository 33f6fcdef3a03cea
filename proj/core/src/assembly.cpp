#include "cbfem/assembly.hpp"

#include <stdexcept>

namespace cbfem {

void BoundaryCoupling::accumulate(std::span<double> out, double left_value, double right_value,
                                  double scale) const {
    const int n = static_cast<int>(out.size());
    out[0] += scale * left[0] * left_value;
    out[n - 1] += scale * right[0] * right_value;
    if (n > 1) {
        out[1] += scale * left[1] * left_value;
        out[n - 2] += scale * right[1] * right_value;
    }
}

GlobalOperators assemble(const Mesh& mesh) {
    const ElementMatrices em = element_matrices(mesh);
    const int n = mesh.interior_count();
    if (n < 1) {
        throw std::invalid_argument("assemble: mesh has no interior unknowns");
    }

    GlobalOperators ops;
    ops.n = n;
    ops.bandwidth = mesh.order == ElementOrder::p1 ? 1 : 2;
    ops.h = mesh.h;
    ops.mass = BandedMatrix(n, ops.bandwidth);
    ops.stiffness = BandedMatrix(n, ops.bandwidth);
    ops.convection = BandedMatrix(n, ops.bandwidth);

    const int last = static_cast<int>(mesh.nodes.size()) - 1;
    auto scatter = [&](const std::array<std::array<double, 3>, 3>& e, BandedMatrix& global,
                       BoundaryCoupling& bc, int elem) {
        for (int i = 0; i < em.size; ++i) {
            const int gi = mesh.global_node(elem, i);
            if (gi == 0 || gi == last) {
                continue;  // only interior test functions generate equations
            }
            for (int j = 0; j < em.size; ++j) {
                const int gj = mesh.global_node(elem, j);
                if (gj == 0) {
                    bc.left[gi - 1] += e[i][j];
                } else if (gj == last) {
                    bc.right[n - gi] += e[i][j];
                } else {
                    global.at(gi - 1, gj - 1) += e[i][j];
                }
            }
        }
    };

    for (int elem = 0; elem < mesh.n_elements; ++elem) {
        scatter(em.mass, ops.mass, ops.mass_bc, elem);
        scatter(em.stiffness, ops.stiffness, ops.stiffness_bc, elem);
        scatter(em.convection, ops.convection, ops.convection_bc, elem);
    }
    return ops;
}

double fe_interpolate(const Mesh& mesh, std::span<const double> all_coeffs, double x) {
    if (static_cast<int>(all_coeffs.size()) != static_cast<int>(mesh.nodes.size())) {
        throw std::invalid_argument("fe_interpolate: coefficient count does not match the mesh");
    }
    const int e = mesh.element_of(x);
    const auto psi = basis_values(mesh, e, x);
    double value = 0.0;
    for (int local = 0; local < mesh.nodes_per_element(); ++local) {
        value += all_coeffs[mesh.global_node(e, local)] * psi[local];
    }
    return value;
}

}  // namespace cbfem
