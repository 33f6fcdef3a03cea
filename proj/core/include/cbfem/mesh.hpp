#pragma once

#include <array>
#include <vector>

namespace cbfem {

enum class ElementOrder { p1, p2 };

/// Uniform 1-D mesh in log-moneyness x. P2 meshes carry element midpoints
/// in the node list, so nodes.size() is n_elements + 1 (P1) or
/// 2 * n_elements + 1 (P2).
struct Mesh {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_elements = 0;
    ElementOrder order = ElementOrder::p1;
    double h = 0.0;  // element width
    std::vector<double> nodes;

    int interior_count() const { return static_cast<int>(nodes.size()) - 2; }
    int nodes_per_element() const { return order == ElementOrder::p1 ? 2 : 3; }

    /// Global node index of local node `local` in element `e` (0-based).
    int global_node(int e, int local) const {
        return order == ElementOrder::p1 ? e + local : 2 * e + local;
    }

    /// Element containing x (clamped to the valid range at the endpoints).
    int element_of(double x) const;
};

Mesh build_mesh(double x_min, double x_max, int n_elements, ElementOrder order);

/// Closed-form element matrices on an element of width h.
///
/// mass(i,j)       = integral of psi_i psi_j
/// stiffness(i,j)  = integral of psi_i' psi_j'   (positive semidefinite)
/// convection(i,j) = integral of psi_i' psi_j    (derivative on the test row)
struct ElementMatrices {
    int size = 0;  // 2 for P1, 3 for P2
    std::array<std::array<double, 3>, 3> mass{};
    std::array<std::array<double, 3>, 3> stiffness{};
    std::array<std::array<double, 3>, 3> convection{};
};

ElementMatrices p1_element_matrices(double h);
ElementMatrices p2_element_matrices(double h);
ElementMatrices element_matrices(const Mesh& mesh);

/// Values of the local basis functions at x inside element e.
std::array<double, 3> basis_values(const Mesh& mesh, int e, double x);

}  // namespace cbfem
