#pragma once

#include <array>
#include <span>
#include <vector>

#include "cbfem/banded.hpp"
#include "cbfem/mesh.hpp"

namespace cbfem {

/// Coupling of interior rows to the two boundary values.
///
/// left[r] multiplies the value at x_min and adds into interior row r;
/// right[r] multiplies the value at x_max and adds into row n-1-r.
/// At most two rows per end are touched (one for P1/FDM, two for P2).
struct BoundaryCoupling {
    std::array<double, 2> left{0.0, 0.0};
    std::array<double, 2> right{0.0, 0.0};

    /// out += scale * (coupling applied to boundary values）
    void accumulate(std::span<double> out, double left_value, double right_value, double scale) const;
};

/// Assembled operators over interior unknowns, plus the folded boundary
/// columns. The stiffness here is the positive form (integral of
/// psi' psi'); the sign needed by the evolution equations is applied at
/// the time-stepping layer.
struct GlobalOperators {
    int n = 0;          // interior unknowns
    int bandwidth = 0;  // 1 for P1/FDM, 2 for P2
    double h = 0.0;
    BandedMatrix mass, stiffness, convection;
    BoundaryCoupling mass_bc, stiffness_bc, convection_bc;
};

GlobalOperators assemble(const Mesh& mesh);

/// Point evaluation of the FE function with coefficients over all nodes
/// (boundaries included). Exact at nodes by the nodal-basis property.
double fe_interpolate(const Mesh& mesh, std::span<const double> all_coeffs, double x);

}  // namespace cbfem
