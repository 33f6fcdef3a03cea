#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cbfem/contracts.hpp"
#include "cbfem/mesh.hpp"

namespace cbfem {

struct GreekPoint {
    double s = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
};

/// Delta at the midpoint of element j (1-based), from the piecewise-linear
/// derivative: Delta(S_{j-1/2}) = S_int (u_j - u_{j-1}) / (h S_{j-1/2}).
GreekPoint delta_p1(const Mesh& mesh, std::span<const double> all_coeffs,
                    const MarketParams& market, int j);

/// Gamma at node j-1 by second differencing nodal values, 2 <= j <= n_E:
/// Gamma(S_{j-1}) = S_int^2 (u_j - 2 u_{j-1} + u_{j-2}) / (h^2 S^2).
GreekPoint gamma_p1(const Mesh& mesh, std::span<const double> all_coeffs,
                    const MarketParams& market, int j);

/// Delta and Gamma at the midpoint of element j from the quadratic FE
/// function: Delta = S_int (u_j - u_{j-1}) / (h S),
/// Gamma = 4 S_int^2 (u_j - 2 u_{j-1/2} + u_{j-1}) / (h^2 S^2).
GreekPoint delta_gamma_p2(const Mesh& mesh, std::span<const double> all_coeffs,
                          const MarketParams& market, int j);

/// L2 norm over the mesh of (FE interpolant - exact), by 3-point Gauss
/// quadrature per element.
double error_l2(const Mesh& mesh, std::span<const double> all_coeffs,
                const std::function<double(double)>& exact);

/// max over time levels of the per-level L2 errors.
double error_linf_l2(std::span<const double> per_level_l2);

/// Least-squares slope of log(error) against log(step).
double convergence_order(std::span<const double> errors, std::span<const double> steps);

}  // namespace cbfem
