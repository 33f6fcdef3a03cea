#include "cbfem/fdm.hpp"

#include <cmath>
#include <stdexcept>

namespace cbfem {

FdmGrid build_fdm_grid(double x_min, double x_max, int n_intervals) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || x_min >= x_max) {
        throw std::invalid_argument("build_fdm_grid: bounds must be finite with x_min < x_max");
    }
    if (n_intervals < 2) {
        throw std::invalid_argument("build_fdm_grid: at least 2 intervals are required");
    }
    FdmGrid grid;
    grid.x_min = x_min;
    grid.x_max = x_max;
    grid.n_intervals = n_intervals;
    grid.h = (x_max - x_min) / n_intervals;
    grid.nodes.resize(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        grid.nodes[i] = (x_min * (n_intervals - i) + x_max * i) / n_intervals;
    }
    return grid;
}

FdmOperators fdm_operators(const FdmGrid& grid, const MarketParams& market) {
    const int n = grid.n_intervals - 1;
    const double h = grid.h;
    const double eps = 0.5 * market.volatility * market.volatility;
    const double a = market.risk_free_rate - eps;

    FdmOperators ops;
    ops.h = h;
    ops.diffusion = BandedMatrix(n, 1);
    ops.convection = BandedMatrix(n, 1);
    const double d_off = eps / (h * h);
    const double c_off = a / (2.0 * h);
    for (int i = 0; i < n; ++i) {
        ops.diffusion.at(i, i) = -2.0 * d_off;
        if (i > 0) {
            ops.diffusion.at(i, i - 1) = d_off;
            ops.convection.at(i, i - 1) = -c_off;
        }
        if (i < n - 1) {
            ops.diffusion.at(i, i + 1) = d_off;
            ops.convection.at(i, i + 1) = c_off;
        }
    }
    ops.diffusion_bc.left[0] = d_off;
    ops.diffusion_bc.right[0] = d_off;
    ops.convection_bc.left[0] = -c_off;
    ops.convection_bc.right[0] = c_off;
    return ops;
}

namespace {

/// Wraps central differences in the Galerkin container with identity
/// mass, so that A11 = I + theta dtau (s2/2 K + (r - s2/2) N + r I)
/// reproduces the implicit second-order scheme. The stored K and N use
/// the same sign conventions as the assembled FEM operators: +eps K is
/// the negated second difference, +a N the negated first difference.
GlobalOperators collocation_operators(const FdmGrid& grid) {
    const int n = grid.n_intervals - 1;
    const double h = grid.h;
    const double k_off = -1.0 / (h * h);
    const double n_off = 1.0 / (2.0 * h);

    GlobalOperators ops;
    ops.n = n;
    ops.bandwidth = 1;
    ops.h = h;
    ops.mass = BandedMatrix::identity(n, 1);
    ops.stiffness = BandedMatrix(n, 1);
    ops.convection = BandedMatrix(n, 1);
    for (int i = 0; i < n; ++i) {
        ops.stiffness.at(i, i) = -2.0 * k_off;
        if (i > 0) {
            ops.stiffness.at(i, i - 1) = k_off;
            ops.convection.at(i, i - 1) = n_off;
        }
        if (i < n - 1) {
            ops.stiffness.at(i, i + 1) = k_off;
            ops.convection.at(i, i + 1) = -n_off;
        }
    }
    ops.stiffness_bc.left[0] = k_off;
    ops.stiffness_bc.right[0] = k_off;
    ops.convection_bc.left[0] = n_off;
    ops.convection_bc.right[0] = -n_off;
    // The identity mass has no boundary coupling.
    return ops;
}

}  // namespace

PriceSurface fdm_solve(const FdmGrid& grid, const BondContract& contract,
                       const MarketParams& market, double theta, int n_time_steps,
                       const NewtonConfig& cfg) {
    const GlobalOperators ops = collocation_operators(grid);
    return run_theta_scheme(ops, grid.nodes, std::nullopt, contract, market, theta, n_time_steps,
                            cfg);
}

}  // namespace cbfem
