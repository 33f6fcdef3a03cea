#pragma once

#include <vector>

#include "cbfem/assembly.hpp"
#include "cbfem/contracts.hpp"
#include "cbfem/stepper.hpp"

namespace cbfem {

/// Uniform finite-difference grid over [x_min, x_max].
struct FdmGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_intervals = 0;
    double h = 0.0;
    std::vector<double> nodes;
};

FdmGrid build_fdm_grid(double x_min, double x_max, int n_intervals);

/// Second-order central-difference operators on interior rows.
/// diffusion applies sigma^2/2 d^2/dx^2, convection (r - sigma^2/2) d/dx;
/// interior rows of both sum to zero.
struct FdmOperators {
    double h = 0.0;
    BandedMatrix diffusion, convection;
    BoundaryCoupling diffusion_bc, convection_bc;
};

FdmOperators fdm_operators(const FdmGrid& grid, const MarketParams& market);

/// Collocation form of the theta-scheme engine: identity mass, difference
/// operators in place of the Galerkin ones. Boundary handling, penalty,
/// Newton, constraints and coupons are shared with the FEM path.
PriceSurface fdm_solve(const FdmGrid& grid, const BondContract& contract,
                       const MarketParams& market, double theta, int n_time_steps,
                       const NewtonConfig& cfg = {});

}  // namespace cbfem
