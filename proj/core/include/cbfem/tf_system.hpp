#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbfem/assembly.hpp"
#include "cbfem/contracts.hpp"

namespace cbfem {

/// Theta-scheme matrices for the coupled bond / cash-only system.
///
///   A11  = M + theta dtau (s2/2 K + (r - s2/2) N + r M)
///   A12  = theta dtau r_c M
///   A22  = A11 with the reaction coefficient r replaced by r + r_c
///   At*  = same with -(1 - theta) dtau in place of theta dtau
struct ThetaSystem {
    double theta = 0.5;
    double dtau = 0.0;
    BandedMatrix a11, a12, a22;
    BandedMatrix at11, at12, at22;
};

ThetaSystem build_theta_system(const GlobalOperators& ops, const MarketParams& market, double theta,
                               double dtau);

/// Solution at one backward-time level: interior coefficients plus the
/// boundary scalars at x_min (left) and x_max (right).
struct SolutionState {
    int level = 0;
    double tau = 0.0;
    std::vector<double> u, v;
    double u_left = 0.0, v_left = 0.0;
    double u_right = 0.0, v_right = 0.0;
};

/// Nodal interpolation of the terminal payoff; level 0, tau 0.
SolutionState initial_state(std::span<const double> x_nodes, const BondContract& contract,
                            const MarketParams& market);

/// Price bounds per node (boundary nodes included): lower = u*_put,
/// upper = u*_call at backward time tau.
struct PenaltyBounds {
    std::vector<double> lower, upper;
};

PenaltyBounds penalty_bounds(std::span<const double> x_nodes, const BondContract& contract,
                             const MarketParams& market, double tau,
                             AccrualRule rule = AccrualRule::bracket_right);

/// 0/1 active flags: call[i] = 1 iff u[i] >= upper[i],
/// put[i] = 1 iff u[i] <= lower[i].
struct PenaltyIndicators {
    std::vector<std::uint8_t> call, put;
};

PenaltyIndicators update_indicators(std::span<const double> u, std::span<const double> lower,
                                    std::span<const double> upper);

/// Cash-only value update when conversion/call/put binds, judged on the
/// reference bond value. Applied in the order conversion, call, put, so a
/// binding put (which assigns the nonzero dirty put price) wins.
double apply_v_constraints_at(double v, double u_ref, double x, const BondContract& contract,
                              const MarketParams& market, double tau,
                              AccrualRule rule = AccrualRule::bracket_right);

/// Nodewise application over interior values and both boundary scalars.
/// u_ref spans all nodes: [u_left, interior..., u_right].
void apply_v_constraints(SolutionState& state, std::span<const double> u_ref_all,
                         std::span<const double> x_nodes, const BondContract& contract,
                         const MarketParams& market, double tau,
                         AccrualRule rule = AccrualRule::bracket_right);

/// True when backward time tau coincides with a coupon payment level
/// (tau = maturity - t_i for some coupon date t_i).
bool is_coupon_level(const BondContract& contract, double tau, double tol = 1e-9);

/// Adds the coupon to every value (interior and boundary) when tau_new is
/// a coupon level; identity otherwise.
void coupon_bump(SolutionState& state, const BondContract& contract, double tau_new);

}  // namespace cbfem
