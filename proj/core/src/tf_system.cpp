#include "cbfem/tf_system.hpp"

#include <cmath>
#include <stdexcept>

namespace cbfem {

namespace {

BandedMatrix spatial_operator(const GlobalOperators& ops, const MarketParams& market,
                              double reaction_rate) {
    const double half_sigma2 = 0.5 * market.volatility * market.volatility;
    const double drift = market.risk_free_rate - half_sigma2;
    BandedMatrix a(ops.n, ops.bandwidth);
    a.add_scaled(ops.stiffness, half_sigma2);
    a.add_scaled(ops.convection, drift);
    a.add_scaled(ops.mass, reaction_rate);
    return a;
}

BandedMatrix combine(const BandedMatrix& mass, const BandedMatrix& spatial, double weight) {
    BandedMatrix a = mass;
    a.add_scaled(spatial, weight);
    return a;
}

}  // namespace

ThetaSystem build_theta_system(const GlobalOperators& ops, const MarketParams& market, double theta,
                               double dtau) {
    if (!(dtau > 0.0) || theta < 0.0 || theta > 1.0) {
        throw std::invalid_argument("build_theta_system: need dtau > 0 and theta in [0, 1]");
    }
    const double r = market.risk_free_rate;
    const double rc = market.credit_spread;

    const BandedMatrix op_u = spatial_operator(ops, market, r);
    const BandedMatrix op_v = spatial_operator(ops, market, r + rc);

    ThetaSystem sys;
    sys.theta = theta;
    sys.dtau = dtau;
    sys.a11 = combine(ops.mass, op_u, theta * dtau);
    sys.a22 = combine(ops.mass, op_v, theta * dtau);
    sys.at11 = combine(ops.mass, op_u, -(1.0 - theta) * dtau);
    sys.at22 = combine(ops.mass, op_v, -(1.0 - theta) * dtau);

    sys.a12 = BandedMatrix(ops.n, ops.bandwidth);
    sys.a12.add_scaled(ops.mass, theta * dtau * rc);
    sys.at12 = BandedMatrix(ops.n, ops.bandwidth);
    sys.at12.add_scaled(ops.mass, -(1.0 - theta) * dtau * rc);
    return sys;
}

SolutionState initial_state(std::span<const double> x_nodes, const BondContract& contract,
                            const MarketParams& market) {
    const int total = static_cast<int>(x_nodes.size());
    SolutionState state;
    state.u.resize(total - 2);
    state.v.resize(total - 2);
    for (int i = 0; i < total; ++i) {
        const ValuePair payoff = terminal_payoff(contract, market, x_nodes[i]);
        if (i == 0) {
            state.u_left = payoff.cb;
            state.v_left = payoff.cocb;
        } else if (i == total - 1) {
            state.u_right = payoff.cb;
            state.v_right = payoff.cocb;
        } else {
            state.u[i - 1] = payoff.cb;
            state.v[i - 1] = payoff.cocb;
        }
    }
    return state;
}

PenaltyBounds penalty_bounds(std::span<const double> x_nodes, const BondContract& contract,
                             const MarketParams& market, double tau, AccrualRule rule) {
    PenaltyBounds bounds;
    bounds.lower.resize(x_nodes.size());
    bounds.upper.resize(x_nodes.size());
    const double t = contract.maturity - tau;
    const double put_price = dirty_put_price(contract, t, rule);
    const double call_price = dirty_call_price(contract, t, rule);
    for (size_t i = 0; i < x_nodes.size(); ++i) {
        const double conversion =
            contract.conversion_ratio * market.initial_stock_price * std::exp(x_nodes[i]);
        bounds.lower[i] = std::max(put_price, conversion);
        bounds.upper[i] = std::max(call_price, conversion);
    }
    return bounds;
}

PenaltyIndicators update_indicators(std::span<const double> u, std::span<const double> lower,
                                    std::span<const double> upper) {
    if (u.size() != lower.size() || u.size() != upper.size()) {
        throw std::invalid_argument("update_indicators: size mismatch");
    }
    PenaltyIndicators ind;
    ind.call.resize(u.size());
    ind.put.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        ind.call[i] = u[i] - upper[i] >= 0.0 ? 1 : 0;
        ind.put[i] = lower[i] - u[i] >= 0.0 ? 1 : 0;
    }
    return ind;
}

double apply_v_constraints_at(double v, double u_ref, double x, const BondContract& contract,
                              const MarketParams& market, double tau, AccrualRule rule) {
    const double t = contract.maturity - tau;
    const double conversion = contract.conversion_ratio * market.initial_stock_price * std::exp(x);
    if (u_ref <= conversion) {
        v = 0.0;
    }
    if (contract.clean_call_price && contract.call_window.contains(t)) {
        if (u_ref >= dirty_call_price(contract, t, rule)) {
            v = 0.0;
        }
    }
    if (contract.clean_put_price && contract.put_window.contains(t)) {
        const double put_price = dirty_put_price(contract, t, rule);
        if (u_ref <= put_price) {
            v = put_price;
        }
    }
    return v;
}

void apply_v_constraints(SolutionState& state, std::span<const double> u_ref_all,
                         std::span<const double> x_nodes, const BondContract& contract,
                         const MarketParams& market, double tau, AccrualRule rule) {
    const int total = static_cast<int>(x_nodes.size());
    if (static_cast<int>(u_ref_all.size()) != total) {
        throw std::invalid_argument("apply_v_constraints: size mismatch");
    }
    state.v_left =
        apply_v_constraints_at(state.v_left, u_ref_all[0], x_nodes[0], contract, market, tau, rule);
    for (int i = 1; i < total - 1; ++i) {
        state.v[i - 1] = apply_v_constraints_at(state.v[i - 1], u_ref_all[i], x_nodes[i], contract,
                                                market, tau, rule);
    }
    state.v_right = apply_v_constraints_at(state.v_right, u_ref_all[total - 1], x_nodes[total - 1],
                                           contract, market, tau, rule);
}

bool is_coupon_level(const BondContract& contract, double tau, double tol) {
    for (double t_coupon : contract.coupon_times) {
        if (std::abs(contract.maturity - t_coupon - tau) <= tol) {
            return true;
        }
    }
    return false;
}

void coupon_bump(SolutionState& state, const BondContract& contract, double tau_new) {
    if (!is_coupon_level(contract, tau_new)) {
        return;
    }
    const double k = contract.coupon_amount;
    for (auto& x : state.u) {
        x += k;
    }
    for (auto& x : state.v) {
        x += k;
    }
    state.u_left += k;
    state.v_left += k;
    state.u_right += k;
    state.v_right += k;
}

}  // namespace cbfem
