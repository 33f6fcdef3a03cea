#include "cbfem/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "cbfem/errors.hpp"

namespace cbfem {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

/// Active-set weighted constraint gap entering the penalty term:
/// alpha_call (u - upper) - alpha_put (lower - u). Zero when u sits
/// strictly between its bounds.
double penalty_gap(double u, double lower, double upper) {
    double q = 0.0;
    if (u - upper >= 0.0) {
        q += u - upper;
    }
    if (lower - u >= 0.0) {
        q -= lower - u;
    }
    return q;
}

}  // namespace

double PriceSurface::price_at(double t, double s_price) const {
    const double tau = maturity - t;
    if (taus.empty()) {
        throw std::domain_error("PriceSurface::price_at: empty surface");
    }
    const double dtau = taus.size() > 1 ? taus[1] - taus[0] : 1.0;
    const int row = std::clamp(static_cast<int>(std::llround(tau / dtau)), 0,
                               static_cast<int>(taus.size()) - 1);
    const double xq = std::log(s_price / initial_stock_price);
    // Exact node hit first (the standard probes are nodes by construction).
    const double span = x.back() - x.front();
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - xq) <= 1e-12 * span) {
            return u[row][i];
        }
    }
    if (fem_mesh) {
        return fe_interpolate(*fem_mesh, u[row], xq);
    }
    if (xq < x.front() || xq > x.back()) {
        throw std::domain_error("PriceSurface::price_at: stock price outside the grid");
    }
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const size_t j = std::min(x.size() - 1, static_cast<size_t>(it - x.begin()));
    const double w = (xq - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * u[row][j - 1] + w * u[row][j];
}

ScalarRoot newton_scalar(const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime, double x0,
                         const NewtonConfig& cfg) {
    double x = x0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        const double fx = f(x);
        if (std::abs(fx) <= cfg.tol) {
            return {x, k - 1};
        }
        const double dfx = fprime(x);
        if (dfx == 0.0 || !std::isfinite(dfx)) {
            throw SolverError("newton_scalar: vanishing derivative at iteration " + std::to_string(k));
        }
        const double step = fx / dfx;
        x -= step;
        if (std::abs(step) <= cfg.tol) {
            return {x, k};
        }
    }
    throw SolverError("newton_scalar: no convergence within " + std::to_string(cfg.max_iter) +
                      " iterations");
}

ThetaStepper::ThetaStepper(const GlobalOperators& ops, std::span<const double> x_nodes,
                           BondContract contract, MarketParams market, double theta,
                           int n_time_steps, NewtonConfig cfg)
    : ops_(ops), x_(x_nodes.begin(), x_nodes.end()), contract_(std::move(contract)),
      market_(market), cfg_(cfg), theta_(theta), dtau_(contract_.maturity / n_time_steps),
      n_steps_(n_time_steps), sys_(build_theta_system(ops, market, theta, dtau_)),
      lu_a11_(sys_.a11), lu_a22_(sys_.a22) {
    contract_.validate();
    market_.validate();
    if (n_time_steps < 1) {
        throw ConfigError({"n_time_steps must be at least 1"});
    }
    if (static_cast<int>(x_.size()) != ops_.n + 2) {
        throw std::invalid_argument("ThetaStepper: node count does not match the operators");
    }
    // Coupon payments are applied at exact grid levels, so every coupon
    // date must land on the time grid.
    for (double t_coupon : contract_.coupon_times) {
        const double tau = contract_.maturity - t_coupon;
        const double steps = tau / dtau_;
        if (std::abs(steps - std::llround(steps)) > 1e-9) {
            throw ConfigError({"coupon date " + std::to_string(t_coupon) +
                               " does not align with the time grid; choose n_time_steps as a "
                               "multiple of the coupon frequency"});
        }
    }
    if (theta_ < 0.5) {
        const double eps = 0.5 * market_.volatility * market_.volatility;
        const double a = market_.risk_free_rate - eps;
        const double h = ops_.h;
        double limit = h * h / (2.0 * eps);
        if (a != 0.0) {
            limit = std::min(limit, h / std::abs(a));
        }
        if (dtau_ > limit) {
            std::fprintf(stderr,
                         "cbfem: warning: dtau=%g exceeds the explicit-scheme stability bound %g "
                         "for theta=%g\n",
                         dtau_, limit, theta_);
            stats_.stability_warning = true;
        }
    }
}

SolutionState ThetaStepper::initial() const {
    return initial_state(x_, contract_, market_);
}

void ThetaStepper::accumulate_u_boundary(std::span<double> rhs, double ul, double ur, double vl,
                                         double vr, double scale) const {
    const double half_sigma2 = 0.5 * market_.volatility * market_.volatility;
    const double drift = market_.risk_free_rate - half_sigma2;
    ops_.stiffness_bc.accumulate(rhs, ul, ur, scale * half_sigma2);
    ops_.convection_bc.accumulate(rhs, ul, ur, scale * drift);
    ops_.mass_bc.accumulate(rhs, ul, ur, scale * market_.risk_free_rate);
    ops_.mass_bc.accumulate(rhs, vl, vr, scale * market_.credit_spread);
}

void ThetaStepper::accumulate_v_boundary(std::span<double> rhs, double vl, double vr,
                                         double scale) const {
    const double half_sigma2 = 0.5 * market_.volatility * market_.volatility;
    const double drift = market_.risk_free_rate - half_sigma2;
    ops_.stiffness_bc.accumulate(rhs, vl, vr, scale * half_sigma2);
    ops_.convection_bc.accumulate(rhs, vl, vr, scale * drift);
    ops_.mass_bc.accumulate(rhs, vl, vr,
                            scale * (market_.risk_free_rate + market_.credit_spread));
}

BoundaryStepResult ThetaStepper::boundary_step(const SolutionState& state) const {
    const double tau_new = state.tau + dtau_;
    const double r = market_.risk_free_rate;
    const double rc = market_.credit_spread;
    const double x_min = x_.front();
    const PriceBounds bounds =
        constraint_bounds(contract_, market_, x_min, tau_new, AccrualRule::reset_at_coupon);

    BoundaryStepResult out;
    out.v_left = (1.0 - (1.0 - theta_) * dtau_ * (r + rc)) / (1.0 + theta_ * dtau_ * (r + rc)) *
                 state.v_left;

    auto phi = [&](double v_new) {
        return state.u_left - (1.0 - theta_) * dtau_ * (r * state.u_left + rc * state.v_left) -
               theta_ * dtau_ * rc * v_new;
    };
    const double u_unconstrained = phi(out.v_left) / (1.0 + theta_ * dtau_ * r);
    out.v_left = apply_v_constraints_at(out.v_left, u_unconstrained, x_min, contract_, market_,
                                        tau_new, AccrualRule::reset_at_coupon);

    const double phi0 = phi(out.v_left);
    const double rho_dt = cfg_.rho * dtau_;
    auto f = [&](double u) {
        return (1.0 + theta_ * dtau_ * r) * u + rho_dt * penalty_gap(u, bounds.lower, bounds.upper) -
               phi0;
    };
    auto fp = [&](double u) {
        double d = 1.0 + theta_ * dtau_ * r;
        if (u - bounds.upper >= 0.0) {
            d += rho_dt;
        }
        if (bounds.lower - u >= 0.0) {
            d += rho_dt;
        }
        return d;
    };
    const ScalarRoot root = newton_scalar(f, fp, u_unconstrained, cfg_);
    out.u_left = root.x;
    out.newton_iterations = root.iterations;
    out.call_violation = std::max(0.0, out.u_left - bounds.upper);
    out.put_violation = std::max(0.0, bounds.lower - out.u_left);
    out.penalty_residual = penalty_gap(out.u_left, bounds.lower, bounds.upper);

    out.v_left = apply_v_constraints_at(out.v_left, out.u_left, x_min, contract_, market_, tau_new,
                                        AccrualRule::reset_at_coupon);
    if (is_coupon_level(contract_, tau_new)) {
        out.u_left += contract_.coupon_amount;
        out.v_left += contract_.coupon_amount;
    }
    return out;
}

InteriorStepResult ThetaStepper::interior_step(const SolutionState& state,
                                               const BoundaryValues& boundary,
                                               double tau_new) const {
    const int n = ops_.n;
    const double rho_dt = cfg_.rho * dtau_;
    const PenaltyBounds bounds =
        penalty_bounds(x_, contract_, market_, tau_new, AccrualRule::reset_at_coupon);
    const std::span<const double> lower(bounds.lower.data() + 1, n);
    const std::span<const double> upper(bounds.upper.data() + 1, n);

    InteriorStepResult out;

    // Cash-only equation first; it does not see the penalty.
    std::vector<double> rhs_v = sys_.at22.multiply(state.v);
    accumulate_v_boundary(rhs_v, boundary.v_left, boundary.v_right, -theta_ * dtau_);
    accumulate_v_boundary(rhs_v, state.v_left, state.v_right, -(1.0 - theta_) * dtau_);
    ops_.mass_bc.accumulate(rhs_v, state.v_left, state.v_right, 1.0);
    ops_.mass_bc.accumulate(rhs_v, boundary.v_left, boundary.v_right, -1.0);
    out.v = lu_a22_.solve(rhs_v);

    // Known part of the bond equation right-hand side.
    std::vector<double> phi = sys_.at11.multiply(state.u);
    {
        const std::vector<double> coupling = sys_.at12.multiply(state.v);
        for (int i = 0; i < n; ++i) {
            phi[i] += coupling[i];
        }
    }
    accumulate_u_boundary(phi, boundary.u_left, boundary.u_right, boundary.v_left,
                          boundary.v_right, -theta_ * dtau_);
    accumulate_u_boundary(phi, state.u_left, state.u_right, state.v_left, state.v_right,
                          -(1.0 - theta_) * dtau_);
    ops_.mass_bc.accumulate(phi, state.u_left, state.u_right, 1.0);
    ops_.mass_bc.accumulate(phi, boundary.u_left, boundary.u_right, -1.0);
    // Boundary legs of the penalty term, known from the boundary solves.
    ops_.mass_bc.accumulate(phi, boundary.penalty_residual_left, boundary.penalty_residual_right,
                            -rho_dt);

    auto bond_rhs = [&](std::span<const double> v_new) {
        std::vector<double> rhs = phi;
        const std::vector<double> coupling = sys_.a12.multiply(v_new);
        for (int i = 0; i < n; ++i) {
            rhs[i] -= coupling[i];
        }
        return rhs;
    };

    // Unconstrained solve seeds Newton and screens the v constraints.
    out.u = lu_a11_.solve(bond_rhs(out.v));

    std::vector<double> u_ref(n + 2);
    auto refresh_v_constraints = [&](std::span<const double> u_interior) {
        u_ref[0] = boundary.u_left;
        std::copy(u_interior.begin(), u_interior.end(), u_ref.begin() + 1);
        u_ref[n + 1] = boundary.u_right;
        for (int i = 1; i <= n; ++i) {
            out.v[i - 1] = apply_v_constraints_at(out.v[i - 1], u_ref[i], x_[i], contract_, market_,
                                                  tau_new, AccrualRule::reset_at_coupon);
        }
    };
    refresh_v_constraints(out.u);

    const std::vector<double> rhs = bond_rhs(out.v);
    std::vector<double> gap(n), f(n);
    for (int iter = 0;; ++iter) {
        for (int i = 0; i < n; ++i) {
            gap[i] = penalty_gap(out.u[i], lower[i], upper[i]);
        }
        f = sys_.a11.multiply(out.u);
        const std::vector<double> mg = ops_.mass.multiply(gap);
        for (int i = 0; i < n; ++i) {
            f[i] += rho_dt * mg[i] - rhs[i];
        }
        if (inf_norm(f) <= cfg_.tol) {
            out.newton_iterations = iter;
            break;
        }
        if (iter >= cfg_.max_iter) {
            throw SolverError("interior Newton: no convergence at tau=" + std::to_string(tau_new) +
                              " after " + std::to_string(iter) +
                              " iterations, |f|=" + std::to_string(inf_norm(f)));
        }
        BandedMatrix jacobian = sys_.a11;
        for (int j = 0; j < n; ++j) {
            double weight = 0.0;
            if (out.u[j] - upper[j] >= 0.0) {
                weight += 1.0;
            }
            if (lower[j] - out.u[j] >= 0.0) {
                weight += 1.0;
            }
            if (weight != 0.0) {
                jacobian.add_scaled_column(ops_.mass, j, rho_dt * weight);
            }
        }
        for (int i = 0; i < n; ++i) {
            f[i] = -f[i];
        }
        std::vector<double> du;
        try {
            du = solve_banded(jacobian, f);
        } catch (const SolverError& e) {
            throw SolverError("interior Newton at tau=" + std::to_string(tau_new) + ", iteration " +
                              std::to_string(iter + 1) + ": " + e.what());
        }
        for (int i = 0; i < n; ++i) {
            out.u[i] += du[i];
        }
        if (inf_norm(du) <= cfg_.tol) {
            out.newton_iterations = iter + 1;
            break;
        }
    }

    for (int i = 0; i < n; ++i) {
        out.max_call_violation = std::max(out.max_call_violation, out.u[i] - upper[i]);
        out.max_put_violation = std::max(out.max_put_violation, lower[i] - out.u[i]);
    }
    out.max_call_violation = std::max(out.max_call_violation, 0.0);
    out.max_put_violation = std::max(out.max_put_violation, 0.0);

    refresh_v_constraints(out.u);

    if (is_coupon_level(contract_, tau_new)) {
        for (int i = 0; i < n; ++i) {
            out.u[i] += contract_.coupon_amount;
            out.v[i] += contract_.coupon_amount;
        }
    }
    return out;
}

SolutionState ThetaStepper::advance(const SolutionState& state) {
    const double tau_new = state.tau + dtau_;

    const BoundaryStepResult left = boundary_step(state);

    // Far-field closure: conversion into stock, no cash-only value.
    BoundaryValues boundary;
    boundary.u_left = left.u_left;
    boundary.v_left = left.v_left;
    boundary.penalty_residual_left = left.penalty_residual;

    const double x_max = x_.back();
    double u_right = contract_.conversion_ratio * market_.initial_stock_price * std::exp(x_max);
    double v_right = 0.0;
    const PriceBounds right_bounds =
        constraint_bounds(contract_, market_, x_max, tau_new, AccrualRule::reset_at_coupon);
    u_right = std::clamp(u_right, right_bounds.lower, right_bounds.upper);
    v_right = apply_v_constraints_at(v_right, u_right, x_max, contract_, market_, tau_new,
                                     AccrualRule::reset_at_coupon);
    boundary.penalty_residual_right = penalty_gap(u_right, right_bounds.lower, right_bounds.upper);
    if (is_coupon_level(contract_, tau_new)) {
        u_right += contract_.coupon_amount;
        v_right += contract_.coupon_amount;
    }
    boundary.u_right = u_right;
    boundary.v_right = v_right;

    InteriorStepResult interior = interior_step(state, boundary, tau_new);

    stats_.max_boundary_newton_iterations =
        std::max(stats_.max_boundary_newton_iterations, left.newton_iterations);
    stats_.max_interior_newton_iterations =
        std::max(stats_.max_interior_newton_iterations, interior.newton_iterations);
    stats_.total_newton_solves += interior.newton_iterations + left.newton_iterations;
    stats_.max_call_violation = std::max({stats_.max_call_violation, left.call_violation,
                                          interior.max_call_violation});
    stats_.max_put_violation =
        std::max({stats_.max_put_violation, left.put_violation, interior.max_put_violation});

    SolutionState next;
    next.level = state.level + 1;
    next.tau = tau_new;
    next.u = std::move(interior.u);
    next.v = std::move(interior.v);
    next.u_left = boundary.u_left;
    next.v_left = boundary.v_left;
    next.u_right = boundary.u_right;
    next.v_right = boundary.v_right;
    return next;
}

PriceSurface run_theta_scheme(const GlobalOperators& ops, std::span<const double> x_nodes,
                              std::optional<Mesh> fem_mesh, const BondContract& contract,
                              const MarketParams& market, double theta, int n_time_steps,
                              const NewtonConfig& cfg) {
    ThetaStepper stepper(ops, x_nodes, contract, market, theta, n_time_steps, cfg);

    PriceSurface surface;
    surface.maturity = contract.maturity;
    surface.initial_stock_price = market.initial_stock_price;
    surface.fem_mesh = std::move(fem_mesh);
    surface.x.assign(x_nodes.begin(), x_nodes.end());
    surface.s.resize(surface.x.size());
    for (size_t i = 0; i < surface.x.size(); ++i) {
        surface.s[i] = market.initial_stock_price * std::exp(surface.x[i]);
    }
    surface.taus.reserve(n_time_steps + 1);
    surface.u.reserve(n_time_steps + 1);
    surface.v.reserve(n_time_steps + 1);

    auto record = [&](const SolutionState& state) {
        std::vector<double> u_row(surface.x.size()), v_row(surface.x.size());
        u_row.front() = state.u_left;
        v_row.front() = state.v_left;
        std::copy(state.u.begin(), state.u.end(), u_row.begin() + 1);
        std::copy(state.v.begin(), state.v.end(), v_row.begin() + 1);
        u_row.back() = state.u_right;
        v_row.back() = state.v_right;
        for (size_t i = 0; i < u_row.size(); ++i) {
            if (!std::isfinite(u_row[i]) || !std::isfinite(v_row[i])) {
                throw SolverError("non-finite value at level " + std::to_string(state.level) +
                                  ", node " + std::to_string(i));
            }
        }
        surface.taus.push_back(state.tau);
        surface.u.push_back(std::move(u_row));
        surface.v.push_back(std::move(v_row));
    };

    SolutionState state = stepper.initial();
    record(state);
    for (int m = 0; m < n_time_steps; ++m) {
        state = stepper.advance(state);
        record(state);
    }
    surface.stats = stepper.stats();
    return surface;
}

PriceSurface full_solve(const Mesh& mesh, const BondContract& contract, const MarketParams& market,
                        double theta, int n_time_steps, const NewtonConfig& cfg) {
    const GlobalOperators ops = assemble(mesh);
    return run_theta_scheme(ops, mesh.nodes, mesh, contract, market, theta, n_time_steps, cfg);
}

}  // namespace cbfem
