#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cbfem/assembly.hpp"
#include "cbfem/contracts.hpp"
#include "cbfem/mesh.hpp"
#include "cbfem/tf_system.hpp"

namespace cbfem {

struct NewtonConfig {
    double tol = 1e-12;
    int max_iter = 100;
    double rho = 1e12;  // penalty weight
};

struct SolveStats {
    int max_interior_newton_iterations = 0;
    int max_boundary_newton_iterations = 0;
    long total_newton_solves = 0;
    // Worst constraint slack after Newton convergence, before the coupon
    // bump: max(0, u - u*_call) and max(0, u*_put - u) over nodes/levels.
    double max_call_violation = 0.0;
    double max_put_violation = 0.0;
    bool stability_warning = false;
};

/// Full time history of a solve: values at every node (boundaries
/// included) and every backward-time level.
struct PriceSurface {
    std::vector<double> taus;
    std::vector<double> x;
    std::vector<double> s;  // S = S_int e^x
    std::vector<std::vector<double>> u, v;
    double maturity = 0.0;
    double initial_stock_price = 0.0;
    std::optional<Mesh> fem_mesh;  // present for FEM solves; FDM interpolates linearly
    SolveStats stats;

    /// Bond value at forward time t and stock price s_price. Exact at
    /// grid times and nodes; interpolates in space otherwise.
    double price_at(double t, double s_price) const;
};

struct ScalarRoot {
    double x = 0.0;
    int iterations = 0;
};

/// Scalar Newton iteration: stops when |f| <= tol or the step is <= tol.
ScalarRoot newton_scalar(const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime, double x0,
                         const NewtonConfig& cfg);

struct BoundaryStepResult {
    double u_left = 0.0, v_left = 0.0;
    int newton_iterations = 0;
    double penalty_residual = 0.0;  // active-set weighted gap, pre-bump
    double call_violation = 0.0, put_violation = 0.0;
};

struct BoundaryValues {
    double u_left = 0.0, v_left = 0.0;
    double u_right = 0.0, v_right = 0.0;
    double penalty_residual_left = 0.0, penalty_residual_right = 0.0;
};

struct InteriorStepResult {
    std::vector<double> u, v;
    int newton_iterations = 0;
    double max_call_violation = 0.0, max_put_violation = 0.0;
};

/// Theta-scheme integrator for the penalty two-equation model over a
/// fixed set of operators (FEM-assembled or finite-difference built).
/// Factorizations of the constant system matrices are cached; each solve
/// is sequential in time, independent instances may run concurrently.
class ThetaStepper {
public:
    ThetaStepper(const GlobalOperators& ops, std::span<const double> x_nodes,
                 BondContract contract, MarketParams market, double theta, int n_time_steps,
                 NewtonConfig cfg);

    SolutionState initial() const;

    /// One full level: boundary solutions, x_max closure, interior Newton,
    /// constraints and coupon handling.
    SolutionState advance(const SolutionState& state);

    /// Boundary update at x_min (coupon bump included, like advance()).
    BoundaryStepResult boundary_step(const SolutionState& state) const;

    /// Interior update given both boundary values at the new level.
    InteriorStepResult interior_step(const SolutionState& state, const BoundaryValues& boundary,
                                     double tau_new) const;

    const SolveStats& stats() const { return stats_; }
    double dtau() const { return dtau_; }
    int steps() const { return n_steps_; }

private:
    const GlobalOperators& ops_;
    std::vector<double> x_;
    BondContract contract_;
    MarketParams market_;
    NewtonConfig cfg_;
    double theta_;
    double dtau_;
    int n_steps_;
    ThetaSystem sys_;
    BandedLU lu_a11_, lu_a22_;
    SolveStats stats_;

    void accumulate_u_boundary(std::span<double> rhs, double ul, double ur, double vl, double vr,
                               double scale) const;
    void accumulate_v_boundary(std::span<double> rhs, double vl, double vr, double scale) const;
};

/// Runs the constrained theta-scheme over prebuilt operators and records
/// every level. Shared by the FEM and finite-difference front ends.
PriceSurface run_theta_scheme(const GlobalOperators& ops, std::span<const double> x_nodes,
                              std::optional<Mesh> fem_mesh, const BondContract& contract,
                              const MarketParams& market, double theta, int n_time_steps,
                              const NewtonConfig& cfg);

/// Constrained theta-scheme solve on a finite-element mesh.
PriceSurface full_solve(const Mesh& mesh, const BondContract& contract, const MarketParams& market,
                        double theta, int n_time_steps, const NewtonConfig& cfg = {});

}  // namespace cbfem
