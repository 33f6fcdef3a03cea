// Acceptance suite: one pass/fail line per criterion, nonzero exit count
// of failures. Shares the benchmark solves across criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cbfem/analytics.hpp"
#include "cbfem/assembly.hpp"
#include "cbfem/banded.hpp"
#include "cbfem/config.hpp"
#include "cbfem/fdm.hpp"
#include "cbfem/mms.hpp"
#include "cbfem/stepper.hpp"
#include "cbfem/tf_system.hpp"

using namespace cbfem;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion-%d %s: %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

struct BenchmarkRun {
    double price = 0.0;
    SolveStats stats;
};

std::map<std::pair<int, int>, BenchmarkRun> fem_cache;  // (order, n) -> run

BenchmarkRun benchmark_fem(ElementOrder order, int n) {
    const auto key = std::make_pair(order == ElementOrder::p1 ? 1 : 2, n);
    const auto it = fem_cache.find(key);
    if (it != fem_cache.end()) {
        return it->second;
    }
    const RunConfig config = default_config();
    const Mesh mesh = build_mesh(-6.0, 2.0, n, order);
    const PriceSurface surface = full_solve(mesh, config.contract, config.market, 0.5, n, {});
    BenchmarkRun run{surface.price_at(0.0, 100.0), surface.stats};
    fem_cache.emplace(key, run);
    return run;
}

BenchmarkRun benchmark_fdm(int n) {
    const RunConfig config = default_config();
    const FdmGrid grid = build_fdm_grid(-6.0, 2.0, n);
    const PriceSurface surface = fdm_solve(grid, config.contract, config.market, 0.5, n, {});
    return {surface.price_at(0.0, 100.0), surface.stats};
}

void criterion_1_element_matrices() {
    bool pass = true;
    std::string detail;
    for (double h : {0.01, 0.08, 1.0}) {
        const ElementMatrices p1 = p1_element_matrices(h);
        const double m1[2][2] = {{2 * h / 6, h / 6}, {h / 6, 2 * h / 6}};
        const double s1[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
        const double n1[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                pass = pass && p1.mass[i][j] == m1[i][j] && p1.stiffness[i][j] == s1[i][j] &&
                       p1.convection[i][j] == n1[i][j];
            }
        }
        const ElementMatrices p2 = p2_element_matrices(h);
        const double m2[3][3] = {{4 * h / 30, 2 * h / 30, -h / 30},
                                 {2 * h / 30, 16 * h / 30, 2 * h / 30},
                                 {-h / 30, 2 * h / 30, 4 * h / 30}};
        const double s2[3][3] = {{7 / (3 * h), -8 / (3 * h), 1 / (3 * h)},
                                 {-8 / (3 * h), 16 / (3 * h), -8 / (3 * h)},
                                 {1 / (3 * h), -8 / (3 * h), 7 / (3 * h)}};
        const double n2[3][3] = {{-3.0 / 6, -4.0 / 6, 1.0 / 6},
                                 {4.0 / 6, 0.0, -4.0 / 6},
                                 {-1.0 / 6, 4.0 / 6, 3.0 / 6}};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                pass = pass && std::abs(p2.mass[i][j] - m2[i][j]) <= 4e-16 * h &&
                       std::abs(p2.stiffness[i][j] - s2[i][j]) <= 4e-16 / h &&
                       p2.convection[i][j] == n2[i][j];
            }
        }
    }
    report(1, "element-matrix exactness (P1/P2, h in {0.01, 0.08, 1})", pass,
           pass ? "all closed forms reproduced to machine precision" : "mismatch found");
}

void criterion_2_table_reproduction() {
    struct Row {
        int n;
        double p1, p2, fdm;
    };
    const std::vector<Row> rows = {{100, 124.422, 124.846, 124.991},
                                   {200, 124.653, 124.820, 124.848},
                                   {400, 124.740, 124.814, 124.814}};
    bool pass = true;
    std::string detail;
    char buf[160];
    for (const Row& row : rows) {
        const double p1 = benchmark_fem(ElementOrder::p1, row.n).price;
        const double p2 = benchmark_fem(ElementOrder::p2, row.n).price;
        const double fd = benchmark_fdm(row.n).price;
        pass = pass && std::abs(p1 - row.p1) <= 0.25 && std::abs(p2 - row.p2) <= 0.25 &&
               std::abs(fd - row.fdm) <= 0.25;
        std::snprintf(buf, sizeof(buf), "n=%d: P1 %.3f (ref %.3f) P2 %.3f (ref %.3f) FDM %.3f (ref %.3f); ",
                      row.n, p1, row.p1, p2, row.p2, fd, row.fdm);
        detail += buf;
    }
    const double p2_fine = benchmark_fem(ElementOrder::p2, 1200).price;
    pass = pass && std::abs(p2_fine - 124.777) <= 0.10 && std::abs(p2_fine - 124.78) <= 0.05;
    std::snprintf(buf, sizeof(buf), "P2 n=1200 %.3f (ref 124.777)", p2_fine);
    detail += buf;
    report(2, "benchmark price table, tolerance 0.25 (0.10/0.05 at n=1200)", pass, detail);
}

void criterion_3_cross_oracle() {
    const double fem = benchmark_fem(ElementOrder::p2, 400).price;
    const double fdm = benchmark_fdm(400).price;
    const double diff = std::abs(fem - fdm);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "|P2FEM - FDM| = %.4f at n=400 (limit 0.05)", diff);
    report(3, "finite-element vs finite-difference cross check", diff <= 0.05, buf);
}

void criterion_4_constraint_satisfaction() {
    const BenchmarkRun run = benchmark_fem(ElementOrder::p2, 200);
    const double limit = 1e-6 * 100.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max call-side slack %.3e, put-side slack %.3e (limit %.1e)",
                  run.stats.max_call_violation, run.stats.max_put_violation, limit);
    report(4, "constraint satisfaction after Newton, n=200",
           run.stats.max_call_violation <= limit && run.stats.max_put_violation <= limit, buf);
}

void criterion_5_mms_temporal() {
    MmsCase c;
    const std::vector<int> steps = {4, 8, 16, 32, 40};
    const MmsSweep p1 = mms_temporal_sweep(c, ElementOrder::p1, 3333, steps);
    const MmsSweep p2 = mms_temporal_sweep(c, ElementOrder::p2, 1000, steps);
    const bool pass = std::abs(p1.order_l2 - 1.0) <= 0.2 && std::abs(p2.order_l2 - 1.0) <= 0.2 &&
                      std::abs(p1.order_linf_l2 - 1.0) <= 0.2 &&
                      std::abs(p2.order_linf_l2 - 1.0) <= 0.2;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "observed orders: P1 L2 %.2f Linf %.2f, P2 L2 %.2f Linf %.2f (target 1.0 +- 0.2)",
                  p1.order_l2, p1.order_linf_l2, p2.order_l2, p2.order_linf_l2);
    report(5, "manufactured-solution temporal order", pass, buf);
}

void criterion_6_mms_spatial() {
    MmsCase c;
    const int steps = 10000;  // dtau = 1e-4
    const MmsSweep p1 = mms_spatial_sweep(c, ElementOrder::p1, {32, 64, 128, 256, 320}, steps);
    const MmsSweep p2 = mms_spatial_sweep(c, ElementOrder::p2, {10, 20, 40, 80, 100}, steps);
    const bool pass = p1.order_l2 >= 0.8 && p1.order_linf_l2 >= 0.8 && p2.order_l2 >= 1.7 &&
                      p2.order_linf_l2 >= 1.7;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "observed orders: P1 L2 %.2f Linf %.2f (>= 0.8), P2 L2 %.2f Linf %.2f (>= 1.7)",
                  p1.order_l2, p1.order_linf_l2, p2.order_l2, p2.order_linf_l2);
    report(6, "manufactured-solution spatial order", pass, buf);
}

void criterion_7_newton_behavior() {
    // the benchmark runs throw on any nonconverged Newton solve, so
    // reaching this point already certifies convergence at tol 1e-12
    int worst = 0;
    for (int n : {100, 200, 400}) {
        worst = std::max(worst, benchmark_fem(ElementOrder::p1, n).stats.max_interior_newton_iterations);
        worst = std::max(worst, benchmark_fem(ElementOrder::p2, n).stats.max_interior_newton_iterations);
        worst = std::max(worst, benchmark_fdm(n).stats.max_interior_newton_iterations);
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "every interior solve converged; max iterations %d (limit 10)",
                  worst);
    report(7, "interior Newton convergence on the benchmark runs", worst <= 10, buf);
}

void criterion_8_property_suites() {
    bool pass = true;
    std::string detail;

    // partition of unity
    {
        bool ok = true;
        for (ElementOrder order : {ElementOrder::p1, ElementOrder::p2}) {
            const Mesh mesh = build_mesh(-2.0, 2.0, 7, order);
            for (int e = 0; e < mesh.n_elements; ++e) {
                for (double frac : {0.1, 0.5, 0.9}) {
                    const auto psi = basis_values(mesh, e, mesh.x_min + (e + frac) * mesh.h);
                    double sum = 0.0;
                    for (int l = 0; l < mesh.nodes_per_element(); ++l) {
                        sum += psi[l];
                    }
                    ok = ok && std::abs(sum - 1.0) < 1e-12;
                }
            }
        }
        pass = pass && ok;
        detail += ok ? "partition-of-unity ok; " : "partition-of-unity FAILED; ";
    }

    // stiffness kernel on constants (with boundary columns)
    {
        bool ok = true;
        for (ElementOrder order : {ElementOrder::p1, ElementOrder::p2}) {
            const Mesh mesh = build_mesh(-1.0, 3.0, 11, order);
            const GlobalOperators ops = assemble(mesh);
            std::vector<double> act = ops.stiffness.multiply(std::vector<double>(ops.n, 1.0));
            ops.stiffness_bc.accumulate(act, 1.0, 1.0, 1.0);
            for (double v : act) {
                ok = ok && std::abs(v) < 1e-12;
            }
        }
        pass = pass && ok;
        detail += ok ? "stiffness-kernel ok; " : "stiffness-kernel FAILED; ";
    }

    // boundary cash-only decay tracking, second order in dtau
    {
        BondContract contract = default_config().contract;
        contract.coupon_amount = 0.0;
        contract.coupon_times = {};
        contract.clean_call_price.reset();
        contract.call_window = TimeWindow::empty();
        contract.clean_put_price.reset();
        contract.put_window = TimeWindow::empty();
        MarketParams mkt;
        const Mesh mesh = build_mesh(-6.0, 2.0, 8, ElementOrder::p1);
        const GlobalOperators ops = assemble(mesh);
        auto decay_error = [&](int n_steps) {
            ThetaStepper stepper(ops, mesh.nodes, contract, mkt, 0.5, n_steps, {});
            SolutionState s = stepper.initial();
            for (int m = 0; m < n_steps; ++m) {
                const BoundaryStepResult out = stepper.boundary_step(s);
                s.u_left = out.u_left;
                s.v_left = out.v_left;
                s.tau += stepper.dtau();
            }
            return std::abs(s.v_left - 104.0 * std::exp(-0.07 * s.tau));
        };
        const double e1 = decay_error(250);
        const double e2 = decay_error(500);
        const bool ok = e1 < 1e-6 && e1 / e2 > 3.0 && e1 / e2 < 5.0;
        pass = pass && ok;
        detail += ok ? "v0-decay ok; " : "v0-decay FAILED; ";
    }

    // idempotence of the cash-only constraints
    {
        const RunConfig config = default_config();
        const Mesh mesh = build_mesh(-6.0, 2.0, 24, ElementOrder::p1);
        SolutionState state = initial_state(mesh.nodes, config.contract, config.market);
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> us(80.0, 130.0);
        std::vector<double> u_ref(mesh.nodes.size());
        bool ok = true;
        for (double tau : {0.5, 2.25, 3.0, 4.5}) {
            for (auto& u : u_ref) {
                u = us(rng);
            }
            SolutionState once = state;
            apply_v_constraints(once, u_ref, mesh.nodes, config.contract, config.market, tau);
            SolutionState twice = once;
            apply_v_constraints(twice, u_ref, mesh.nodes, config.contract, config.market, tau);
            ok = ok && once.v == twice.v && once.v_left == twice.v_left &&
                 once.v_right == twice.v_right;
        }
        pass = pass && ok;
        detail += ok ? "v-constraint-idempotence ok; " : "v-constraint-idempotence FAILED; ";
    }

    // coupon bump additivity
    {
        const RunConfig config = default_config();
        const Mesh mesh = build_mesh(-6.0, 2.0, 8, ElementOrder::p1);
        SolutionState state = initial_state(mesh.nodes, config.contract, config.market);
        const double before = state.u[3];
        coupon_bump(state, config.contract, 0.5);
        coupon_bump(state, config.contract, 1.23);  // no-op off the coupon set
        coupon_bump(state, config.contract, 1.0);
        const bool ok = state.u[3] == before + 8.0;
        pass = pass && ok;
        detail += ok ? "coupon-additivity ok; " : "coupon-additivity FAILED; ";
    }

    // banded solver residuals on random diagonally dominant systems
    {
        std::mt19937 rng(91);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        bool ok = true;
        for (int n : {10, 50, 200}) {
            for (int bw : {1, 2}) {
                BandedMatrix a(n, bw);
                for (int i = 0; i < n; ++i) {
                    double row = 0.0;
                    for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j) {
                        if (j != i) {
                            a.at(i, j) = unit(rng);
                            row += std::abs(a(i, j));
                        }
                    }
                    a.at(i, i) = row + 1.5;
                }
                std::vector<double> b(n);
                double bmax = 0.0;
                for (auto& v : b) {
                    v = unit(rng);
                    bmax = std::max(bmax, std::abs(v));
                }
                const auto x = solve_banded(a, b);
                const auto ax = a.multiply(x);
                for (int i = 0; i < n; ++i) {
                    ok = ok && std::abs(ax[i] - b[i]) <= 1e-12 * std::max(1.0, bmax);
                }
            }
        }
        pass = pass && ok;
        detail += ok ? "banded-residuals ok" : "banded-residuals FAILED";
    }

    report(8, "property suites", pass, detail);
}

void figure_shape_checks() {
    // Monotonicity in S at t = 0, delta within [0, k(1+1e-3)] away from
    // constraint kinks, gamma finite everywhere.
    const RunConfig config = default_config();
    const Mesh mesh = build_mesh(-6.0, 2.0, 100, ElementOrder::p2);
    const PriceSurface surface = full_solve(mesh, config.contract, config.market, 0.5, 600, {});
    const auto& u0 = surface.u.back();

    bool monotone = true;
    for (size_t i = 1; i < u0.size(); ++i) {
        monotone = monotone && u0[i] >= u0[i - 1] - 1e-6 * 100.0;
    }
    bool floored = true;
    for (size_t i = 0; i < u0.size(); ++i) {
        floored = floored && u0[i] >= surface.s[i] - 1e-6 * 100.0;
    }

    bool greeks_ok = true;
    double delta_min = 1e300, delta_max = -1e300;
    for (size_t level = 0; level < surface.taus.size(); ++level) {
        const double tau = surface.taus[level];
        if (is_coupon_level(config.contract, tau)) {
            continue;  // the solution jumps across coupon levels
        }
        const PenaltyBounds bounds = penalty_bounds(mesh.nodes, config.contract, config.market,
                                                    tau, AccrualRule::reset_at_coupon);
        for (int j = 2; j < mesh.n_elements; ++j) {
            const GreekPoint g = delta_gamma_p2(mesh, surface.u[level], config.market, j);
            greeks_ok = greeks_ok && std::isfinite(g.gamma) && std::isfinite(g.delta);
            // stay away from active constraint regions
            bool near_active = false;
            for (int node = 2 * (j - 2); node <= 2 * (j + 1) && node < (int)mesh.nodes.size();
                 ++node) {
                const double u = surface.u[level][node];
                near_active = near_active || u >= bounds.upper[node] - 0.5 ||
                              u <= bounds.lower[node] + 0.5;
            }
            if (near_active) {
                continue;
            }
            delta_min = std::min(delta_min, g.delta);
            delta_max = std::max(delta_max, g.delta);
            greeks_ok = greeks_ok && g.delta >= -1e-3 && g.delta <= 1.0 * (1.0 + 1e-3);
        }
    }

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "t=0 monotone: %s, conversion floor: %s, delta range [%.4f, %.4f], greeks finite: %s",
                  monotone ? "yes" : "NO", floored ? "yes" : "NO", delta_min, delta_max,
                  greeks_ok ? "yes" : "NO");
    report(9, "figure shape checks (qualitative surfaces and greeks)",
           monotone && floored && greeks_ok, buf);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1_element_matrices();
    criterion_2_table_reproduction();
    criterion_3_cross_oracle();
    criterion_4_constraint_satisfaction();
    criterion_5_mms_temporal();
    criterion_6_mms_spatial();
    criterion_7_newton_behavior();
    criterion_8_property_suites();
    figure_shape_checks();
    const auto end = std::chrono::steady_clock::now();
    std::printf("%d failure(s); total runtime %.1f s\n", failures,
                std::chrono::duration<double>(end - start).count());
    return failures;
}
