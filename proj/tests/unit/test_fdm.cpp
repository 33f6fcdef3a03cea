#include <doctest.h>

#include <cmath>
#include <vector>

#include "cbfem/config.hpp"
#include "cbfem/fdm.hpp"

using namespace cbfem;

TEST_CASE("difference operators: zero row sums and second-order accuracy on sin") {
    MarketParams market;
    const double eps = 0.5 * market.volatility * market.volatility;
    const double a = market.risk_free_rate - eps;

    auto max_operator_error = [&](int n) {
        const FdmGrid grid = build_fdm_grid(-1.0, 1.0, n);
        const FdmOperators ops = fdm_operators(grid, market);
        std::vector<double> f(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            f[i] = std::sin(grid.nodes[i + 1]);
        }
        const auto diff = ops.diffusion.multiply(f);
        const auto conv = ops.convection.multiply(f);
        double worst = 0.0;
        for (int i = 1; i < n - 2; ++i) {  // away from boundary truncation
            const double x = grid.nodes[i + 1];
            worst = std::max(worst, std::abs(diff[i] - eps * -std::sin(x)));
            worst = std::max(worst, std::abs(conv[i] - a * std::cos(x)));
        }
        return worst;
    };

    const double coarse = max_operator_error(64);
    const double fine = max_operator_error(128);
    const double order = std::log2(coarse / fine);
    CHECK(order == doctest::Approx(2.0).epsilon(0.05));

    // interior rows annihilate constants
    const FdmGrid grid = build_fdm_grid(0.0, 1.0, 16);
    const FdmOperators ops = fdm_operators(grid, market);
    const std::vector<double> ones(15, 1.0);
    const auto d1 = ops.diffusion.multiply(ones);
    const auto c1 = ops.convection.multiply(ones);
    for (int i = 1; i < 14; ++i) {
        CHECK(d1[i] == doctest::Approx(0.0));
        CHECK(c1[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("constant data is a fixed point of the unconstrained collocation step") {
    // Rates off, penalty off, and a conversion line that touches the data
    // only at x_max, so every discrete operator annihilates the state.
    BondContract contract;
    contract.face_value = 104.0;
    contract.coupon_amount = 0.0;
    contract.coupon_times = {};
    contract.clean_call_price.reset();
    contract.call_window = TimeWindow::empty();
    contract.clean_put_price.reset();
    contract.put_window = TimeWindow::empty();
    contract.maturity = 5.0;
    MarketParams market;
    market.risk_free_rate = 0.0;
    market.credit_spread = 0.0;

    const double x_max = 1.0;
    contract.conversion_ratio = 104.0 / (market.initial_stock_price * std::exp(x_max));

    const FdmGrid grid = build_fdm_grid(-3.0, x_max, 32);
    NewtonConfig cfg;
    cfg.rho = 0.0;
    const PriceSurface surface = fdm_solve(grid, contract, market, 0.5, 1, cfg);
    for (size_t i = 0; i < surface.x.size(); ++i) {
        CHECK(surface.u[1][i] == doctest::Approx(104.0).epsilon(1e-13));
    }
}

TEST_CASE("benchmark price by finite differences, coarse grid") {
    const RunConfig config = default_config();
    const FdmGrid grid = build_fdm_grid(-6.0, 2.0, 100);
    const PriceSurface surface = fdm_solve(grid, config.contract, config.market, 0.5, 100, {});
    CHECK(surface.price_at(0.0, 100.0) == doctest::Approx(124.991).epsilon(0.002));
}
