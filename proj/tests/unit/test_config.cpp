#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cbfem/config.hpp"
#include "cbfem/driver.hpp"
#include "cbfem/errors.hpp"

using namespace cbfem;

TEST_CASE("empty text yields the full benchmark defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.contract.face_value == 100.0);
    CHECK(c.contract.coupon_amount == 4.0);
    CHECK(c.contract.coupon_times.size() == 10);
    CHECK(c.contract.clean_call_price == 110.0);
    CHECK(c.contract.call_window.lo == 3.0);
    CHECK(c.contract.call_window.hi == 5.0);
    CHECK_FALSE(c.contract.call_window.lo_inclusive);
    CHECK(c.contract.put_window.contains(3.0));
    CHECK_FALSE(c.contract.put_window.contains(2.0));
    CHECK(c.market.volatility == 0.2);
    CHECK(c.market.risk_free_rate == 0.05);
    CHECK(c.market.credit_spread == 0.02);
    CHECK(c.numerics.x_min == -6.0);
    CHECK(c.numerics.x_max == 2.0);
    CHECK(c.numerics.theta == 0.5);
    CHECK(c.numerics.penalty_rho == 1e12);
    CHECK(c.numerics.newton_tol == 1e-12);
    CHECK(c.numerics.order == ElementOrder::p2);
    CHECK(c.numerics.n_elements == 400);
    CHECK(c.numerics.n_time_steps == 400);
}

TEST_CASE("sections, comments, windows, and overrides parse") {
    const RunConfig c = parse_config(R"(# demo
[contract]
face_value = 50
clean_put_price = none
put_window = none
call_window = [3.5, 4.25)   # half-open the other way

[numerics]
element_order = p1
n_elements = 64
)");
    CHECK(c.contract.face_value == 50.0);
    CHECK_FALSE(c.contract.clean_put_price.has_value());
    CHECK(c.contract.put_window.is_empty());
    CHECK(c.contract.call_window.lo_inclusive);
    CHECK_FALSE(c.contract.call_window.hi_inclusive);
    CHECK(c.contract.call_window.contains(3.5));
    CHECK_FALSE(c.contract.call_window.contains(4.25));
    CHECK(c.numerics.order == ElementOrder::p1);
    CHECK(c.numerics.n_elements == 64);
}

TEST_CASE("violations are collected with line anchors") {
    try {
        parse_config(R"([market]
volatility = -0.1
bogus_key = 3
[numerics]
theta = 2.0
)");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.issues().size() == 3);
        CHECK(e.issues()[0].find("line 3") != std::string::npos);       // unknown key
        CHECK(e.issues()[0].find("bogus_key") != std::string::npos);
        CHECK(e.issues()[1].find("volatility") != std::string::npos);   // semantic check
        CHECK(e.issues()[2].find("theta") != std::string::npos);
    }
}

TEST_CASE("coupon list parsing and contract validation flow through") {
    CHECK_THROWS_AS(parse_config("[contract]\ncoupon_times = 2.0 1.0\n"), ConfigError);
    const RunConfig c = parse_config("[contract]\ncoupon_times = 1.0, 2.0, 3.0\nmaturity = 3\n");
    CHECK(c.contract.coupon_times == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("driver: tiny surface run has the documented row count and is deterministic") {
    RunConfig config = default_config();
    config.command = "surface";
    config.numerics.n_elements = 16;
    config.numerics.n_time_steps = 10;
    config.numerics.order = ElementOrder::p1;

    std::ostringstream out1, err1, out2, err2;
    REQUIRE(run(config, out1, err1) == 0);
    REQUIRE(run(config, out2, err2) == 0);
    CHECK(out1.str() == out2.str());

    // header + (n_t + 1) * (nodes) rows
    const std::string text = out1.str();
    const size_t lines = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == 1 + 11 * 17);
    CHECK(text.find("nan") == std::string::npos);
    CHECK(text.find("inf") == std::string::npos);
}

TEST_CASE("driver: price command emits a value and a JSON record") {
    RunConfig config = default_config();
    config.command = "price";
    config.numerics.n_elements = 20;
    config.numerics.n_time_steps = 10;
    config.numerics.order = ElementOrder::p1;

    std::ostringstream out, err;
    REQUIRE(run(config, out, err) == 0);
    CHECK(out.str().find("U(t=0, S=100)") != std::string::npos);
    CHECK(out.str().find("\"u_at_t0_s_int\"") != std::string::npos);
    CHECK(out.str().find("\"config\"") != std::string::npos);
}

TEST_CASE("driver: failures produce machine-readable JSON errors") {
    RunConfig config = default_config();
    config.command = "price";
    config.numerics.n_time_steps = 7;  // coupon dates fall off the grid

    std::ostringstream out, err;
    CHECK(run(config, out, err) != 0);
    CHECK(err.str().find("\"error\"") != std::string::npos);

    config.command = "definitely-not-a-command";
    std::ostringstream out2, err2;
    CHECK(run(config, out2, err2) == 1);
    CHECK(err2.str().find("unknown command") != std::string::npos);
}
