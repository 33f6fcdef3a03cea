#pragma once

#include <optional>
#include <vector>

namespace cbfem {

/// Interval of forward times with explicit edge inclusion, e.g. (3, 5].
/// A window with hi < lo is empty.
struct TimeWindow {
    double lo = 0.0;
    double hi = -1.0;
    bool lo_inclusive = false;
    bool hi_inclusive = true;

    static TimeWindow empty() { return {}; }
    bool is_empty() const { return hi < lo; }
    bool contains(double t, double tol = 1e-9) const;
};

/// Convertible-bond contract: face value, coupon schedule, conversion
/// ratio, and clean call/put prices with their active windows.
struct BondContract {
    double face_value = 100.0;
    double coupon_amount = 4.0;
    std::vector<double> coupon_times;  // strictly increasing, in (0, T]
    double conversion_ratio = 1.0;
    std::optional<double> clean_call_price;
    TimeWindow call_window = TimeWindow::empty();
    std::optional<double> clean_put_price;
    TimeWindow put_window = TimeWindow::empty();
    double maturity = 5.0;

    /// Stand-in for the "no call constraint" +infinity: finite so it can
    /// enter arithmetic, far above any achievable price.
    double call_ceiling() const { return 1e9 * face_value; }

    /// Throws ConfigError listing every violated invariant.
    void validate() const;
};

struct MarketParams {
    double risk_free_rate = 0.05;
    double credit_spread = 0.02;
    double volatility = 0.2;
    double initial_stock_price = 100.0;

    void validate() const;
};

/// Placement of a coupon date inside its accrual interval.
///
/// bracket_right: a coupon date belongs to the interval it ends, so the
/// accrued interest equals the full coupon there. reset_at_coupon: the
/// pending coupon resets exactly at the date, so accrued interest is zero
/// there. The time stepper prices bounds with reset_at_coupon because it
/// pays the coupon itself through the jump at coupon time levels.
enum class AccrualRule { bracket_right, reset_at_coupon };

/// Accrued interest at forward time t in [0, maturity].
double accrued_interest(const BondContract& contract, double t,
                        AccrualRule rule = AccrualRule::bracket_right);

/// Dirty call price at forward time t: clean price plus accrued interest
/// inside the call window, the finite ceiling sentinel outside it.
double dirty_call_price(const BondContract& contract, double t,
                        AccrualRule rule = AccrualRule::bracket_right);

/// Dirty put price at forward time t: clean price plus accrued interest
/// inside the put window, 0 (no put constraint) outside it.
double dirty_put_price(const BondContract& contract, double t,
                       AccrualRule rule = AccrualRule::bracket_right);

/// Lower/upper price bounds at log-moneyness x and backward time tau.
/// lower = max(B_put(t), k S e^x), upper = max(B_call(t), k S e^x),
/// evaluated at forward time t = maturity - tau.
struct PriceBounds {
    double lower = 0.0;
    double upper = 0.0;
};

PriceBounds constraint_bounds(const BondContract& contract, const MarketParams& market, double x,
                              double tau, AccrualRule rule = AccrualRule::bracket_right);

/// Bond and cash-only values at maturity as functions of log-moneyness.
struct ValuePair {
    double cb = 0.0;    // convertible bond value U
    double cocb = 0.0;  // cash-only part V
};

ValuePair terminal_payoff(const BondContract& contract, const MarketParams& market, double x);

}  // namespace cbfem
