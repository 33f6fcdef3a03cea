#include "cbfem/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cbfem/errors.hpp"

namespace cbfem {

bool TimeWindow::contains(double t, double tol) const {
    if (is_empty()) {
        return false;
    }
    const bool above = lo_inclusive ? t >= lo - tol : t > lo + tol;
    const bool below = hi_inclusive ? t <= hi + tol : t < hi - tol;
    return above && below;
}

void BondContract::validate() const {
    std::vector<std::string> issues;
    if (!(face_value > 0.0)) {
        issues.push_back("face_value must be positive");
    }
    if (coupon_amount < 0.0) {
        issues.push_back("coupon_amount must be nonnegative");
    }
    if (conversion_ratio < 0.0) {
        issues.push_back("conversion_ratio must be nonnegative");
    }
    if (!(maturity > 0.0)) {
        issues.push_back("maturity must be positive");
    }
    for (size_t i = 0; i < coupon_times.size(); ++i) {
        if (coupon_times[i] <= 0.0 || coupon_times[i] > maturity) {
            issues.push_back("coupon time " + std::to_string(coupon_times[i]) +
                             " outside (0, maturity]");
            break;
        }
        if (i > 0 && coupon_times[i] <= coupon_times[i - 1]) {
            issues.push_back("coupon times must be strictly increasing");
            break;
        }
    }
    for (const auto& [name, window, price] :
         {std::tuple{"call", call_window, clean_call_price}, std::tuple{"put", put_window, clean_put_price}}) {
        if (!window.is_empty()) {
            if (!price.has_value()) {
                issues.push_back(std::string(name) + "_window given without a clean price");
            }
            if (window.lo < 0.0 || window.hi > maturity) {
                issues.push_back(std::string(name) + "_window must lie within [0, maturity]");
            }
        }
    }
    // Overlapping call/put windows are consistent only if the put never
    // exceeds the call; clean prices share the same accrued interest.
    if (!call_window.is_empty() && !put_window.is_empty() && clean_call_price && clean_put_price) {
        const double overlap_lo = std::max(call_window.lo, put_window.lo);
        const double overlap_hi = std::min(call_window.hi, put_window.hi);
        if (overlap_lo < overlap_hi && *clean_put_price > *clean_call_price) {
            issues.push_back("clean put price exceeds clean call price on overlapping windows");
        }
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
}

void MarketParams::validate() const {
    std::vector<std::string> issues;
    if (!(volatility > 0.0)) {
        issues.push_back("volatility must be positive");
    }
    if (!(initial_stock_price > 0.0)) {
        issues.push_back("initial_stock_price must be positive");
    }
    if (risk_free_rate < 0.0) {
        issues.push_back("risk_free_rate must be nonnegative");
    }
    if (credit_spread < 0.0) {
        issues.push_back("credit_spread must be nonnegative");
    }
    if (!issues.empty()) {
        throw ConfigError(std::move(issues));
    }
}

namespace {
constexpr double kTimeTol = 1e-9;
}

double accrued_interest(const BondContract& contract, double t, AccrualRule rule) {
    if (t < -kTimeTol || t > contract.maturity + kTimeTol) {
        throw std::domain_error("accrued_interest: t outside [0, maturity]");
    }
    const auto& dates = contract.coupon_times;
    if (dates.empty()) {
        return 0.0;
    }
    // Snap to an exact coupon date first; the two rules differ only there.
    for (double d : dates) {
        if (std::abs(t - d) <= kTimeTol) {
            return rule == AccrualRule::bracket_right ? contract.coupon_amount : 0.0;
        }
    }
    auto next = std::upper_bound(dates.begin(), dates.end(), t);
    if (next == dates.end()) {
        return 0.0;  // no pending coupon
    }
    const double prev = next == dates.begin() ? 0.0 : *(next - 1);
    return contract.coupon_amount * (t - prev) / (*next - prev);
}

double dirty_call_price(const BondContract& contract, double t, AccrualRule rule) {
    if (t < -kTimeTol || t > contract.maturity + kTimeTol) {
        throw std::domain_error("dirty_call_price: t outside [0, maturity]");
    }
    if (!contract.clean_call_price || !contract.call_window.contains(t)) {
        return contract.call_ceiling();
    }
    return *contract.clean_call_price + accrued_interest(contract, t, rule);
}

double dirty_put_price(const BondContract& contract, double t, AccrualRule rule) {
    if (t < -kTimeTol || t > contract.maturity + kTimeTol) {
        throw std::domain_error("dirty_put_price: t outside [0, maturity]");
    }
    if (!contract.clean_put_price || !contract.put_window.contains(t)) {
        return 0.0;
    }
    return *contract.clean_put_price + accrued_interest(contract, t, rule);
}

PriceBounds constraint_bounds(const BondContract& contract, const MarketParams& market, double x,
                              double tau, AccrualRule rule) {
    const double t = contract.maturity - tau;
    const double conversion_value = contract.conversion_ratio * market.initial_stock_price * std::exp(x);
    return {std::max(dirty_put_price(contract, t, rule), conversion_value),
            std::max(dirty_call_price(contract, t, rule), conversion_value)};
}

ValuePair terminal_payoff(const BondContract& contract, const MarketParams& market, double x) {
    const double conversion_value = contract.conversion_ratio * market.initial_stock_price * std::exp(x);
    const double redemption = contract.face_value + contract.coupon_amount;
    if (redemption >= conversion_value) {
        return {redemption, redemption};
    }
    return {conversion_value, 0.0};
}

}  // namespace cbfem
