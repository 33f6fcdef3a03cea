#include "cbfem/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cbfem/errors.hpp"

namespace cbfem {

RunConfig default_config() {
    RunConfig config;
    config.contract.face_value = 100.0;
    config.contract.coupon_amount = 4.0;
    config.contract.coupon_times = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    config.contract.conversion_ratio = 1.0;
    config.contract.clean_call_price = 110.0;
    config.contract.call_window = {3.0, 5.0, false, true};
    config.contract.clean_put_price = 105.0;
    config.contract.put_window = {2.0, 3.0, false, true};
    config.contract.maturity = 5.0;
    return config;  // market and numerics defaults already match
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

class Parser {
public:
    explicit Parser(const std::string& text) : config_(default_config()) { parse(text); }

    RunConfig take() {
        finalize();
        return std::move(config_);
    }

private:
    RunConfig config_;
    std::vector<std::string> issues_;

    void fail(int line, const std::string& message) {
        issues_.push_back("line " + std::to_string(line) + ": " + message);
    }

    bool to_double(const std::string& value, double& out) {
        try {
            size_t pos = 0;
            out = std::stod(value, &pos);
            return pos == value.size() && std::isfinite(out);
        } catch (...) {
            return false;
        }
    }

    bool to_int(const std::string& value, int& out) {
        const auto end = value.data() + value.size();
        const auto [ptr, ec] = std::from_chars(value.data(), end, out);
        return ec == std::errc() && ptr == end;
    }

    bool to_window(const std::string& value, TimeWindow& out) {
        const std::string v = trim(value);
        if (v == "none") {
            out = TimeWindow::empty();
            return true;
        }
        if (v.size() < 5 || (v.front() != '(' && v.front() != '[') ||
            (v.back() != ')' && v.back() != ']')) {
            return false;
        }
        const size_t comma = v.find(',');
        if (comma == std::string::npos) {
            return false;
        }
        double lo = 0.0, hi = 0.0;
        if (!to_double(trim(v.substr(1, comma - 1)), lo) ||
            !to_double(trim(v.substr(comma + 1, v.size() - comma - 2)), hi)) {
            return false;
        }
        out = {lo, hi, v.front() == '[', v.back() == ']'};
        return true;
    }

    bool to_times(const std::string& value, std::vector<double>& out) {
        out.clear();
        std::string item;
        std::istringstream stream(value);
        while (stream >> item) {
            if (!item.empty() && item.back() == ',') {
                item.pop_back();
            }
            if (item.empty()) {
                continue;
            }
            double t = 0.0;
            if (!to_double(item, t)) {
                return false;
            }
            out.push_back(t);
        }
        return !out.empty();
    }

    void set_key(const std::string& section, const std::string& key, const std::string& value,
                 int line) {
        auto number = [&](double& slot) {
            double v;
            if (to_double(value, v)) {
                slot = v;
            } else {
                fail(line, "expected a number for '" + key + "', got '" + value + "'");
            }
        };
        auto integer = [&](int& slot) {
            int v;
            if (to_int(value, v)) {
                slot = v;
            } else {
                fail(line, "expected an integer for '" + key + "', got '" + value + "'");
            }
        };
        auto optional_price = [&](std::optional<double>& slot) {
            if (trim(value) == "none") {
                slot.reset();
                return;
            }
            double v;
            if (to_double(value, v)) {
                slot = v;
            } else {
                fail(line, "expected a price or 'none' for '" + key + "'");
            }
        };
        auto window = [&](TimeWindow& slot) {
            if (!to_window(value, slot)) {
                fail(line, "expected a window like '(3, 5]' or 'none' for '" + key + "'");
            }
        };

        if (section == "contract") {
            auto& c = config_.contract;
            if (key == "face_value") {
                number(c.face_value);
            } else if (key == "coupon_amount") {
                number(c.coupon_amount);
            } else if (key == "coupon_times") {
                if (!to_times(value, c.coupon_times)) {
                    fail(line, "expected a list of times for 'coupon_times'");
                }
            } else if (key == "conversion_ratio") {
                number(c.conversion_ratio);
            } else if (key == "clean_call_price") {
                optional_price(c.clean_call_price);
            } else if (key == "call_window") {
                window(c.call_window);
            } else if (key == "clean_put_price") {
                optional_price(c.clean_put_price);
            } else if (key == "put_window") {
                window(c.put_window);
            } else if (key == "maturity") {
                number(c.maturity);
            } else {
                fail(line, "unknown key '" + key + "' in [contract]");
            }
        } else if (section == "market") {
            auto& m = config_.market;
            if (key == "risk_free_rate") {
                number(m.risk_free_rate);
            } else if (key == "credit_spread") {
                number(m.credit_spread);
            } else if (key == "volatility") {
                number(m.volatility);
            } else if (key == "initial_stock_price") {
                number(m.initial_stock_price);
            } else {
                fail(line, "unknown key '" + key + "' in [market]");
            }
        } else if (section == "numerics") {
            auto& n = config_.numerics;
            if (key == "x_min") {
                number(n.x_min);
            } else if (key == "x_max") {
                number(n.x_max);
            } else if (key == "n_elements") {
                integer(n.n_elements);
            } else if (key == "element_order") {
                const std::string v = trim(value);
                if (v == "p1" || v == "P1") {
                    n.order = ElementOrder::p1;
                } else if (v == "p2" || v == "P2") {
                    n.order = ElementOrder::p2;
                } else {
                    fail(line, "element_order must be 'p1' or 'p2'");
                }
            } else if (key == "n_time_steps") {
                integer(n.n_time_steps);
            } else if (key == "theta") {
                number(n.theta);
            } else if (key == "penalty_rho") {
                number(n.penalty_rho);
            } else if (key == "newton_tol") {
                number(n.newton_tol);
            } else if (key == "newton_max_iter") {
                integer(n.newton_max_iter);
            } else {
                fail(line, "unknown key '" + key + "' in [numerics]");
            }
        } else {
            fail(line, "key '" + key + "' outside any known section");
        }
    }

    void parse(const std::string& text) {
        std::istringstream stream(text);
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(stream, raw)) {
            ++line;
            const size_t hash = raw.find('#');
            std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (s.empty()) {
                continue;
            }
            if (s.front() == '[') {
                if (s.back() != ']') {
                    fail(line, "unterminated section header");
                    continue;
                }
                section = trim(s.substr(1, s.size() - 2));
                if (section != "contract" && section != "market" && section != "numerics") {
                    fail(line, "unknown section [" + section + "]");
                    section.clear();
                }
                continue;
            }
            const size_t eq = s.find('=');
            if (eq == std::string::npos) {
                fail(line, "expected 'key = value', got '" + s + "'");
                continue;
            }
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty() || value.empty()) {
                fail(line, "empty key or value");
                continue;
            }
            if (section.empty()) {
                fail(line, "key '" + key + "' outside any known section");
                continue;
            }
            set_key(section, key, value, line);
        }
    }

    void finalize() {
        auto collect = [&](const auto& validatable, const char* where) {
            try {
                validatable.validate();
            } catch (const ConfigError& e) {
                for (const auto& issue : e.issues()) {
                    issues_.push_back(std::string(where) + ": " + issue);
                }
            }
        };
        collect(config_.contract, "[contract]");
        collect(config_.market, "[market]");

        const auto& n = config_.numerics;
        if (!std::isfinite(n.x_min) || !std::isfinite(n.x_max) || n.x_min >= n.x_max) {
            issues_.push_back("[numerics]: need finite x_min < x_max");
        }
        if (n.n_elements < 2) {
            issues_.push_back("[numerics]: n_elements must be at least 2");
        }
        if (n.n_time_steps < 1) {
            issues_.push_back("[numerics]: n_time_steps must be at least 1");
        }
        if (n.theta < 0.0 || n.theta > 1.0) {
            issues_.push_back("[numerics]: theta must lie in [0, 1]");
        }
        if (!(n.penalty_rho > 0.0)) {
            issues_.push_back("[numerics]: penalty_rho must be positive");
        }
        if (!(n.newton_tol > 0.0)) {
            issues_.push_back("[numerics]: newton_tol must be positive");
        }
        if (n.newton_max_iter < 1) {
            issues_.push_back("[numerics]: newton_max_iter must be at least 1");
        }
        if (!issues_.empty()) {
            throw ConfigError(std::move(issues_));
        }
    }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    Parser parser(text);
    return parser.take();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot open config file '" + path + "'"});
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace cbfem
