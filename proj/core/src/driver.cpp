#include "cbfem/driver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "cbfem/analytics.hpp"
#include "cbfem/errors.hpp"
#include "cbfem/fdm.hpp"
#include "cbfem/mms.hpp"
#include "cbfem/stepper.hpp"

namespace cbfem {

namespace {

using nlohmann::json;
using Cell = std::variant<double, long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const Table& table, std::ostream& out) {
    for (size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out << ",";
            }
            if (const auto* d = std::get_if<double>(&row[c])) {
                out << format_double(*d);
            } else if (const auto* i = std::get_if<long>(&row[c])) {
                out << *i;
            } else {
                out << std::get<std::string>(row[c]);
            }
        }
        out << "\n";
    }
}

json window_json(const TimeWindow& w) {
    if (w.is_empty()) {
        return nullptr;
    }
    return {{"lo", w.lo}, {"hi", w.hi}, {"lo_inclusive", w.lo_inclusive},
            {"hi_inclusive", w.hi_inclusive}};
}

json config_json(const RunConfig& config) {
    const auto& c = config.contract;
    const auto& m = config.market;
    const auto& n = config.numerics;
    json j;
    j["contract"] = {{"face_value", c.face_value},
                     {"coupon_amount", c.coupon_amount},
                     {"coupon_times", c.coupon_times},
                     {"conversion_ratio", c.conversion_ratio},
                     {"clean_call_price", c.clean_call_price ? json(*c.clean_call_price) : json()},
                     {"call_window", window_json(c.call_window)},
                     {"clean_put_price", c.clean_put_price ? json(*c.clean_put_price) : json()},
                     {"put_window", window_json(c.put_window)},
                     {"maturity", c.maturity}};
    j["market"] = {{"risk_free_rate", m.risk_free_rate},
                   {"credit_spread", m.credit_spread},
                   {"volatility", m.volatility},
                   {"initial_stock_price", m.initial_stock_price}};
    j["numerics"] = {{"x_min", n.x_min},
                     {"x_max", n.x_max},
                     {"n_elements", n.n_elements},
                     {"element_order", n.order == ElementOrder::p1 ? "p1" : "p2"},
                     {"n_time_steps", n.n_time_steps},
                     {"theta", n.theta},
                     {"penalty_rho", n.penalty_rho},
                     {"newton_tol", n.newton_tol},
                     {"newton_max_iter", n.newton_max_iter}};
    return j;
}

void write_json(const Table& table, const RunConfig& config, std::ostream& out) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r;
        for (size_t c = 0; c < row.size(); ++c) {
            if (const auto* d = std::get_if<double>(&row[c])) {
                r[table.columns[c]] = *d;
            } else if (const auto* i = std::get_if<long>(&row[c])) {
                r[table.columns[c]] = *i;
            } else {
                r[table.columns[c]] = std::get<std::string>(row[c]);
            }
        }
        rows.push_back(std::move(r));
    }
    json doc = {{"command", config.command}, {"config", config_json(config)}, {"rows", rows}};
    out << doc.dump(2) << "\n";
}

void emit(const Table& table, const RunConfig& config, std::ostream& out) {
    if (!config.out_path.empty()) {
        std::ofstream file(config.out_path);
        if (!file) {
            throw std::runtime_error("cannot open output file '" + config.out_path + "'");
        }
        if (config.format == OutputFormat::csv) {
            write_csv(table, file);
        } else {
            write_json(table, config, file);
        }
        return;
    }
    if (config.format == OutputFormat::csv) {
        write_csv(table, out);
    } else {
        write_json(table, config, out);
    }
}

NewtonConfig newton_config(const RunConfig& config) {
    return {config.numerics.newton_tol, config.numerics.newton_max_iter,
            config.numerics.penalty_rho};
}

PriceSurface solve_fem(const RunConfig& config, ElementOrder order, int n_elements,
                       int n_time_steps) {
    const Mesh mesh = build_mesh(config.numerics.x_min, config.numerics.x_max, n_elements, order);
    return full_solve(mesh, config.contract, config.market, config.numerics.theta, n_time_steps,
                      newton_config(config));
}

PriceSurface solve_fdm(const RunConfig& config, int n_intervals, int n_time_steps) {
    const FdmGrid grid = build_fdm_grid(config.numerics.x_min, config.numerics.x_max, n_intervals);
    return fdm_solve(grid, config.contract, config.market, config.numerics.theta, n_time_steps,
                     newton_config(config));
}

int command_price(const RunConfig& config, std::ostream& out) {
    const PriceSurface surface = solve_fem(config, config.numerics.order,
                                           config.numerics.n_elements, config.numerics.n_time_steps);
    const double price = surface.price_at(0.0, config.market.initial_stock_price);
    out << "U(t=0, S=" << format_double(config.market.initial_stock_price)
        << ") = " << format_double(price) << "\n";

    json record = {{"command", "price"},
                   {"config", config_json(config)},
                   {"u_at_t0_s_int", price},
                   {"max_interior_newton_iterations", surface.stats.max_interior_newton_iterations},
                   {"max_call_violation", surface.stats.max_call_violation},
                   {"max_put_violation", surface.stats.max_put_violation}};
    if (!config.out_path.empty()) {
        std::ofstream file(config.out_path);
        if (!file) {
            throw std::runtime_error("cannot open output file '" + config.out_path + "'");
        }
        file << record.dump(2) << "\n";
    } else {
        out << record.dump(2) << "\n";
    }
    return 0;
}

int command_surface(const RunConfig& config, std::ostream& out) {
    const PriceSurface surface = solve_fem(config, config.numerics.order,
                                           config.numerics.n_elements, config.numerics.n_time_steps);
    Table table;
    table.columns = {"t", "s", "u", "v"};
    for (size_t level = 0; level < surface.taus.size(); ++level) {
        const double t = surface.maturity - surface.taus[level];
        for (size_t i = 0; i < surface.x.size(); ++i) {
            table.rows.push_back({t, surface.s[i], surface.u[level][i], surface.v[level][i]});
        }
    }
    emit(table, config, out);
    return 0;
}

int command_greeks(const RunConfig& config, std::ostream& out) {
    const ElementOrder order = config.numerics.order;
    const Mesh mesh =
        build_mesh(config.numerics.x_min, config.numerics.x_max, config.numerics.n_elements, order);
    const PriceSurface surface = full_solve(mesh, config.contract, config.market,
                                            config.numerics.theta, config.numerics.n_time_steps,
                                            newton_config(config));
    Table table;
    // P1 deltas live on element midpoints while P1 gammas live on nodes,
    // so the two carry their own stock-price columns.
    table.columns = {"t", "s_delta", "delta", "s_gamma", "gamma"};
    for (size_t level = 0; level < surface.taus.size(); ++level) {
        const double t = surface.maturity - surface.taus[level];
        const auto& row = surface.u[level];
        if (order == ElementOrder::p2) {
            for (int j = 1; j <= mesh.n_elements; ++j) {
                const GreekPoint g = delta_gamma_p2(mesh, row, config.market, j);
                table.rows.push_back({t, g.s, g.delta, g.s, g.gamma});
            }
        } else {
            for (int j = 2; j <= mesh.n_elements; ++j) {
                const GreekPoint d = delta_p1(mesh, row, config.market, j);
                const GreekPoint g = gamma_p1(mesh, row, config.market, j);
                table.rows.push_back({t, d.s, d.delta, g.s, g.gamma});
            }
        }
    }
    emit(table, config, out);
    return 0;
}

int command_converge(const RunConfig& config, std::ostream& out) {
    Table table;
    table.columns = {"n_elements", "p1_fem", "p2_fem", "fdm"};
    for (int n : config.n_elements_list) {
        const double s0 = config.market.initial_stock_price;
        const double p1 = solve_fem(config, ElementOrder::p1, n, n).price_at(0.0, s0);
        const double p2 = solve_fem(config, ElementOrder::p2, n, n).price_at(0.0, s0);
        const double fd = solve_fdm(config, n, n).price_at(0.0, s0);
        table.rows.push_back({static_cast<long>(n), p1, p2, fd});
    }
    emit(table, config, out);
    return 0;
}

int command_compare_fdm(const RunConfig& config, std::ostream& out) {
    Table table;
    table.columns = {"n_elements", "u_fem", "u_fdm", "abs_diff"};
    const double s0 = config.market.initial_stock_price;
    const int n = config.numerics.n_elements;
    const double fem =
        solve_fem(config, config.numerics.order, n, config.numerics.n_time_steps).price_at(0.0, s0);
    const double fd = solve_fdm(config, n, config.numerics.n_time_steps).price_at(0.0, s0);
    table.rows.push_back({static_cast<long>(n), fem, fd, std::abs(fem - fd)});
    emit(table, config, out);
    return 0;
}

int command_mms(const RunConfig& config, std::ostream& out) {
    MmsCase mms_case;
    mms_case.market = config.market;
    mms_case.face_value = config.contract.face_value;

    Table table;
    table.columns = {"study",    "element_order", "h",           "dtau",
                     "err_l2",   "err_linf_l2",   "order_l2",    "order_linf_l2"};

    // Temporal study: fixed h per order, one decade of dtau.
    const std::vector<int> temporal_steps = {4, 8, 16, 32, 40};
    struct TemporalCase {
        ElementOrder order;
        int n_elements;
        const char* label;
    };
    for (const auto& tc : {TemporalCase{ElementOrder::p1, 3333, "p1"},
                           TemporalCase{ElementOrder::p2, 1000, "p2"}}) {
        const MmsSweep sweep = mms_temporal_sweep(mms_case, tc.order, tc.n_elements, temporal_steps,
                                                  config.numerics.theta);
        for (const auto& rec : sweep.records) {
            table.rows.push_back({std::string("temporal"), std::string(tc.label), rec.h, rec.dtau,
                                  rec.err_l2, rec.err_linf_l2, sweep.order_l2,
                                  sweep.order_linf_l2});
        }
    }

    // Spatial study: fixed dtau = 1e-4, one decade of h per order.
    const int spatial_steps = 10000;
    const std::vector<int> p1_elements = {32, 64, 128, 256, 320};
    const std::vector<int> p2_elements = {10, 20, 40, 80, 100};
    for (const auto& [order, elems, label] :
         {std::tuple{ElementOrder::p1, p1_elements, "p1"},
          std::tuple{ElementOrder::p2, p2_elements, "p2"}}) {
        const MmsSweep sweep =
            mms_spatial_sweep(mms_case, order, elems, spatial_steps, config.numerics.theta);
        for (const auto& rec : sweep.records) {
            table.rows.push_back({std::string("spatial"), std::string(label), rec.h, rec.dtau,
                                  rec.err_l2, rec.err_linf_l2, sweep.order_l2,
                                  sweep.order_linf_l2});
        }
    }
    emit(table, config, out);
    return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "price") {
            return command_price(config, out);
        }
        if (config.command == "surface") {
            return command_surface(config, out);
        }
        if (config.command == "greeks") {
            return command_greeks(config, out);
        }
        if (config.command == "converge") {
            return command_converge(config, out);
        }
        if (config.command == "compare-fdm") {
            return command_compare_fdm(config, out);
        }
        if (config.command == "mms") {
            return command_mms(config, out);
        }
        throw std::runtime_error("unknown command '" + config.command + "'");
    } catch (const ConfigError& e) {
        json j = {{"error", "invalid configuration"}, {"issues", e.issues()}};
        err << j.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        json j = {{"error", e.what()}};
        err << j.dump(2) << "\n";
        return 1;
    }
}

}  // namespace cbfem
