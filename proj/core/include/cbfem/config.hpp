#pragma once

#include <string>
#include <vector>

#include "cbfem/contracts.hpp"
#include "cbfem/mesh.hpp"

namespace cbfem {

struct Numerics {
    double x_min = -6.0;
    double x_max = 2.0;
    int n_elements = 400;
    ElementOrder order = ElementOrder::p2;
    int n_time_steps = 400;
    double theta = 0.5;
    double penalty_rho = 1e12;
    double newton_tol = 1e-12;
    int newton_max_iter = 100;
};

enum class OutputFormat { csv, json };

struct RunConfig {
    BondContract contract;
    MarketParams market;
    Numerics numerics;

    // Set by the command line, not by the config file.
    std::string command;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
    std::vector<int> n_elements_list = {100, 200, 400, 600, 800, 1000, 1200};
};

/// Builds the benchmark defaults: 5y bond, face 100, 4.0 semiannual
/// coupons, conversion ratio 1, call 110 on (3, 5], put 105 on (2, 3],
/// r = 5%, credit spread 2%, sigma = 20%, S_int = 100.
RunConfig default_config();

/// Parses key-value sections ([contract], [market], [numerics]) over the
/// defaults. Strict: unknown keys, malformed values, and violated
/// invariants are all collected and thrown together as ConfigError with
/// line-anchored messages. An empty text yields default_config().
RunConfig parse_config(const std::string& text);

/// parse_config applied to the contents of a file.
RunConfig load_config(const std::string& path);

}  // namespace cbfem
