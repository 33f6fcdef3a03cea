// Command-line driver for the convertible-bond pricing engine.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbfem/config.hpp"
#include "cbfem/driver.hpp"
#include "cbfem/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cbfem - convertible bond pricing with penalty finite elements"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::string order;
    int n_elements = -1;
    int n_time_steps = -1;
    double theta = -1.0;
    double rho = -1.0;
    std::vector<int> n_list;

    app.add_option("--config", config_path, "configuration file (empty: built-in defaults)");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--order", order, "element order override: p1 or p2")
        ->check(CLI::IsMember({"p1", "p2"}));
    app.add_option("--n-elements", n_elements, "element count override");
    app.add_option("--n-time-steps", n_time_steps, "time step count override");
    app.add_option("--theta", theta, "theta-scheme parameter override");
    app.add_option("--rho", rho, "penalty weight override");
    app.add_option("--n-list", n_list, "element counts for the converge command");

    app.add_subcommand("price", "bond value at t = 0, S = S_int");
    app.add_subcommand("surface", "full (t, S) price surface as CSV/JSON");
    app.add_subcommand("greeks", "delta and gamma from the FE solution");
    app.add_subcommand("converge", "price over a list of mesh sizes");
    app.add_subcommand("mms", "manufactured-solution error and order tables");
    app.add_subcommand("compare-fdm", "finite-element vs finite-difference price");

    CLI11_PARSE(app, argc, argv);

    cbfem::RunConfig config;
    try {
        config = config_path.empty() ? cbfem::default_config() : cbfem::load_config(config_path);
    } catch (const cbfem::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    config.command = app.get_subcommands().front()->get_name();
    config.out_path = out_path;
    config.format = format == "json" ? cbfem::OutputFormat::json : cbfem::OutputFormat::csv;
    if (!order.empty()) {
        config.numerics.order = order == "p1" ? cbfem::ElementOrder::p1 : cbfem::ElementOrder::p2;
    }
    if (n_elements > 0) {
        config.numerics.n_elements = n_elements;
    }
    if (n_time_steps > 0) {
        config.numerics.n_time_steps = n_time_steps;
    }
    if (theta >= 0.0) {
        config.numerics.theta = theta;
    }
    if (rho > 0.0) {
        config.numerics.penalty_rho = rho;
    }
    if (!n_list.empty()) {
        config.n_elements_list = n_list;
    }

    return cbfem::run(config, std::cout, std::cerr);
}
