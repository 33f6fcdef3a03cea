#include "cbfem/analytics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace cbfem {

namespace {

// 3-point Gauss-Legendre rule on [-1, 1].
constexpr double kGaussNode = 0.7745966692414834;  // sqrt(3/5)
constexpr std::array<double, 3> kGaussXi = {-kGaussNode, 0.0, kGaussNode};
constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

void check_coeffs(const Mesh& mesh, std::span<const double> all_coeffs) {
    if (all_coeffs.size() != mesh.nodes.size()) {
        throw std::invalid_argument("analytics: coefficient count does not match the mesh");
    }
}

}  // namespace

GreekPoint delta_p1(const Mesh& mesh, std::span<const double> all_coeffs,
                    const MarketParams& market, int j) {
    check_coeffs(mesh, all_coeffs);
    if (mesh.order != ElementOrder::p1 || j < 1 || j > mesh.n_elements) {
        throw std::out_of_range("delta_p1: element index out of range");
    }
    const double x_mid = mesh.x_min + (j - 0.5) * mesh.h;
    const double s_mid = market.initial_stock_price * std::exp(x_mid);
    GreekPoint g;
    g.s = s_mid;
    g.delta = market.initial_stock_price * (all_coeffs[j] - all_coeffs[j - 1]) / (mesh.h * s_mid);
    return g;
}

GreekPoint gamma_p1(const Mesh& mesh, std::span<const double> all_coeffs,
                    const MarketParams& market, int j) {
    check_coeffs(mesh, all_coeffs);
    if (mesh.order != ElementOrder::p1 || j < 2 || j > mesh.n_elements) {
        throw std::out_of_range("gamma_p1: node index out of range");
    }
    const double x = mesh.x_min + (j - 1) * mesh.h;
    const double s = market.initial_stock_price * std::exp(x);
    const double second = all_coeffs[j] - 2.0 * all_coeffs[j - 1] + all_coeffs[j - 2];
    GreekPoint g;
    g.s = s;
    g.gamma = market.initial_stock_price * market.initial_stock_price * second /
              (mesh.h * mesh.h * s * s);
    return g;
}

GreekPoint delta_gamma_p2(const Mesh& mesh, std::span<const double> all_coeffs,
                          const MarketParams& market, int j) {
    check_coeffs(mesh, all_coeffs);
    if (mesh.order != ElementOrder::p2 || j < 1 || j > mesh.n_elements) {
        throw std::out_of_range("delta_gamma_p2: element index out of range");
    }
    const double x_mid = mesh.x_min + (j - 0.5) * mesh.h;
    const double s = market.initial_stock_price * std::exp(x_mid);
    const double left = all_coeffs[2 * j - 2];
    const double mid = all_coeffs[2 * j - 1];
    const double right = all_coeffs[2 * j];
    GreekPoint g;
    g.s = s;
    g.delta = market.initial_stock_price * (right - left) / (mesh.h * s);
    g.gamma = 4.0 * market.initial_stock_price * market.initial_stock_price *
              (right - 2.0 * mid + left) / (mesh.h * mesh.h * s * s);
    return g;
}

double error_l2(const Mesh& mesh, std::span<const double> all_coeffs,
                const std::function<double(double)>& exact) {
    check_coeffs(mesh, all_coeffs);
    double sum = 0.0;
    for (int e = 0; e < mesh.n_elements; ++e) {
        const double xl = mesh.x_min + e * mesh.h;
        const double xm = xl + 0.5 * mesh.h;
        for (int g = 0; g < 3; ++g) {
            const double x = xm + 0.5 * mesh.h * kGaussXi[g];
            const auto psi = basis_values(mesh, e, x);
            double uh = 0.0;
            for (int local = 0; local < mesh.nodes_per_element(); ++local) {
                uh += all_coeffs[mesh.global_node(e, local)] * psi[local];
            }
            const double diff = uh - exact(x);
            sum += kGaussW[g] * diff * diff;
        }
    }
    return std::sqrt(0.5 * mesh.h * sum);
}

double error_linf_l2(std::span<const double> per_level_l2) {
    if (per_level_l2.empty()) {
        throw std::invalid_argument("error_linf_l2: empty history");
    }
    double m = 0.0;
    for (double e : per_level_l2) {
        m = std::max(m, e);
    }
    return m;
}

double convergence_order(std::span<const double> errors, std::span<const double> steps) {
    if (errors.size() != steps.size() || errors.size() < 2) {
        throw std::invalid_argument("convergence_order: need at least two (error, step) pairs");
    }
    const size_t n = errors.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) {
            throw std::invalid_argument("convergence_order: errors and steps must be positive");
        }
        const double lx = std::log(steps[i]);
        const double ly = std::log(errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw std::invalid_argument("convergence_order: steps must not be all equal");
    }
    return (n * sxy - sx * sy) / denom;
}

}  // namespace cbfem
