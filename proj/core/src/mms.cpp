#include "cbfem/mms.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "cbfem/analytics.hpp"
#include "cbfem/assembly.hpp"
#include "cbfem/banded.hpp"
#include "cbfem/tf_system.hpp"

namespace cbfem {

namespace {

constexpr double kGaussNode = 0.7745966692414834;
constexpr std::array<double, 3> kGaussXi = {-kGaussNode, 0.0, kGaussNode};
constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

struct ExactTerms {
    double growth;         // S_int^2 sqrt(S_int), coefficient of e^{2.5 x}
    double discount;       // F sqrt(S_int) e^{-r tau}, coefficient of e^{0.5 x}
};

ExactTerms exact_terms(const MmsCase& c, double tau) {
    const double root_s = std::sqrt(c.market.initial_stock_price);
    return {c.market.initial_stock_price * c.market.initial_stock_price * root_s,
            c.face_value * root_s * std::exp(-c.market.risk_free_rate * tau)};
}

}  // namespace

ValuePair mms_exact(const MmsCase& c, double x, double tau) {
    const ExactTerms t = exact_terms(c, tau);
    const double u = t.growth * std::exp(2.5 * x) - t.discount * std::exp(0.5 * x);
    return {u, u + x * x * tau};
}

Forcing mms_forcing(const MmsCase& c, double x, double tau) {
    const double r = c.market.risk_free_rate;
    const double rc = c.market.credit_spread;
    const double eps = 0.5 * c.market.volatility * c.market.volatility;
    const double a = r - eps;
    const ExactTerms t = exact_terms(c, tau);

    // Substituting the exact fields: the e^{2.5x} and e^{0.5x} parts share
    // one coefficient each across both equations; the x^2 tau extension
    // appears only through f2.
    const double growth_coeff = r + rc - 6.25 * eps - 2.5 * a;
    const double discount_coeff = 0.25 * eps + 0.5 * a - rc;
    const double common =
        growth_coeff * t.growth * std::exp(2.5 * x) + discount_coeff * t.discount * std::exp(0.5 * x);

    Forcing f;
    f.f1 = common + rc * x * x * tau;
    f.f2 = common + x * x - 2.0 * eps * tau - 2.0 * a * x * tau + (r + rc) * x * x * tau;
    return f;
}

MmsRecord mms_run(const MmsCase& c, ElementOrder order, int n_elements, int n_time_steps,
                  double theta, double tau_end) {
    if (n_time_steps < 1 || !(tau_end > 0.0) || tau_end > 1.0) {
        throw std::invalid_argument("mms_run: need n_time_steps >= 1 and tau_end in (0, 1]");
    }
    c.market.validate();

    const Mesh mesh = build_mesh(0.0, 1.0, n_elements, order);
    const GlobalOperators ops = assemble(mesh);
    const ThetaSystem sys = build_theta_system(ops, c.market, theta, tau_end / n_time_steps);
    const BandedLU lu11(sys.a11), lu22(sys.a22);
    const double dtau = sys.dtau;
    const int n = ops.n;
    const double r = c.market.risk_free_rate;
    const double rc = c.market.credit_spread;
    const double eps = 0.5 * c.market.volatility * c.market.volatility;
    const double drift = r - eps;

    // Nodal start from the exact initial data.
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        const ValuePair w = mms_exact(c, mesh.nodes[i + 1], 0.0);
        u[i] = w.cb;
        v[i] = w.cocb;
    }
    ValuePair left = mms_exact(c, 0.0, 0.0);
    ValuePair right = mms_exact(c, 1.0, 0.0);

    // Gauss load vectors of the forcing at one time level.
    auto load_vectors = [&](double tau, std::vector<double>& load1, std::vector<double>& load2) {
        load1.assign(n, 0.0);
        load2.assign(n, 0.0);
        const int last = static_cast<int>(mesh.nodes.size()) - 1;
        for (int e = 0; e < mesh.n_elements; ++e) {
            const double xm = mesh.x_min + (e + 0.5) * mesh.h;
            for (int g = 0; g < 3; ++g) {
                const double x = xm + 0.5 * mesh.h * kGaussXi[g];
                const double w = 0.5 * mesh.h * kGaussW[g];
                const Forcing f = mms_forcing(c, x, tau);
                const auto psi = basis_values(mesh, e, x);
                for (int local = 0; local < mesh.nodes_per_element(); ++local) {
                    const int gnode = mesh.global_node(e, local);
                    if (gnode == 0 || gnode == last) {
                        continue;
                    }
                    load1[gnode - 1] += w * f.f1 * psi[local];
                    load2[gnode - 1] += w * f.f2 * psi[local];
                }
            }
        }
    };

    auto boundary_terms = [&](std::vector<double>& rhs, double ul, double ur, double scale,
                              bool u_field, double vl, double vr) {
        ops.stiffness_bc.accumulate(rhs, ul, ur, scale * eps);
        ops.convection_bc.accumulate(rhs, ul, ur, scale * drift);
        if (u_field) {
            ops.mass_bc.accumulate(rhs, ul, ur, scale * r);
            ops.mass_bc.accumulate(rhs, vl, vr, scale * rc);
        } else {
            ops.mass_bc.accumulate(rhs, ul, ur, scale * (r + rc));
        }
    };

    std::vector<double> per_level_error;
    per_level_error.reserve(n_time_steps);
    std::vector<double> load1, load2;
    std::vector<double> full(mesh.nodes.size());

    for (int m = 0; m < n_time_steps; ++m) {
        const double tau_new = (m + 1) * dtau;
        const ValuePair left_new = mms_exact(c, 0.0, tau_new);
        const ValuePair right_new = mms_exact(c, 1.0, tau_new);
        load_vectors(tau_new, load1, load2);

        std::vector<double> rhs_v = sys.at22.multiply(v);
        boundary_terms(rhs_v, left_new.cocb, right_new.cocb, -theta * dtau, false, 0.0, 0.0);
        boundary_terms(rhs_v, left.cocb, right.cocb, -(1.0 - theta) * dtau, false, 0.0, 0.0);
        ops.mass_bc.accumulate(rhs_v, left.cocb, right.cocb, 1.0);
        ops.mass_bc.accumulate(rhs_v, left_new.cocb, right_new.cocb, -1.0);
        for (int i = 0; i < n; ++i) {
            rhs_v[i] += dtau * load2[i];
        }
        std::vector<double> v_new = lu22.solve(rhs_v);

        std::vector<double> rhs_u = sys.at11.multiply(u);
        {
            const std::vector<double> coupling_old = sys.at12.multiply(v);
            const std::vector<double> coupling_new = sys.a12.multiply(v_new);
            for (int i = 0; i < n; ++i) {
                rhs_u[i] += coupling_old[i] - coupling_new[i];
            }
        }
        boundary_terms(rhs_u, left_new.cb, right_new.cb, -theta * dtau, true, left_new.cocb,
                       right_new.cocb);
        boundary_terms(rhs_u, left.cb, right.cb, -(1.0 - theta) * dtau, true, left.cocb,
                       right.cocb);
        ops.mass_bc.accumulate(rhs_u, left.cb, right.cb, 1.0);
        ops.mass_bc.accumulate(rhs_u, left_new.cb, right_new.cb, -1.0);
        for (int i = 0; i < n; ++i) {
            rhs_u[i] += dtau * load1[i];
        }
        u = lu11.solve(rhs_u);
        v = std::move(v_new);
        left = left_new;
        right = right_new;

        full.front() = left.cb;
        std::copy(u.begin(), u.end(), full.begin() + 1);
        full.back() = right.cb;
        per_level_error.push_back(
            error_l2(mesh, full, [&](double x) { return mms_exact(c, x, tau_new).cb; }));
    }

    MmsRecord rec;
    rec.h = mesh.h;
    rec.dtau = dtau;
    rec.err_l2 = per_level_error.back();
    rec.err_linf_l2 = error_linf_l2(per_level_error);
    return rec;
}

MmsSweep mms_temporal_sweep(const MmsCase& c, ElementOrder order, int n_elements,
                            const std::vector<int>& time_steps, double theta) {
    MmsSweep sweep;
    std::vector<double> e1, e2, dts;
    for (int nt : time_steps) {
        const MmsRecord rec = mms_run(c, order, n_elements, nt, theta);
        sweep.records.push_back(rec);
        e1.push_back(rec.err_l2);
        e2.push_back(rec.err_linf_l2);
        dts.push_back(rec.dtau);
    }
    sweep.order_l2 = convergence_order(e1, dts);
    sweep.order_linf_l2 = convergence_order(e2, dts);
    return sweep;
}

MmsSweep mms_spatial_sweep(const MmsCase& c, ElementOrder order,
                           const std::vector<int>& element_counts, int n_time_steps, double theta) {
    MmsSweep sweep;
    std::vector<double> e1, e2, hs;
    for (int ne : element_counts) {
        const MmsRecord rec = mms_run(c, order, ne, n_time_steps, theta);
        sweep.records.push_back(rec);
        e1.push_back(rec.err_l2);
        e2.push_back(rec.err_linf_l2);
        hs.push_back(rec.h);
    }
    sweep.order_l2 = convergence_order(e1, hs);
    sweep.order_linf_l2 = convergence_order(e2, hs);
    return sweep;
}

}  // namespace cbfem
