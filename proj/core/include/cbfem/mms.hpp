#pragma once

#include <vector>

#include "cbfem/contracts.hpp"
#include "cbfem/mesh.hpp"

namespace cbfem {

/// Manufactured verification problem on x in [0, 1], tau in (0, 1]:
/// the linear two-field scheme (no penalty, no coupons) is forced so that
///   U = S_int^2 e^{2x} sqrt(S_int e^x) - F e^{-r tau} sqrt(S_int e^x)
///   V = U + x^2 tau
/// solve the modified equations exactly.
struct MmsCase {
    MarketParams market;
    double face_value = 100.0;
};

ValuePair mms_exact(const MmsCase& c, double x, double tau);

/// Forcing terms so the exact fields satisfy the two PDEs:
///   f1 = U_tau - s2/2 U_xx - (r - s2/2) U_x + r U + r_c V
///   f2 = V_tau - s2/2 V_xx - (r - s2/2) V_x + (r + r_c) V
struct Forcing {
    double f1 = 0.0;
    double f2 = 0.0;
};

Forcing mms_forcing(const MmsCase& c, double x, double tau);

struct MmsRecord {
    double h = 0.0;
    double dtau = 0.0;
    double err_l2 = 0.0;       // at the final time
    double err_linf_l2 = 0.0;  // max over levels
};

/// One forced linear solve with exact Dirichlet data at both ends;
/// n_time_steps spans tau in [0, tau_end].
MmsRecord mms_run(const MmsCase& c, ElementOrder order, int n_elements, int n_time_steps,
                  double theta = 0.5, double tau_end = 1.0);

struct MmsSweep {
    std::vector<MmsRecord> records;
    double order_l2 = 0.0;
    double order_linf_l2 = 0.0;
};

/// Error decay against dtau at fixed mesh width.
MmsSweep mms_temporal_sweep(const MmsCase& c, ElementOrder order, int n_elements,
                            const std::vector<int>& time_steps, double theta = 0.5);

/// Error decay against h at fixed dtau.
MmsSweep mms_spatial_sweep(const MmsCase& c, ElementOrder order,
                           const std::vector<int>& element_counts, int n_time_steps,
                           double theta = 0.5);

}  // namespace cbfem
