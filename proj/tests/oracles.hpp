// Independent reference implementations used only by the tests: subset
// enumeration for elementary symmetric functions, closed-form cosh
// derivatives, a brute-force fixed-step RK4 integrator, and a numeric
// linearization of the radial flow.  Deliberately naive; nothing in the
// library may include this header.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sigmak/delaunay.hpp"

namespace oracles {

// sigma_k by literal subset sums over bitmasks.  Exponential cost.
inline double elem_sym_subsets(std::span<const double> lambda, int k) {
    const int n = int(lambda.size());
    if (n > 20) throw std::length_error("elem_sym_subsets: n too large");
    if (k == 0) return 1.0;
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != unsigned(k)) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= lambda[std::size_t(i)];
        total += prod;
    }
    return total;
}

// u = cosh(t)^{-m}, m = (n-2)/2, with its first two derivatives.
struct CoshJet {
    double u;
    double up;
    double upp;
};

inline CoshJet sphere_closed_form(double t, int n) {
    const double m = 0.5 * double(n - 2);
    const double c = std::cosh(t);
    const double s = std::sinh(t);
    CoshJet jet;
    jet.u = std::pow(c, -m);
    jet.up = -m * std::pow(c, -m - 1.0) * s;
    jet.upp = m * (m + 1.0) * std::pow(c, -m - 2.0) * s * s - m * jet.u;
    return jet;
}

// One classical RK4 step of (u, p)' = (p, u_tt).
inline std::array<double, 2> rk4_step(const std::array<double, 2>& y, double s,
                                      const sigmak::delaunay::OdeParams& params) {
    auto rhs = [&params](const std::array<double, 2>& z) {
        return std::array<double, 2>{z[1], sigmak::delaunay::u_tt(z[0], z[1], params)};
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs({y[0] + 0.5 * s * k1[0], y[1] + 0.5 * s * k1[1]});
    const auto k3 = rhs({y[0] + 0.5 * s * k2[0], y[1] + 0.5 * s * k2[1]});
    const auto k4 = rhs({y[0] + s * k3[0], y[1] + s * k3[1]});
    return {y[0] + s / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + s / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// Brute-force orbit period: fixed-step RK4 from (u_max(h), 0), twice the
// distance between the first two sign changes of p, each refined by
// bisection on the step fraction.
inline double rk4_period(double h, const sigmak::delaunay::OdeParams& params,
                         double dt) {
    const auto roots = sigmak::delaunay::roots_for_h(h, params);
    std::array<double, 2> y{roots.u_max, 0.0};
    double t = 0.0;
    std::vector<double> zeros;
    // Leave the starting zero of p behind before arming the detector.
    y = rk4_step(y, dt, params);
    t += dt;
    while (zeros.size() < 2) {
        if (t > 1e4) throw std::runtime_error("rk4_period: no return");
        const auto y2 = rk4_step(y, dt, params);
        if ((y[1] < 0.0) != (y2[1] < 0.0)) {
            double lo = 0.0, hi = dt;
            for (int i = 0; i < 60 && hi - lo > 1e-15; ++i) {
                const double mid = 0.5 * (lo + hi);
                const auto ym = rk4_step(y, mid, params);
                if ((y[1] < 0.0) != (ym[1] < 0.0))
                    hi = mid;
                else
                    lo = mid;
            }
            zeros.push_back(t + 0.5 * (lo + hi));
        }
        y = y2;
        t += dt;
    }
    return 2.0 * (zeros[1] - zeros[0]);
}

// Frequency^2 of the linearized radial flow at the constant solution,
// mu = -d(u_tt)/du at (c_cyl, 0), by central difference.
inline double linearization_mu(const sigmak::delaunay::OdeParams& params,
                               double d = 1e-6) {
    const auto cyl = sigmak::delaunay::cylinder_constant(params);
    const double fp = sigmak::delaunay::u_tt(cyl.c_cyl + d, 0.0, params);
    const double fm = sigmak::delaunay::u_tt(cyl.c_cyl - d, 0.0, params);
    return -(fp - fm) / (2.0 * d);
}

}  // namespace oracles
