#include "sigmak/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "sigmak/numeric.hpp"

namespace sigmak::delaunay {

namespace {

double cone_factor(double u, double p, const OdeParams& params) {
    const double w = p / u;
    return 1.0 - params.a() * params.a() * w * w;
}

void check_state(double u, double p, const OdeParams& params, double t_at) {
    if (!(u > 0.0)) throw std::domain_error("DelaunayState: u must be positive");
    if (cone_factor(u, p, params) < kConeEps)
        throw singularity_error("cone guard tripped at the ellipticity boundary",
                                t_at);
}

}  // namespace

double OdeParams::c_norm() const {
    return binomial(n, k) * std::pow(0.5, double(k));
}

void OdeParams::validate() const {
    if (n < 3) throw std::domain_error("OdeParams: n must be >= 3");
    if (k < 1 || 2 * k > n)
        throw std::domain_error("OdeParams: k must satisfy 1 <= k <= n/2");
}

void OdeParams::validate_subcritical() const {
    validate();
    if (2 * k >= n)
        throw std::domain_error("OdeParams: orbit machinery needs k < n/2");
}

singularity_error::singularity_error(const std::string& what, double t_at)
    : std::runtime_error(what), t_(t_at) {}

double hamiltonian(double u, double p, const OdeParams& params) {
    params.validate();
    if (!(u > 0.0)) throw std::domain_error("hamiltonian: u must be positive");
    const int n = params.n, k = params.k;
    const double s = cone_factor(u, p, params);
    // Expanded form of [1 - u^{-4k/(n-2)} s^k] u^{2n/(n-2)}; avoids the
    // large intermediate u^{-4k/(n-2)} deep in the orbit.
    return std::pow(u, 2.0 * n / double(n - 2)) -
           std::pow(s, double(k)) * std::pow(u, (2.0 * n - 4.0 * k) / double(n - 2));
}

double u_tt(double u, double p, const OdeParams& params) {
    params.validate();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    check_state(u, p, params, nan);
    const int n = params.n, k = params.k;
    const double a = params.a();
    const double w = p / u;
    const double s = 1.0 - a * a * w * w;
    const double bracket =
        0.5 * std::pow(u, 4.0 * k / double(n - 2)) * std::pow(s, 1.0 - double(k)) -
        w * w * (2.0 * k / (double(n) * (n - 2)) -
                 (n - 2.0 * k) / (2.0 * n) * a * a) +
        double(k) / n - 0.5;
    return -u * (double(n) * (n - 2) / (2.0 * k)) * bracket;
}

double ode_residual(double u, double p, double utt, const OdeParams& params) {
    params.validate();
    if (!(u > 0.0)) throw std::domain_error("ode_residual: u must be positive");
    const int n = params.n, k = params.k;
    const double a = params.a();
    const double w = p / u;
    const double s = 1.0 - a * a * w * w;
    const double rhs = std::pow(s, double(k) - 1.0) *
                       (double(k) / n * a * (-utt / u + w * w) +
                        (0.5 - double(k) / n) * s) *
                       std::pow(u, -4.0 * k / double(n - 2));
    return 0.5 - rhs;
}

CylinderConstant cylinder_constant(const OdeParams& params) {
    params.validate_subcritical();
    const double ratio = (params.n - 2.0 * params.k) / double(params.n);
    const double c = std::pow(ratio, (params.n - 2.0) / (4.0 * params.k));
    return CylinderConstant{c, hamiltonian(c, 0.0, params)};
}

RootPair roots_for_h(double h, const OdeParams& params) {
    params.validate_subcritical();
    const auto cyl = cylinder_constant(params);
    if (!(h > cyl.h_cyl) || !(h < 0.0)) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "roots_for_h: h must lie in (%.17g, 0)",
                      cyl.h_cyl);
        throw std::domain_error(msg);
    }
    const auto phi = [&](double u) { return hamiltonian(u, 0.0, params) - h; };
    const double delta = 1e-8;
    const double u_min = bisect(phi, delta, cyl.c_cyl, 1e-13);
    const double u_max = bisect(phi, cyl.c_cyl, 1.0, 1e-13);
    return RootPair{u_min, u_max};
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0,
                 A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0,
                 A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
// Dense-output weights of the standard quartic continuous extension.
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

struct Vec2 {
    double u, p;
};

struct DenseSegment {
    double t0, h;
    // Nested-polynomial coefficients, per component.
    Vec2 c1, c2, c3, c4, c5;

    Vec2 eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec2 r;
        r.u = c1.u + th * (c2.u + th1 * (c3.u + th * (c4.u + th1 * c5.u)));
        r.p = c1.p + th * (c2.p + th1 * (c3.p + th * (c4.p + th1 * c5.p)));
        return r;
    }
};

class Stepper {
  public:
    Stepper(const OdeParams& params, double tol)
        : params_(params), atol_(tol), rtol_(tol) {}

    void start(const DelaunayState& s0, double direction) {
        t_ = s0.t;
        y_ = Vec2{s0.u, s0.p};
        check_state(y_.u, y_.p, params_, t_);
        k1_ = rhs(y_);
        dir_ = direction;
        h_ = 0.01 * dir_;
        facold_ = 1e-4;
        ham_ = hamiltonian(y_.u, y_.p, params_);
    }

    double t() const { return t_; }
    const Vec2& y() const { return y_; }
    const DenseSegment& segment() const { return seg_; }

    // Advance by one accepted step, not beyond t_limit.
    void step(double t_limit) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            if (dir_ * (t_ + h_ - t_limit) > 0.0) h_ = t_limit - t_;
            bool ok = true;
            Vec2 k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y5{};
            double err = 0.0, ham5 = 0.0;
            try {
                const double h = h_;
                k2 = rhs({y_.u + h * A21 * k1_.u, y_.p + h * A21 * k1_.p});
                k3 = rhs({y_.u + h * (A31 * k1_.u + A32 * k2.u),
                          y_.p + h * (A31 * k1_.p + A32 * k2.p)});
                k4 = rhs({y_.u + h * (A41 * k1_.u + A42 * k2.u + A43 * k3.u),
                          y_.p + h * (A41 * k1_.p + A42 * k2.p + A43 * k3.p)});
                k5 = rhs({y_.u + h * (A51 * k1_.u + A52 * k2.u + A53 * k3.u +
                                      A54 * k4.u),
                          y_.p + h * (A51 * k1_.p + A52 * k2.p + A53 * k3.p +
                                      A54 * k4.p)});
                k6 = rhs({y_.u + h * (A61 * k1_.u + A62 * k2.u + A63 * k3.u +
                                      A64 * k4.u + A65 * k5.u),
                          y_.p + h * (A61 * k1_.p + A62 * k2.p + A63 * k3.p +
                                      A64 * k4.p + A65 * k5.p)});
                y5 = Vec2{y_.u + h * (B1 * k1_.u + B3 * k3.u + B4 * k4.u +
                                      B5 * k5.u + B6 * k6.u),
                          y_.p + h * (B1 * k1_.p + B3 * k3.p + B4 * k4.p +
                                      B5 * k5.p + B6 * k6.p)};
                k7 = rhs(y5);
                const double eu = h * (E1 * k1_.u + E3 * k3.u + E4 * k4.u +
                                       E5 * k5.u + E6 * k6.u + E7 * k7.u);
                const double ep = h * (E1 * k1_.p + E3 * k3.p + E4 * k4.p +
                                       E5 * k5.p + E6 * k6.p + E7 * k7.p);
                const double su =
                    atol_ + rtol_ * std::max(std::abs(y_.u), std::abs(y5.u));
                const double sp =
                    atol_ + rtol_ * std::max(std::abs(y_.p), std::abs(y5.p));
                err = std::sqrt(0.5 * ((eu / su) * (eu / su) + (ep / sp) * (ep / sp)));
                ham5 = hamiltonian(y5.u, y5.p, params_);
            } catch (const std::exception&) {
                // Trial state left the admissible region; treat as a
                // failed step and shrink.
                ok = false;
            }

            if (ok && err <= 1.0) {
                k3s_ = k3;
                k4s_ = k4;
                k5s_ = k5;
                k6s_ = k6;
                build_segment(y5, k7);
                // The embedded estimate controls the state error; the
                // conserved quantity needs its own guard because its
                // sensitivity to u blows up through deep necks, and the
                // drift is read off the dense output.  Keep the defect
                // across the whole segment below a slice of the budget
                // so the accumulated drift stays near tol per unit time.
                double defect = std::abs(ham5 - ham_);
                bool admissible = true;
                try {
                    for (double th : {0.25, 0.5, 0.75}) {
                        const Vec2 yy = seg_.eval(t_ + th * h_);
                        defect = std::max(
                            defect,
                            std::abs(hamiltonian(yy.u, yy.p, params_) - ham_));
                    }
                } catch (const std::exception&) {
                    admissible = false;
                }
                const double slice = std::max(
                    0.25 * atol_ * std::abs(h_), 1e-15 * (1.0 + std::abs(ham_)));
                if (!admissible) {
                    h_ *= 0.25;
                    continue;
                }
                if (defect > slice) {
                    h_ *= std::clamp(0.9 * std::pow(slice / defect, 0.2), 0.2, 0.9);
                    continue;
                }
                const double fac11 = std::pow(std::max(err, 1e-20), 0.17);
                double fac = fac11 / std::pow(facold_, 0.04);
                fac = std::clamp(fac / 0.9, 0.2, 10.0);
                facold_ = std::max(err, 1e-4);
                t_ = t_ + h_;
                y_ = y5;
                ham_ = ham5;
                k1_ = k7;  // first-same-as-last
                h_ = h_ / fac;
                return;
            }
            if (ok) {
                const double fac11 = std::pow(err, 0.17);
                h_ = h_ / std::min(10.0, fac11 / 0.9);
            } else {
                h_ *= 0.25;
            }
            if (std::abs(h_) < 1e-14)
                throw singularity_error(
                    "integration step underflow at the cone boundary", t_);
        }
        throw singularity_error("integration failed to take a step", t_);
    }

  private:
    Vec2 rhs(const Vec2& y) const {
        if (!(y.u > 0.0)) throw std::domain_error("flow left u > 0");
        return Vec2{y.p, delaunay::u_tt(y.u, y.p, params_)};
    }

    void build_segment(const Vec2& ynew, const Vec2& k7) {
        // Reconstruct k2..k6 is unnecessary: the dense weights use
        // k1, k3..k7, all captured during the step below.
        seg_.t0 = t_;
        seg_.h = h_;
        seg_.c1 = y_;
        seg_.c2 = Vec2{ynew.u - y_.u, ynew.p - y_.p};
        seg_.c3 = Vec2{h_ * k1_.u - seg_.c2.u, h_ * k1_.p - seg_.c2.p};
        seg_.c4 = Vec2{seg_.c2.u - h_ * k7.u - seg_.c3.u,
                       seg_.c2.p - h_ * k7.p - seg_.c3.p};
        seg_.c5 = Vec2{h_ * (D1 * k1_.u + D3 * k3s_.u + D4 * k4s_.u + D5 * k5s_.u +
                             D6 * k6s_.u + D7 * k7.u),
                       h_ * (D1 * k1_.p + D3 * k3s_.p + D4 * k4s_.p + D5 * k5s_.p +
                             D6 * k6s_.p + D7 * k7.p)};
    }

    OdeParams params_;
    double atol_, rtol_;
    double t_ = 0.0;
    Vec2 y_{};
    Vec2 k1_{};
    double dir_ = 1.0;
    double h_ = 0.01;
    double facold_ = 1e-4;
    double ham_ = 0.0;
    DenseSegment seg_{};
    // Stage snapshots for dense output, captured on step acceptance.
    Vec2 k3s_{}, k4s_{}, k5s_{}, k6s_{};
};

}  // namespace

Trajectory integrate(const DelaunayState& state0, double t_end, double tol,
                     const OdeParams& params, double output_step) {
    params.validate_subcritical();
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (!(output_step > 0.0))
        throw std::invalid_argument("integrate: output_step must be positive");
    const double span = t_end - state0.t;
    if (span == 0.0) throw std::invalid_argument("integrate: empty time span");
    const double dir = span > 0.0 ? 1.0 : -1.0;

    Trajectory traj;
    traj.params = params;
    traj.h0 = hamiltonian(state0.u, state0.p, params);
    traj.max_drift = 0.0;

    Stepper st(params, tol);
    st.start(state0, dir);

    std::vector<DelaunayState> out;
    out.push_back(state0);
    double next_out = state0.t + dir * output_step;
    const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));

    while (dir * (t_end - st.t()) > eps_t) {
        st.step(t_end);
        const auto& seg = st.segment();
        while (dir * (st.t() - next_out) >= -eps_t &&
               dir * (t_end - next_out) > eps_t) {
            const Vec2 y = seg.eval(next_out);
            out.push_back(DelaunayState{next_out, y.u, y.p});
            next_out += dir * output_step;
        }
    }
    out.push_back(DelaunayState{st.t(), st.y().u, st.y().p});

    for (const auto& s : out) {
        check_state(s.u, s.p, params, s.t);
        traj.max_drift = std::max(traj.max_drift,
                                  std::abs(hamiltonian(s.u, s.p, params) - traj.h0));
    }
    if (dir < 0.0) std::reverse(out.begin(), out.end());
    traj.samples = std::move(out);
    return traj;
}

DelaunayState flow_to(const DelaunayState& state0, double t_target, double tol,
                      const OdeParams& params) {
    if (t_target == state0.t) return state0;
    Stepper st(params, tol);
    const double dir = t_target > state0.t ? 1.0 : -1.0;
    st.start(state0, dir);
    const double eps_t = 1e-13 * std::max(1.0, std::abs(t_target));
    while (dir * (t_target - st.t()) > eps_t) st.step(t_target);
    return DelaunayState{t_target, st.y().u, st.y().p};
}

double period(double h, const OdeParams& params, double tol) {
    params.validate_subcritical();
    const auto roots = roots_for_h(h, params);  // validates h range
    Stepper st(params, tol);
    st.start(DelaunayState{0.0, roots.u_max, 0.0}, 1.0);

    double zeros[2] = {0.0, 0.0};
    int found = 0;
    double prev_t = 0.0;
    double prev_p = 0.0;  // starts exactly at a zero; track first nonzero sign
    int prev_sign = 0;
    const double t_cap = 1e4;
    while (found < 2) {
        st.step(t_cap);
        const double p_now = st.y().p;
        const int sign_now = (p_now > 0.0) - (p_now < 0.0);
        if (prev_sign != 0 && sign_now != 0 && sign_now != prev_sign) {
            // Bisect the dense interpolant for the crossing time.
            const auto& seg = st.segment();
            double lo = prev_t, hi = st.t();
            double flo = prev_p;
            if (flo == 0.0) {
                zeros[found++] = lo;
            } else {
                for (int i = 0; i < 200 && (hi - lo) > 1e-12; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = seg.eval(mid).p;
                    if ((fm > 0.0) == (flo > 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                zeros[found++] = 0.5 * (lo + hi);
            }
        }
        if (sign_now != 0) prev_sign = sign_now;
        prev_t = st.t();
        prev_p = p_now;
        if (st.t() >= t_cap)
            throw std::runtime_error("period: no return detected before t = 1e4");
    }
    return 2.0 * (zeros[1] - zeros[0]);
}

SpherePoint sphere_solution(double t, int n) {
    if (n < 3) throw std::domain_error("sphere_solution: n must be >= 3");
    const double m = 0.5 * double(n - 2);
    const double u = std::pow(std::cosh(t), -m);
    return SpherePoint{u, -m * std::tanh(t) * u};
}

double conic_h(double beta1) {
    if (!(beta1 >= -1.0) || !(beta1 <= 0.0))
        throw std::domain_error("conic_h: beta1 outside [-1, 0]");
    const double f = beta1 * (2.0 + beta1);
    return -f * f;
}

void export_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    char buf[96];
    out << "t,u,u_t,h_drift\n";
    for (const auto& s : traj.samples) {
        const double drift =
            std::abs(hamiltonian(s.u, s.p, traj.params) - traj.h0);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.u, s.p,
                      drift);
        out << buf;
    }
}

}  // namespace sigmak::delaunay
