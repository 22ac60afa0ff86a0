// The radial ODE on the cylinder for sigma_k-Yamabe metrics, its
// conserved quantity h, special solutions, and periodic-orbit tools.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmak::delaunay {

// Cone-guard floor on 1 - a^2 (p/u)^2.  The second-derivative formula
// carries this factor to a negative power; we abort rather than
// extrapolate across the ellipticity boundary.
inline constexpr double kConeEps = 1e-10;

struct OdeParams {
    int n;
    int k;

    double a() const { return 2.0 / double(n - 2); }
    // Normalized right-hand constant binom(n,k) (1/2)^k of the curvature
    // equation.
    double c_norm() const;

    // n >= 3, 1 <= k <= n/2 (k = n/2 admits only the algebraic
    // Hamiltonian and the conic formula).
    void validate() const;
    // Orbit machinery additionally needs k < n/2.
    void validate_subcritical() const;
};

struct DelaunayState {
    double t;
    double u;
    double p;  // u_t
};

// Thrown when the flow reaches the boundary of the Garding cone, where
// the equation degenerates; carries the offending cylinder coordinate
// (NaN when not tied to a specific t).
class singularity_error : public std::runtime_error {
  public:
    singularity_error(const std::string& what, double t_at);
    double t() const { return t_; }

  private:
    double t_;
};

struct Trajectory {
    OdeParams params;
    std::vector<DelaunayState> samples;  // strictly increasing t
    double h0;
    double max_drift;
};

// Conserved quantity h = [1 - u^{-4k/(n-2)}(1 - a^2 (p/u)^2)^k] u^{2n/(n-2)}.
// Purely algebraic; no cone restriction.
double hamiltonian(double u, double p, const OdeParams& params);

// Second derivative u_tt solved from the curvature equation (explicit
// closed form).  Requires the cone guard 1 - a^2 (p/u)^2 >= kConeEps.
double u_tt(double u, double p, const OdeParams& params);

// Signed residual of the curvature equation: 1/2 minus the right-hand
// side evaluated at (u, p, utt).
double ode_residual(double u, double p, double utt, const OdeParams& params);

struct CylinderConstant {
    double c_cyl;  // ((n-2k)/n)^{(n-2)/(4k)}
    double h_cyl;  // hamiltonian(c_cyl, 0) < 0
};
CylinderConstant cylinder_constant(const OdeParams& params);

struct RootPair {
    double u_min;
    double u_max;
};
// The two p = 0 level-set solutions of hamiltonian(u, 0) = h for
// h in (h_cyl, 0), bracketed around c_cyl and bisected.
RootPair roots_for_h(double h, const OdeParams& params);

// Adaptive Dormand-Prince 5(4) integration of (u, p)' = (p, u_tt) with
// PI step-size control and quartic dense output at the requested
// sampling step.  Backward spans are allowed; samples are returned in
// increasing t either way.
Trajectory integrate(const DelaunayState& state0, double t_end, double tol,
                     const OdeParams& params, double output_step);

// Single-state flow endpoint (no intermediate samples kept).
DelaunayState flow_to(const DelaunayState& state0, double t_target, double tol,
                      const OdeParams& params);

// Period T(h) of the closed orbit through (u_max(h), 0): integrate,
// locate two consecutive zeros of p by sign change plus bisection on
// the dense interpolant, return twice their distance.
double period(double h, const OdeParams& params, double tol);

struct SpherePoint {
    double u;
    double p;
};
// The h = 0 solution u(t) = cosh(t)^{-(n-2)/2} and its derivative.
SpherePoint sphere_solution(double t, int n);

// Limit Hamiltonian of the conic model u = e^{-(1+beta1)t} at n = 4,
// k = 2:  -beta1^2 (2 + beta1)^2 for beta1 in [-1, 0].
double conic_h(double beta1);

// CSV export, columns t,u,u_t,h_drift.
void export_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace sigmak::delaunay
