// The dilational Pohozaev invariant D_k: surface quadrature over
// cylinder cross-sections, the radial closed expression, the h-linear
// closed form, and the puncture-sum identity.
#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sigmak/delaunay.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/gridfield.hpp"
#include "sigmak/numeric.hpp"

namespace sigmak::pohozaev {

using sigmak::sphere_volume;

// Quadrature rule on S^{n-1} in nested spherical coordinates.
struct SphereGrid {
    int n_minus_1;
    std::vector<std::vector<double>> nodes;  // full angle tuples
    std::vector<double> weights;             // sum = omega_{n-1}

    // Product rule: Gauss-Legendre (after cos substitution) in each
    // polar angle, uniform azimuth, rescaled exactly for constants.
    static SphereGrid product_gauss(int n, int polar_points, int azimuth_points);

    // Trapezoid lattice matching the angular axes of a cylinder
    // GridField, restricted to indices with `margin` nodes clipped at
    // each end; absent trailing angles are fixed at pi/2.  Weights are
    // rescaled to omega_{n-1}, which is exact for fields constant in
    // the absent angles.
    static SphereGrid chart_lattice(int n, std::span<const geometry::GridAxis> angular_axes,
                                    int margin);

    void validate() const;
};

// A punctured conformal metric u^{4/(n-2)}(dt^2 + dtheta^2) presented
// through its factor's 2-jet.
class PuncturedMetric {
  public:
    enum class Kind { ExactRadial, AnalyticRadial, Perturbed };

    // Delaunay orbit metric: the trajectory through (u_max(h), 0) is
    // integrated once over [t_lo, t_hi] and then flowed locally per
    // evaluation.  h is recovered as the sample mean of the Hamiltonian.
    static PuncturedMetric delaunay_orbit(const delaunay::OdeParams& params, double h,
                                          double t_lo = -6.0, double t_hi = 6.0,
                                          double tol = 1e-12);
    // The h = 0 sphere solution cosh(t)^{-(n-2)/2}.
    static PuncturedMetric sphere(const delaunay::OdeParams& params);
    // The constant cylinder solution u = c_cyl (h = h_cyl).
    static PuncturedMetric cylinder(const delaunay::OdeParams& params);
    // Arbitrary constant factor (not a solution in general; no h).
    static PuncturedMetric constant(const delaunay::OdeParams& params, double value);
    // base factor plus amplitude e^{-decay t} cos(theta_1); n in {3,4}.
    static PuncturedMetric perturbed(PuncturedMetric base, double amplitude,
                                     double decay);

    Kind kind() const { return kind_; }
    const delaunay::OdeParams& params() const { return params_; }
    bool radial() const { return kind_ != Kind::Perturbed; }
    std::optional<double> h() const { return h_; }
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }

    double value(double t, std::span<const double> angles) const;
    geometry::ConformalJet jet(double t, std::span<const double> angles) const;

  private:
    PuncturedMetric(Kind kind, delaunay::OdeParams params);

    struct Radial {
        double u, p, utt;
    };
    Radial radial_jet(double t) const;

    Kind kind_;
    delaunay::OdeParams params_;
    std::optional<double> h_;
    double t_lo_, t_hi_;
    // ExactRadial: cached trajectory samples for local flow restarts.
    std::vector<delaunay::DelaunayState> cache_;
    double tol_ = 1e-12;
    // AnalyticRadial: constant value, or NaN for the sphere solution.
    double const_value_ = 0.0;
    bool is_sphere_ = false;
    // Perturbed:
    std::shared_ptr<const PuncturedMetric> base_;
    double amplitude_ = 0.0, decay_ = 0.0;
};

struct DkResult {
    int n;
    int k;
    double t0;
    double quadrature;
    std::optional<double> h;
    std::optional<double> closed_form;
    double residual;  // |quadrature - closed_form| when present, else 0
};

// Trace-free H of the conformal metric in frame components:
// h_tensors of the operator u^{-4/(n-2)} schouten_conformal(jet).
symfun::SymMatrix hring_frame(const geometry::ConformalJet& jet, int k);

// Radial closed expression for the frame component Hring^t_t:
// binom(n-1,k-1) ((n-k)/n) (n/(2k)) (1/2)^{k-1}
//   x {1 - u^{-4k/(n-2)} (1 - a^2 (p/u)^2)^k}.
double hring11_radial(double u, double p, const delaunay::OdeParams& params);

// Surface integral of Hring^t_t u^{2n/(n-2)} over the cross-section
// Sigma_{t0} (normal and dilation both along +dt).  Radial metrics skip
// the angular sum and multiply by omega_{n-1}.
double dk_quadrature(const PuncturedMetric& metric, double t0, const SphereGrid& grid,
                     int k);

// h-linear closed form
// binom(n-1,k-1) ((n-k)/n) (n/(2k)) (1/2)^{k-1} h omega_{n-1}.
double dk_closed_form(double h, const delaunay::OdeParams& params);

// Quadrature plus the closed form (when the metric knows its h),
// assembled into an exportable record.
DkResult compute_dk(const PuncturedMetric& metric, double t0, const SphereGrid& grid);

struct SignedEnd {
    DkResult result;
    int sign;  // +1 / -1 orientation of the end's outward pairing
};
// Signed sum over the ends; vanishes for exact two-ended metrics.
double puncture_sum(std::span<const SignedEnd> ends);

// JSON record {n, k, h, t0, quadrature, closed_form, residual}.
void export_dk_json(const DkResult& result, std::ostream& out);

}  // namespace sigmak::pohozaev
