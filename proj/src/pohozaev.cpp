#include "sigmak/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "sigmak/chart.hpp"

namespace sigmak::pohozaev {

namespace {

void append_json_number(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
}

}  // namespace

SphereGrid SphereGrid::product_gauss(int n, int polar_points, int azimuth_points) {
    if (n < 3) throw std::domain_error("SphereGrid: n must be >= 3");
    if (polar_points < 1 || azimuth_points < 1)
        throw std::invalid_argument("SphereGrid: node counts must be positive");
    SphereGrid grid;
    grid.n_minus_1 = n - 1;

    const int polar_axes = n - 2;
    // Each polar direction carries the measure sin^p(theta) dtheta; after
    // the cos substitution that is the Gegenbauer weight, so the matching
    // Gauss rule keeps polynomial moments of cos(theta) exact.
    std::vector<GaussRule> polar(static_cast<std::size_t>(polar_axes));
    for (int m = 0; m < polar_axes; ++m) {
        const double alpha = 0.5 * double(n - 3 - m);
        polar[std::size_t(m)] = alpha == 0.0 ? gauss_legendre(polar_points)
                                             : gauss_gegenbauer(polar_points, alpha);
    }

    std::vector<int> idx(std::size_t(polar_axes) + 1, 0);
    std::size_t total = std::size_t(azimuth_points);
    for (int m = 0; m < polar_axes; ++m) total *= std::size_t(polar_points);

    grid.nodes.reserve(total);
    grid.weights.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> angles(std::size_t(n - 1));
        double w = 1.0;
        for (int m = 0; m < polar_axes; ++m) {
            const GaussRule& rule = polar[std::size_t(m)];
            angles[std::size_t(m)] = std::acos(rule.nodes[std::size_t(idx[std::size_t(m)])]);
            w *= rule.weights[std::size_t(idx[std::size_t(m)])];
        }
        angles[std::size_t(n - 2)] =
            2.0 * std::numbers::pi * double(idx[std::size_t(polar_axes)]) /
            double(azimuth_points);
        w *= 2.0 * std::numbers::pi / double(azimuth_points);
        grid.nodes.push_back(std::move(angles));
        grid.weights.push_back(w);
        for (int m = polar_axes; m >= 0; --m) {
            const int count = (m == polar_axes) ? azimuth_points : polar_points;
            if (++idx[std::size_t(m)] < count) break;
            idx[std::size_t(m)] = 0;
        }
    }
    const double target = sphere_volume(n - 1);
    const double raw = pairwise_sum(grid.weights);
    for (double& w : grid.weights) w *= target / raw;
    return grid;
}

SphereGrid SphereGrid::chart_lattice(int n,
                                     std::span<const geometry::GridAxis> angular_axes,
                                     int margin) {
    if (n < 3) throw std::domain_error("SphereGrid: n must be >= 3");
    if (int(angular_axes.size()) > n - 1)
        throw std::invalid_argument("SphereGrid: too many angular axes");
    SphereGrid grid;
    grid.n_minus_1 = n - 1;

    std::vector<int> lo(angular_axes.size()), count(angular_axes.size());
    std::size_t total = 1;
    for (std::size_t a = 0; a < angular_axes.size(); ++a) {
        lo[a] = margin;
        count[a] = angular_axes[a].count - 2 * margin;
        if (count[a] < 2)
            throw std::invalid_argument("SphereGrid: axis too short for margin");
        total *= std::size_t(count[a]);
    }

    std::vector<int> idx(angular_axes.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> angles(std::size_t(n - 1),
                                   0.5 * std::numbers::pi);
        double w = 1.0;
        for (std::size_t a = 0; a < angular_axes.size(); ++a) {
            const int i = lo[a] + idx[a];
            const double th = angular_axes[a].lo + angular_axes[a].step * i;
            angles[a] = th;
            const bool edge = idx[a] == 0 || idx[a] == count[a] - 1;
            const double trap = angular_axes[a].step * (edge ? 0.5 : 1.0);
            // Chart density factor sin^{n-1-m}(theta_m), m = a + 1.
            w *= trap * std::pow(std::sin(th), double(n - 2 - int(a)));
        }
        grid.nodes.push_back(std::move(angles));
        grid.weights.push_back(w);
        for (int a = int(angular_axes.size()) - 1; a >= 0; --a) {
            if (++idx[std::size_t(a)] < count[std::size_t(a)]) break;
            idx[std::size_t(a)] = 0;
        }
    }
    const double target = sphere_volume(n - 1);
    const double raw = pairwise_sum(grid.weights);
    for (double& w : grid.weights) w *= target / raw;
    return grid;
}

void SphereGrid::validate() const {
    if (nodes.size() != weights.size())
        throw std::invalid_argument("SphereGrid: node/weight size mismatch");
    const double target = sphere_volume(n_minus_1);
    const double sum = pairwise_sum(weights);
    if (std::abs(sum - target) > 1e-10 * target)
        throw std::invalid_argument("SphereGrid: weights do not sum to omega");
    for (double w : weights)
        if (!(w > 0.0))
            throw std::invalid_argument("SphereGrid: weights must be positive");
}

PuncturedMetric::PuncturedMetric(Kind kind, delaunay::OdeParams params)
    : kind_(kind), params_(params), t_lo_(-1e300), t_hi_(1e300) {}

PuncturedMetric PuncturedMetric::delaunay_orbit(const delaunay::OdeParams& params,
                                                double h, double t_lo, double t_hi,
                                                double tol) {
    params.validate_subcritical();
    if (!(t_lo < 0.0) || !(t_hi > 0.0))
        throw std::invalid_argument("PuncturedMetric: span must contain t = 0");
    PuncturedMetric m(Kind::ExactRadial, params);
    m.tol_ = tol;
    m.t_lo_ = t_lo;
    m.t_hi_ = t_hi;

    const auto roots = delaunay::roots_for_h(h, params);
    const delaunay::DelaunayState start{0.0, roots.u_max, 0.0};
    const double step = 0.25;
    const auto fwd = delaunay::integrate(start, t_hi, tol, params, step);
    const auto bwd = delaunay::integrate(start, t_lo, tol, params, step);

    m.cache_ = bwd.samples;  // already increasing in t, ends at t = 0
    m.cache_.pop_back();     // drop duplicate t = 0
    m.cache_.insert(m.cache_.end(), fwd.samples.begin(), fwd.samples.end());

    // The defining parameter is exact; the trajectory only approximates it.
    m.h_ = h;
    return m;
}

PuncturedMetric PuncturedMetric::sphere(const delaunay::OdeParams& params) {
    params.validate();
    PuncturedMetric m(Kind::AnalyticRadial, params);
    m.is_sphere_ = true;
    m.h_ = 0.0;
    return m;
}

PuncturedMetric PuncturedMetric::cylinder(const delaunay::OdeParams& params) {
    const auto cyl = delaunay::cylinder_constant(params);
    PuncturedMetric m(Kind::AnalyticRadial, params);
    m.const_value_ = cyl.c_cyl;
    m.h_ = cyl.h_cyl;
    return m;
}

PuncturedMetric PuncturedMetric::constant(const delaunay::OdeParams& params,
                                          double value) {
    params.validate();
    if (!(value > 0.0))
        throw std::domain_error("PuncturedMetric: constant factor must be positive");
    PuncturedMetric m(Kind::AnalyticRadial, params);
    m.const_value_ = value;
    return m;
}

PuncturedMetric PuncturedMetric::perturbed(PuncturedMetric base, double amplitude,
                                           double decay) {
    if (base.kind_ == Kind::Perturbed)
        throw std::invalid_argument("PuncturedMetric: base must be radial");
    const int n = base.params_.n;
    if (n != 3 && n != 4)
        throw std::invalid_argument(
            "PuncturedMetric: angular perturbations need n in {3, 4}");
    PuncturedMetric m(Kind::Perturbed, base.params_);
    m.t_lo_ = base.t_lo_;
    m.t_hi_ = base.t_hi_;
    m.amplitude_ = amplitude;
    m.decay_ = decay;
    m.base_ = std::make_shared<PuncturedMetric>(std::move(base));
    return m;
}

PuncturedMetric::Radial PuncturedMetric::radial_jet(double t) const {
    if (kind_ == Kind::ExactRadial) {
        if (t < t_lo_ || t > t_hi_)
            throw std::out_of_range("PuncturedMetric: t outside trajectory span");
        // Flow from the nearest cached sample at or before t.
        auto it = std::upper_bound(
            cache_.begin(), cache_.end(), t,
            [](double v, const delaunay::DelaunayState& s) { return v < s.t; });
        const delaunay::DelaunayState& from = it == cache_.begin() ? cache_.front()
                                                                   : *(it - 1);
        const auto s = delaunay::flow_to(from, t, tol_, params_);
        return Radial{s.u, s.p, delaunay::u_tt(s.u, s.p, params_)};
    }
    if (is_sphere_) {
        const auto sp = delaunay::sphere_solution(t, params_.n);
        return Radial{sp.u, sp.p, delaunay::u_tt(sp.u, sp.p, params_)};
    }
    return Radial{const_value_, 0.0, 0.0};
}

double PuncturedMetric::value(double t, std::span<const double> angles) const {
    if (kind_ != Kind::Perturbed) return radial_jet(t).u;
    const double chi = angles.empty() ? 0.5 * std::numbers::pi : angles[0];
    return base_->value(t, angles) +
           amplitude_ * std::exp(-decay_ * t) * std::cos(chi);
}

geometry::ConformalJet PuncturedMetric::jet(double t,
                                            std::span<const double> angles) const {
    const int n = params_.n;
    if (kind_ != Kind::Perturbed) {
        const Radial r = radial_jet(t);
        return geometry::radial_cylinder_jet(n, r.u, r.p, r.utt);
    }
    const Radial base = base_->radial_jet(t);
    const double chi = angles.empty() ? 0.5 * std::numbers::pi : angles[0];
    const double rho = amplitude_ * std::exp(-decay_ * t);
    const double rho_t = -decay_ * rho;
    const double rho_tt = decay_ * decay_ * rho;
    const double c = std::cos(chi), s = std::sin(chi);

    const double u = base.u + rho * c;
    std::vector<double> grad(std::size_t(n), 0.0);
    grad[0] = base.p + rho_t * c;
    grad[1] = -rho * s;
    symfun::SymMatrix hess(n);
    hess.entry(0, 0) = base.utt + rho_tt * c;
    hess.set(0, 1, -rho_t * s);
    // The angular Hessian of cos(theta_1) is -cos(theta_1) times the
    // round metric, so every angular frame diagonal picks up -rho cos.
    for (int i = 1; i < n; ++i) hess.entry(i, i) = -rho * c;
    return geometry::ConformalJet(
        geometry::Background{geometry::BackgroundKind::Cylinder, n}, u,
        std::move(grad), std::move(hess));
}

symfun::SymMatrix hring_frame(const geometry::ConformalJet& jet, int k) {
    const int n = jet.background.dim;
    const symfun::SymMatrix a = geometry::schouten_conformal(jet);
    const double scale = std::pow(jet.u, -4.0 / double(n - 2));
    symfun::SymMatrix op(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) op.set(i, j, scale * a(i, j));
    return symfun::h_tensors(op, k).hring;
}

double hring11_radial(double u, double p, const delaunay::OdeParams& params) {
    params.validate();
    if (!(u > 0.0)) throw std::domain_error("hring11_radial: u must be positive");
    const int n = params.n, k = params.k;
    const double a = params.a();
    const double w = p / u;
    const double s = 1.0 - a * a * w * w;
    const double coef = binomial(n - 1, k - 1) * (double(n - k) / n) *
                        (double(n) / (2.0 * k)) * std::pow(0.5, double(k) - 1.0);
    return coef *
           (1.0 - std::pow(u, -4.0 * k / double(n - 2)) * std::pow(s, double(k)));
}

double dk_quadrature(const PuncturedMetric& metric, double t0, const SphereGrid& grid,
                     int k) {
    const int n = metric.params().n;
    if (k < 1 || k >= n)
        throw std::domain_error("dk_quadrature: k outside [1, n-1]");
    if (t0 < metric.t_lo() || t0 > metric.t_hi())
        throw std::out_of_range("dk_quadrature: t0 outside the metric domain");
    const double vol_exp = 2.0 * n / double(n - 2);

    if (metric.radial()) {
        const auto jet = metric.jet(t0, {});
        const double integrand =
            hring_frame(jet, k)(0, 0) * std::pow(jet.u, vol_exp);
        return integrand * sphere_volume(n - 1);
    }

    grid.validate();
    if (grid.n_minus_1 != n - 1)
        throw std::invalid_argument("dk_quadrature: grid dimension mismatch");
    std::vector<double> terms(grid.nodes.size());
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        const auto jet = metric.jet(t0, grid.nodes[j]);
        terms[j] = grid.weights[j] * hring_frame(jet, k)(0, 0) *
                   std::pow(jet.u, vol_exp);
    }
    return pairwise_sum(terms);
}

double dk_closed_form(double h, const delaunay::OdeParams& params) {
    params.validate();
    const int n = params.n, k = params.k;
    return binomial(n - 1, k - 1) * (double(n - k) / n) * (double(n) / (2.0 * k)) *
           std::pow(0.5, double(k) - 1.0) * h * sphere_volume(n - 1);
}

DkResult compute_dk(const PuncturedMetric& metric, double t0, const SphereGrid& grid) {
    DkResult r;
    r.n = metric.params().n;
    r.k = metric.params().k;
    r.t0 = t0;
    r.quadrature = dk_quadrature(metric, t0, grid, r.k);
    r.h = metric.h();
    if (r.h) {
        r.closed_form = dk_closed_form(*r.h, metric.params());
        r.residual = std::abs(r.quadrature - *r.closed_form);
    } else {
        r.residual = 0.0;
    }
    return r;
}

double puncture_sum(std::span<const SignedEnd> ends) {
    if (ends.empty()) throw std::domain_error("puncture_sum: no ends given");
    std::vector<double> terms;
    terms.reserve(ends.size());
    for (const auto& e : ends) {
        if (e.sign != 1 && e.sign != -1)
            throw std::invalid_argument("puncture_sum: sign must be +1 or -1");
        terms.push_back(double(e.sign) * e.result.quadrature);
    }
    return pairwise_sum(terms);
}

void export_dk_json(const DkResult& result, std::ostream& out) {
    std::string s = "{\"n\": ";
    s += std::to_string(result.n);
    s += ", \"k\": ";
    s += std::to_string(result.k);
    s += ", \"h\": ";
    if (result.h)
        append_json_number(s, *result.h);
    else
        s += "null";
    s += ", \"t0\": ";
    append_json_number(s, result.t0);
    s += ", \"quadrature\": ";
    append_json_number(s, result.quadrature);
    s += ", \"closed_form\": ";
    if (result.closed_form)
        append_json_number(s, *result.closed_form);
    else
        s += "null";
    s += ", \"residual\": ";
    append_json_number(s, result.residual);
    s += "}\n";
    out << s;
}

}  // namespace sigmak::pohozaev
