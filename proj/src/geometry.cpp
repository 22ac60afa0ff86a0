#include "sigmak/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "sigmak/numeric.hpp"

namespace sigmak::geometry {

ConformalJet::ConformalJet(Background bg, double u_val, std::vector<double> grad,
                           symfun::SymMatrix hess)
    : background(bg), u(u_val), grad_u(std::move(grad)), hess_u(std::move(hess)) {
    if (background.dim < 3)
        throw std::domain_error("ConformalJet: dimension must be >= 3");
    if (!(u > 0.0)) throw std::domain_error("ConformalJet: u must be positive");
    if (int(grad_u.size()) != background.dim || hess_u.dim() != background.dim)
        throw std::invalid_argument("ConformalJet: component size mismatch");
}

symfun::SymMatrix background_schouten(const Background& bg) {
    if (bg.dim < 3)
        throw std::domain_error("background_schouten: dimension must be >= 3");
    symfun::SymMatrix a(bg.dim);
    switch (bg.kind) {
        case BackgroundKind::Euclidean:
            break;
        case BackgroundKind::Cylinder:
            a.entry(0, 0) = -0.5;
            for (int i = 1; i < bg.dim; ++i) a.entry(i, i) = 0.5;
            break;
        case BackgroundKind::RoundSphere:
            for (int i = 0; i < bg.dim; ++i) a.entry(i, i) = 0.5;
            break;
    }
    return a;
}

symfun::SymMatrix schouten_conformal(const ConformalJet& jet) {
    const int n = jet.background.dim;
    const double u = jet.u;
    const double nm2 = double(n - 2);

    double grad2 = 0.0;
    for (double g : jet.grad_u) grad2 += g * g;

    symfun::SymMatrix a = background_schouten(jet.background);
    const double c_hess = 2.0 / nm2 / u;
    const double c_outer = 2.0 * double(n) / (nm2 * nm2) / (u * u);
    const double c_norm = 2.0 / (nm2 * nm2) / (u * u) * grad2;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = a(i, j) - c_hess * jet.hess_u(i, j) +
                       c_outer * jet.grad_u[std::size_t(i)] * jet.grad_u[std::size_t(j)];
            if (i == j) v -= c_norm;
            a.set(i, j, v);
        }
    return a;
}

SigmaKValue sigma_k_curvature(const ConformalJet& jet, int k) {
    const int n = jet.background.dim;
    if (k < 1 || k > n)
        throw std::domain_error("sigma_k_curvature: k outside [1, n]");
    const symfun::SymMatrix a = schouten_conformal(jet);
    const double scale = std::pow(jet.u, -4.0 * double(k) / double(n - 2));
    const double value = scale * symfun::matrix_sigma_k(a, k);
    const double c_norm = binomial(n, k) * std::pow(0.5, double(k));
    return SigmaKValue{value, std::fabs(value - c_norm)};
}

bool cone_check(const ConformalJet& jet, int k) {
    const int n = jet.background.dim;
    if (k < 1 || k > n) throw std::domain_error("cone_check: k outside [1, n]");
    const symfun::SymMatrix a = schouten_conformal(jet);
    const double scale = std::pow(jet.u, -4.0 / double(n - 2));
    symfun::Spectrum lambda = symfun::eigenvalues(a);
    for (double& x : lambda) x *= scale;
    return symfun::in_positive_cone(lambda, k);
}

double hyperplane_2ff(double v, double dv_dxn, int n) {
    if (!(v > 0.0)) throw std::domain_error("hyperplane_2ff: v must be positive");
    if (n < 3) throw std::domain_error("hyperplane_2ff: n must be >= 3");
    return -4.0 / double(n - 2) * dv_dxn / v;
}

CylinderPoint euclidean_to_cylinder(double u_euc, std::span<const double> x) {
    const int n = int(x.size());
    if (n < 3)
        throw std::domain_error("euclidean_to_cylinder: dimension must be >= 3");
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    if (r2 == 0.0) throw std::domain_error("euclidean_to_cylinder: x = 0");
    const double r = std::sqrt(r2);
    return CylinderPoint{-std::log(r), std::pow(r, 0.5 * double(n - 2)) * u_euc};
}

EuclideanPoint cylinder_to_euclidean(double u_cyl, double t, int n) {
    if (n < 3)
        throw std::domain_error("cylinder_to_euclidean: dimension must be >= 3");
    const double r = std::exp(-t);
    return EuclideanPoint{r, std::pow(r, -0.5 * double(n - 2)) * u_cyl};
}

double t0_from_r0(double r0) {
    if (!(r0 > 0.0) || !(r0 < 3.14159265358979324))
        throw std::domain_error("t0_from_r0: r0 outside (0, pi)");
    return -std::log(std::tan(0.5 * r0));
}

ConformalJet round_sphere_jet(int n, std::span<const double> x) {
    if (int(x.size()) != n)
        throw std::invalid_argument("round_sphere_jet: point size != n");
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double phi = 1.0 + r2;
    const double m = 0.5 * double(n - 2);
    // u = (2/phi)^m;  du_i = -2 m u x_i / phi;
    // d2u_ij = -2 m u / phi [ delta_ij - 2(m+1) x_i x_j / phi ].
    const double u = std::pow(2.0 / phi, m);
    const double c = -2.0 * m * u / phi;
    std::vector<double> grad(std::size_t(n), 0.0);
    symfun::SymMatrix hess(n);
    for (int i = 0; i < n; ++i) grad[std::size_t(i)] = c * x[std::size_t(i)];
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = -2.0 * (m + 1.0) * x[std::size_t(i)] * x[std::size_t(j)] / phi;
            if (i == j) v += 1.0;
            hess.set(i, j, c * v);
        }
    return ConformalJet(Background{BackgroundKind::Euclidean, n}, u, std::move(grad),
                        std::move(hess));
}

ConformalJet sphere_solution_jet(int n, double t) {
    const double m = 0.5 * double(n - 2);
    const double u = std::pow(std::cosh(t), -m);
    const double th = std::tanh(t);
    const double p = -m * th * u;
    // u_tt = m u (m tanh^2 t - sech^2 t).
    const double sech2 = 1.0 - th * th;
    const double utt = m * u * (m * th * th - sech2);
    return radial_cylinder_jet(n, u, p, utt);
}

ConformalJet constant_jet(const Background& bg, double value) {
    return ConformalJet(bg, value, std::vector<double>(std::size_t(bg.dim), 0.0),
                        symfun::SymMatrix(bg.dim));
}

ConformalJet radial_cylinder_jet(int n, double u, double p, double utt) {
    std::vector<double> grad(std::size_t(n), 0.0);
    grad[0] = p;
    symfun::SymMatrix hess(n);
    hess.entry(0, 0) = utt;
    return ConformalJet(Background{BackgroundKind::Cylinder, n}, u, std::move(grad),
                        std::move(hess));
}

}  // namespace sigmak::geometry
