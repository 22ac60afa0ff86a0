#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/numeric.hpp"

using namespace sigmak;
using namespace sigmak::geometry;

namespace {

double c_norm(int n, int k) { return binomial(n, k) * std::pow(0.5, k); }

// Radial Gaussian profile phi(r) = exp(-r^2/4) with closed-form
// derivatives, used to build a non-solution factor whose jets exist in
// both the flat and the cylindrical picture.
struct Profile {
    double phi, dphi, d2phi;
};

Profile gaussian(double r) {
    const double phi = std::exp(-0.25 * r * r);
    return {phi, -0.5 * r * phi, (0.25 * r * r - 0.5) * phi};
}

ConformalJet radial_euclidean_jet(int n, std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double r = std::sqrt(r2);
    const auto [phi, dphi, d2phi] = gaussian(r);
    std::vector<double> grad(std::size_t(n), 0.0);
    symfun::SymMatrix hess(n);
    for (int i = 0; i < n; ++i) {
        grad[std::size_t(i)] = dphi * x[std::size_t(i)] / r;
        for (int j = 0; j < n; ++j) {
            double v = (d2phi - dphi / r) * x[std::size_t(i)] * x[std::size_t(j)] / r2;
            if (i == j) v += dphi / r;
            hess.set(i, j, v);
        }
    }
    return ConformalJet({BackgroundKind::Euclidean, n}, phi, std::move(grad),
                        std::move(hess));
}

// The same factor transplanted to the cylinder: u(t) = e^{-mt} phi(e^{-t})
// with m = (n-2)/2, differentiated through the chain rule.
ConformalJet radial_cylinder_gaussian(int n, double t) {
    const double m = 0.5 * double(n - 2);
    const double r = std::exp(-t);
    const auto [phi, dphi, d2phi] = gaussian(r);
    const double em = std::exp(-m * t);
    const double u = em * phi;
    const double up = -em * (m * phi + r * dphi);
    const double upp = em * (m * m * phi + (2.0 * m + 1.0) * r * dphi + r * r * d2phi);
    return radial_cylinder_jet(n, u, up, upp);
}

}  // namespace

TEST_CASE("background Schouten tensors") {
    const auto flat = background_schouten({BackgroundKind::Euclidean, 5});
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(flat(i, j) == 0.0);

    const auto cyl = background_schouten({BackgroundKind::Cylinder, 5});
    CHECK(cyl(0, 0) == -0.5);
    for (int i = 1; i < 5; ++i) CHECK(cyl(i, i) == 0.5);
    CHECK(cyl(0, 1) == 0.0);

    const auto sph = background_schouten({BackgroundKind::RoundSphere, 4});
    for (int i = 0; i < 4; ++i) CHECK(sph(i, i) == 0.5);
}

TEST_CASE("constant factor reduces to the background") {
    const auto jet = constant_jet({BackgroundKind::Cylinder, 5}, 1.0);
    const auto a = schouten_conformal(jet);
    CHECK(a(0, 0) == -0.5);
    for (int i = 1; i < 5; ++i) CHECK(a(i, i) == 0.5);
}

TEST_CASE("round-sphere factor has isotropic operator eigenvalues") {
    for (int n : {4, 5, 7}) {
        const std::vector<double> x{0.3, -0.4, 0.1, 0.0, 0.2, 0.0, 0.0};
        const auto jet = round_sphere_jet(n, std::span(x).first(std::size_t(n)));
        const auto a = schouten_conformal(jet);
        const double scale = std::pow(jet.u, -4.0 / double(n - 2));
        symfun::SymMatrix op(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) op.set(i, j, scale * a(i, j));
        for (double ev : symfun::eigenvalues(op))
            CHECK(ev == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("sphere solution on the cylinder has isotropic eigenvalues") {
    for (double t : {0.0, 0.7}) {
        const auto jet = sphere_solution_jet(5, t);
        const auto a = schouten_conformal(jet);
        const double scale = std::pow(jet.u, -4.0 / 3.0);
        symfun::SymMatrix op(5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) op.set(i, j, scale * a(i, j));
        for (double ev : symfun::eigenvalues(op))
            CHECK(ev == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("sigma_k curvature normalization") {
    const std::vector<double> x{0.2, 0.1, 0.0, -0.3, 0.5};
    const auto round5 = sigma_k_curvature(round_sphere_jet(5, x), 2);
    CHECK(round5.value == doctest::Approx(2.5).epsilon(1e-11));
    CHECK(round5.residual <= 1e-10);

    // Constant cylinder solution: sigma_k sits exactly at the normalized
    // constant.
    const double ccyl = std::pow(3.0 / 5.0, 3.0 / 4.0);
    const auto cylinder =
        sigma_k_curvature(constant_jet({BackgroundKind::Cylinder, 5}, ccyl), 1);
    CHECK(cylinder.value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(cylinder.residual <= 1e-12);

    const auto flat =
        sigma_k_curvature(constant_jet({BackgroundKind::Euclidean, 4}, 1.0), 1);
    CHECK(flat.value == 0.0);
    CHECK(flat.residual == doctest::Approx(c_norm(4, 1)).epsilon(1e-15));
}

TEST_CASE("sigma_k curvature rejects bad arguments") {
    CHECK_THROWS_AS(constant_jet({BackgroundKind::Euclidean, 4}, -1.0),
                    std::domain_error);
    const auto jet = constant_jet({BackgroundKind::Euclidean, 4}, 1.0);
    CHECK_THROWS_AS(sigma_k_curvature(jet, 0), std::domain_error);
    CHECK_THROWS_AS(sigma_k_curvature(jet, 5), std::domain_error);
}

TEST_CASE("cone membership of the operator spectrum") {
    const std::vector<double> x{0.2, 0.1, 0.0, -0.3, 0.5};
    for (int k = 1; k <= 5; ++k) CHECK(cone_check(round_sphere_jet(5, x), k));
    // A = 0 sits on the cone boundary, not inside.
    CHECK_FALSE(cone_check(constant_jet({BackgroundKind::Euclidean, 4}, 1.0), 1));
}

TEST_CASE("hyperplane second fundamental form coefficient") {
    CHECK(hyperplane_2ff(1.0, 0.0, 5) == 0.0);
    CHECK(hyperplane_2ff(1.0, -1.0, 6) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hyperplane_2ff(2.0, 1.0, 4) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(hyperplane_2ff(0.0, 1.0, 5), std::domain_error);
}

TEST_CASE("coordinate dictionary between the pictures") {
    const std::vector<double> unit{1.0, 0.0, 0.0, 0.0};
    const auto at_one = euclidean_to_cylinder(1.0, unit);
    CHECK(at_one.t == 0.0);
    CHECK(at_one.u_cyl == 1.0);

    // Round-sphere factor pulls back to the cosh profile.
    const double t = 0.8;
    const int n = 5;
    const double r = std::exp(-t);
    std::vector<double> x{r, 0.0, 0.0, 0.0, 0.0};
    const double u_euc = std::pow(2.0 / (1.0 + r * r), 0.5 * (n - 2));
    const auto mapped = euclidean_to_cylinder(u_euc, x);
    CHECK(mapped.t == doctest::Approx(t).epsilon(1e-14));
    CHECK(mapped.u_cyl ==
          doctest::Approx(std::pow(std::cosh(t), -0.5 * (n - 2))).epsilon(1e-14));

    const auto back = cylinder_to_euclidean(mapped.u_cyl, mapped.t, n);
    CHECK(back.radius == doctest::Approx(r).epsilon(1e-14));
    CHECK(back.u_euc == doctest::Approx(u_euc).epsilon(1e-13));

    CHECK(t0_from_r0(std::numbers::pi / 2.0) == doctest::Approx(0.0).epsilon(1e-15));
    const std::vector<double> origin{0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(euclidean_to_cylinder(1.0, origin), std::domain_error);
}

TEST_CASE("sigma_k curvature is conformally covariant") {
    // A non-solution radial factor evaluated in both pictures: the
    // curvature of the metric cannot depend on the chart.
    const int n = 5;
    const double t = 0.35665;  // r = e^{-t} ~ 0.7
    const double r = std::exp(-t);
    std::vector<double> x(std::size_t(n), 0.0);
    x[0] = 0.6 * r;
    x[1] = -0.8 * r;
    const auto flat_jet = radial_euclidean_jet(n, x);
    const auto cyl_jet = radial_cylinder_gaussian(n, t);
    for (int k = 1; k <= 2; ++k) {
        const double flat_val = sigma_k_curvature(flat_jet, k).value;
        const double cyl_val = sigma_k_curvature(cyl_jet, k).value;
        CHECK(std::fabs(flat_val - cyl_val) <=
              1e-9 * std::max(1.0, std::fabs(flat_val)));
    }
}

TEST_CASE("Einstein background stays trace-free through the tensor pipeline") {
    for (int n : {4, 5, 6}) {
        const auto a = background_schouten({BackgroundKind::RoundSphere, n});
        for (int k = 1; k <= n; ++k) {
            const auto ht = symfun::h_tensors(a, k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) CHECK(std::fabs(ht.hring(i, j)) <= 1e-14);
        }
    }
}
