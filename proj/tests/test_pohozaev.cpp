#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "sigmak/pohozaev.hpp"

using namespace sigmak;
using namespace sigmak::pohozaev;
using delaunay::OdeParams;

namespace {

double dk_coefficient(const OdeParams& params) {
    const int n = params.n, k = params.k;
    return binomial(n - 1, k - 1) * (double(n - k) / n) * (double(n) / (2.0 * k)) *
           std::pow(0.5, k - 1);
}

}  // namespace

TEST_CASE("unit sphere volumes") {
    CHECK(sphere_volume(2) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
    CHECK(sphere_volume(3) ==
          doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-15));
    CHECK(sphere_volume(4) ==
          doctest::Approx(8.0 * std::numbers::pi * std::numbers::pi / 3.0)
              .epsilon(1e-15));
}

TEST_CASE("polar rule reproduces Beta-function moments") {
    // Even moments of (1 - x^2)^alpha: an 8-point rule is exact through
    // degree 15.
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const auto rule = gauss_gegenbauer(8, alpha);
        for (int j = 0; j <= 7; ++j) {
            double q = 0.0;
            for (int i = 0; i < 8; ++i)
                q += rule.weights[std::size_t(i)] *
                     std::pow(rule.nodes[std::size_t(i)], 2.0 * j);
            const double exact =
                std::exp(std::lgamma(j + 0.5) + std::lgamma(alpha + 1.0) -
                         std::lgamma(j + alpha + 1.5));
            CHECK(q == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    // alpha = 0 is the Legendre rule.
    const auto legendre = gauss_legendre(7);
    const auto zero = gauss_gegenbauer(7, 0.0);
    for (int i = 0; i < 7; ++i) {
        CHECK(zero.nodes[std::size_t(i)] ==
              doctest::Approx(legendre.nodes[std::size_t(i)]).epsilon(1e-14));
        CHECK(zero.weights[std::size_t(i)] ==
              doctest::Approx(legendre.weights[std::size_t(i)]).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gauss_gegenbauer(0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gauss_gegenbauer(4, -1.0), std::domain_error);
}

TEST_CASE("product quadrature integrates over the sphere") {
    for (int n : {3, 4, 5, 7}) {
        const auto grid = SphereGrid::product_gauss(n, 8, 16);
        CHECK(grid.n_minus_1 == n - 1);
        grid.validate();
        // Half a million weights at n = 7: running sums drift past the
        // tolerance, so accumulate pairwise.
        const double total = pairwise_sum(grid.weights);
        CHECK(total == doctest::Approx(sphere_volume(n - 1)).epsilon(1e-13));
    }

    // First-coordinate moment on S^3: integral of cos^2(theta_1) is
    // omega_3 / n with n = 4.
    const auto grid = SphereGrid::product_gauss(4, 8, 16);
    double moment = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double c = std::cos(grid.nodes[i][0]);
        moment += grid.weights[i] * c * c;
    }
    CHECK(moment == doctest::Approx(sphere_volume(3) / 4.0).epsilon(1e-12));
}

TEST_CASE("lattice quadrature mirrors a grid's angular axes") {
    const std::vector<geometry::GridAxis> axes{{"theta_1", 0.4, 0.0575, 41}};
    const auto grid = SphereGrid::chart_lattice(4, axes, 3);
    grid.validate();
    CHECK(grid.n_minus_1 == 3);
    CHECK(grid.nodes.size() == 35);
    REQUIRE(grid.nodes[0].size() == 3);
    CHECK(grid.nodes[0][0] == doctest::Approx(0.4 + 3 * 0.0575).epsilon(1e-14));
    // Absent trailing angles evaluate at the reference equator.
    CHECK(grid.nodes[0][1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    double total = 0.0;
    for (double w : grid.weights) total += w;
    CHECK(total == doctest::Approx(sphere_volume(3)).epsilon(1e-13));

    CHECK_THROWS_AS(SphereGrid::chart_lattice(4, axes, 21), std::invalid_argument);
}

TEST_CASE("quadrature validation catches tampered weights") {
    auto grid = SphereGrid::product_gauss(4, 4, 8);
    grid.weights[0] += 0.1;
    CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
}

TEST_CASE("radial trace-free component in closed form") {
    const OdeParams k51{5, 1};
    // Sphere family: the bracket vanishes with h.
    for (double t : {-2.0, 0.0, 1.5}) {
        const auto s = delaunay::sphere_solution(t, 5);
        CHECK(std::fabs(hring11_radial(s.u, s.p, k51)) <= 1e-13);
    }
    // Constant solution: 1 * (4/5) * (5/2) * 1 * (1 - 5/3) = -4/3.
    const auto cyl = delaunay::cylinder_constant(k51);
    CHECK(hring11_radial(cyl.c_cyl, 0.0, k51) ==
          doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(hring11_radial(-1.0, 0.0, k51), std::domain_error);
}

TEST_CASE("radial expression equals the tensor pipeline on orbits") {
    struct Case {
        OdeParams params;
        double h;
    };
    for (const auto& c :
         {Case{{5, 1}, -0.1}, Case{{5, 2}, -0.05}, Case{{7, 3}, -0.02}}) {
        const auto roots = delaunay::roots_for_h(c.h, c.params);
        const auto traj =
            delaunay::integrate({0.0, roots.u_max, 0.0}, 8.0, 1e-12, c.params, 0.4);
        for (const auto& s : traj.samples) {
            const double utt = delaunay::u_tt(s.u, s.p, c.params);
            const auto jet = geometry::radial_cylinder_jet(c.params.n, s.u, s.p, utt);
            const double pipeline = hring_frame(jet, c.params.k)(0, 0);
            const double closed = hring11_radial(s.u, s.p, c.params);
            // The component grows like u^(-2n/(n-2)) through deep necks,
            // so compare against the value once it exceeds unit size.
            const double scale = std::max(1.0, std::fabs(closed));
            CHECK(std::fabs(pipeline - closed) <= 1e-9 * scale);
            // Equivalent h-linear form on exact solutions.
            const double via_h = dk_coefficient(c.params) * c.h *
                                 std::pow(s.u, -2.0 * c.params.n / (c.params.n - 2.0));
            CHECK(std::fabs(closed - via_h) <= 1e-7 * scale);
        }
    }
}

TEST_CASE("closed form is linear in the conserved quantity") {
    const OdeParams k51{5, 1};
    CHECK(dk_closed_form(0.0, k51) == 0.0);
    CHECK(dk_closed_form(-0.1, k51) ==
          doctest::Approx(-0.2 * sphere_volume(4)).epsilon(1e-14));
    CHECK(dk_closed_form(-9.0 / 16.0, {4, 1}) ==
          doctest::Approx(-27.0 * std::numbers::pi * std::numbers::pi / 16.0)
              .epsilon(1e-14));
    // Negative h forces a negative invariant in the subcritical range.
    for (int n = 3; n <= 8; ++n)
        for (int k = 1; 2 * k < n; ++k)
            CHECK(dk_closed_form(-0.03, {n, k}) < 0.0);
}

TEST_CASE("metric factories validate their inputs") {
    const OdeParams k51{5, 1};
    CHECK_THROWS_AS(PuncturedMetric::delaunay_orbit(k51, -0.1, 1.0, 6.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PuncturedMetric::constant(k51, 0.0), std::domain_error);
    CHECK_THROWS_AS(
        PuncturedMetric::perturbed(PuncturedMetric::sphere(k51), 0.05, 1.0),
        std::invalid_argument);
    const OdeParams k41{4, 1};
    CHECK_NOTHROW(PuncturedMetric::perturbed(PuncturedMetric::sphere(k41), 0.05, 1.0));
}

TEST_CASE("sphere metric has vanishing invariant") {
    const OdeParams k52{5, 2};
    const auto metric = PuncturedMetric::sphere(k52);
    const auto grid = SphereGrid::product_gauss(5, 6, 6);
    for (double t0 : {-1.0, 0.0, 2.0})
        CHECK(std::fabs(dk_quadrature(metric, t0, grid, 2)) <= 1e-10);
    const auto result = compute_dk(metric, 1.0, grid);
    REQUIRE(result.closed_form.has_value());
    CHECK(*result.closed_form == 0.0);
    CHECK(result.residual <= 1e-10);
}

TEST_CASE("constant cylinder metric hits the closed form exactly") {
    const OdeParams k52{5, 2};
    const auto metric = PuncturedMetric::cylinder(k52);
    const auto grid = SphereGrid::product_gauss(5, 6, 6);
    const auto result = compute_dk(metric, 0.5, grid);
    REQUIRE(result.h.has_value());
    const auto cyl = delaunay::cylinder_constant(k52);
    CHECK(*result.h == doctest::Approx(cyl.h_cyl).epsilon(1e-14));
    REQUIRE(result.closed_form.has_value());
    CHECK(result.residual <= 1e-12 * std::fabs(*result.closed_form));
}

TEST_CASE("orbit quadrature matches the closed form") {
    struct Case {
        OdeParams params;
        double h;
    };
    const auto grid6 = SphereGrid::product_gauss(7, 6, 6);
    for (const auto& c :
         {Case{{5, 1}, -0.1}, Case{{5, 2}, -0.05}, Case{{7, 3}, -0.02}}) {
        const auto metric = PuncturedMetric::delaunay_orbit(c.params, c.h);
        REQUIRE(metric.h().has_value());
        CHECK(std::fabs(*metric.h() - c.h) <= 1e-9);
        const auto result = compute_dk(metric, 1.0, grid6);
        REQUIRE(result.closed_form.has_value());
        CHECK(result.residual <= 1e-6 * std::fabs(*result.closed_form));
    }
}

TEST_CASE("invariant is independent of the cross-section") {
    // Sections spread across more than two orbit periods.
    const OdeParams k51{5, 1};
    const auto metric = PuncturedMetric::delaunay_orbit(k51, -0.1);
    const auto grid = SphereGrid::product_gauss(5, 6, 6);
    const double ref = dk_closed_form(-0.1, k51);
    double lo = 1e300, hi = -1e300;
    for (double t0 : {-4.0, -1.0, 2.0, 5.0}) {
        const double q = dk_quadrature(metric, t0, grid, 1);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK((hi - lo) <= 1e-6 * std::fabs(ref));

    CHECK_THROWS_AS(dk_quadrature(metric, 7.0, grid, 1), std::out_of_range);
    CHECK_THROWS_AS(dk_quadrature(metric, 1.0, grid, 5), std::domain_error);
}

TEST_CASE("two-ended sum cancels") {
    const OdeParams k52{5, 2};
    const auto metric = PuncturedMetric::delaunay_orbit(k52, -0.05);
    const auto grid = SphereGrid::product_gauss(5, 6, 6);
    const auto plus = compute_dk(metric, 1.5, grid);
    const auto minus = compute_dk(metric, -1.5, grid);
    const std::vector<SignedEnd> ends{{plus, +1}, {minus, -1}};
    CHECK(std::fabs(puncture_sum(ends)) <= 1e-6 * std::fabs(plus.quadrature));
}

TEST_CASE("signed sum edge cases") {
    const OdeParams k52{5, 2};
    const auto grid = SphereGrid::product_gauss(5, 4, 4);
    const auto sphere_end =
        compute_dk(PuncturedMetric::sphere(k52), 1.0, grid);
    const std::vector<SignedEnd> single{{sphere_end, +1}};
    CHECK(std::fabs(puncture_sum(single)) <= 1e-10);

    const std::vector<SignedEnd> mirrored{{sphere_end, +1}, {sphere_end, -1}};
    CHECK(puncture_sum(mirrored) == 0.0);

    CHECK_THROWS_AS(puncture_sum(std::vector<SignedEnd>{}), std::domain_error);
    const std::vector<SignedEnd> bad{{sphere_end, 2}};
    CHECK_THROWS_AS(puncture_sum(bad), std::invalid_argument);
}

TEST_CASE("result records serialize to JSON") {
    const OdeParams k51{5, 1};
    const auto metric = PuncturedMetric::delaunay_orbit(k51, -0.1);
    const auto grid = SphereGrid::product_gauss(5, 6, 6);
    const auto result = compute_dk(metric, 1.0, grid);
    CHECK(result.residual ==
          std::fabs(result.quadrature - *result.closed_form));

    std::ostringstream out;
    export_dk_json(result, out);
    const auto parsed = nlohmann::json::parse(out.str());
    CHECK(parsed["n"] == 5);
    CHECK(parsed["k"] == 1);
    CHECK(parsed.contains("h"));
    CHECK(parsed.contains("t0"));
    CHECK(parsed.contains("quadrature"));
    CHECK(parsed.contains("closed_form"));
    CHECK(parsed.contains("residual"));
    CHECK(parsed["quadrature"].get<double>() ==
          doctest::Approx(result.quadrature).epsilon(1e-15));
}
