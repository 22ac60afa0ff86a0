#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "sigmak/delaunay.hpp"
#include "sigmak/geometry.hpp"

using namespace sigmak::delaunay;

namespace {

constexpr OdeParams k51{5, 1};
constexpr OdeParams k52{5, 2};
constexpr OdeParams k73{7, 3};

}  // namespace

TEST_CASE("hamiltonian special values") {
    CHECK(hamiltonian(1.0, 0.0, k51) == 0.0);
    // Constant solution: closed form -(2k/(n-2k)) ((n-2k)/n)^{n/(2k)}.
    const double c = std::pow(3.0 / 5.0, 3.0 / 4.0);
    const double expect = -(2.0 / 3.0) * std::pow(3.0 / 5.0, 5.0 / 2.0);
    CHECK(hamiltonian(c, 0.0, k51) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(hamiltonian(c, 0.0, k51) ==
          doctest::Approx(-0.18590320061795601).epsilon(1e-14));
    CHECK_THROWS_AS(hamiltonian(0.0, 1.0, k51), std::domain_error);
    CHECK_THROWS_AS(hamiltonian(-1.0, 0.0, k51), std::domain_error);
}

TEST_CASE("hamiltonian vanishes along the sphere family") {
    for (int n : {4, 5, 7}) {
        const OdeParams params{n, 1};
        for (double t : {-5.0, -1.3, 0.0, 0.4, 2.0, 5.0}) {
            const auto [u, p] = sphere_solution(t, n);
            CHECK(std::fabs(hamiltonian(u, p, params)) <= 1e-13);
        }
    }
}

TEST_CASE("second derivative closed form") {
    const auto cyl = cylinder_constant(k51);
    CHECK(std::fabs(u_tt(cyl.c_cyl, 0.0, k51)) <= 1e-14);

    // Against symbolic differentiation of the cosh profile.
    for (int n : {4, 5, 7}) {
        const OdeParams params{n, 1};
        const auto ref = oracles::sphere_closed_form(1.0, n);
        CHECK(u_tt(ref.u, ref.up, params) == doctest::Approx(ref.upp).epsilon(1e-12));
    }

    // Substituting (u, p, u_tt) back into the equation closes the loop.
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> du(0.3, 1.2), dp(-0.2, 0.2);
    for (int trial = 0; trial < 100; ++trial) {
        const double u = du(rng), p = dp(rng);
        for (const auto& params : {k51, k52, k73}) {
            const double utt = u_tt(u, p, params);
            CHECK(std::fabs(ode_residual(u, p, utt, params)) <= 1e-10);
        }
    }
}

TEST_CASE("cone guard trips at the ellipticity boundary") {
    // a = 2/3 at n = 5, so p/u = 3/2 sits exactly on the boundary.
    CHECK_THROWS_AS(u_tt(1.0, 1.5, k51), singularity_error);
    try {
        u_tt(1.0, 1.5, k52);
        FAIL("expected singularity_error");
    } catch (const singularity_error& e) {
        CHECK(std::isnan(e.t()));
        CHECK(std::string(e.what()).find("cone") != std::string::npos);
    }
}

TEST_CASE("equation residual at hand-checked states") {
    const auto sphere = oracles::sphere_closed_form(0.0, 5);
    CHECK(std::fabs(ode_residual(sphere.u, sphere.up, sphere.upp, k51)) <= 1e-12);
    const auto cyl = cylinder_constant(k51);
    CHECK(std::fabs(ode_residual(cyl.c_cyl, 0.0, 0.0, k51)) <= 1e-12);
    CHECK(ode_residual(1.0, 0.0, 0.0, k51) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("constant-solution parameters") {
    const auto c51 = cylinder_constant(k51);
    CHECK(c51.c_cyl == doctest::Approx(std::pow(0.6, 0.75)).epsilon(1e-15));
    CHECK(c51.c_cyl == doctest::Approx(0.681731619880499621).epsilon(1e-15));
    CHECK(c51.h_cyl == doctest::Approx(-0.18590320061795601).epsilon(1e-15));

    const auto c52 = cylinder_constant(k52);
    CHECK(c52.c_cyl == doctest::Approx(std::pow(0.2, 3.0 / 8.0)).epsilon(1e-15));
    CHECK(c52.h_cyl == doctest::Approx(-0.534992243981137619).epsilon(1e-14));

    const auto c73 = cylinder_constant(k73);
    CHECK(c73.c_cyl == doctest::Approx(0.444504146576913031).epsilon(1e-14));
    CHECK(c73.h_cyl == doctest::Approx(-0.619731451199557523).epsilon(1e-14));

    const auto c41 = cylinder_constant({4, 1});
    CHECK(c41.c_cyl == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(c41.h_cyl == doctest::Approx(-0.25).epsilon(1e-15));

    CHECK_THROWS_AS(cylinder_constant({4, 2}), std::domain_error);
}

TEST_CASE("level-set roots bracket the constant solution") {
    const auto r = roots_for_h(-0.1, k51);
    CHECK(r.u_min == doctest::Approx(0.368700561479694337).epsilon(1e-12));
    CHECK(r.u_max == doctest::Approx(0.907467418752602328).epsilon(1e-12));

    // Roots and the conserved quantity are mutually inverse on p = 0.
    for (const auto& params : {k51, k52, k73}) {
        const auto cyl = cylinder_constant(params);
        for (double f : {0.9, 0.5, 0.2, 0.05}) {
            const double h = f * cyl.h_cyl;
            const auto roots = roots_for_h(h, params);
            CHECK(roots.u_min < cyl.c_cyl);
            CHECK(roots.u_max > cyl.c_cyl);
            CHECK(std::fabs(hamiltonian(roots.u_min, 0.0, params) - h) <= 1e-10);
            CHECK(std::fabs(hamiltonian(roots.u_max, 0.0, params) - h) <= 1e-10);
        }
    }

    // Degenerate limit: both roots collapse onto c_cyl.
    const auto cyl = cylinder_constant(k51);
    const auto tight = roots_for_h(cyl.h_cyl + 1e-8, k51);
    CHECK(std::fabs(tight.u_min - cyl.c_cyl) <= 1e-3);
    CHECK(std::fabs(tight.u_max - cyl.c_cyl) <= 1e-3);
}

TEST_CASE("level-set roots reject out-of-range values") {
    const auto cyl = cylinder_constant(k51);
    CHECK_THROWS_AS(roots_for_h(0.0, k51), std::domain_error);
    CHECK_THROWS_AS(roots_for_h(0.05, k51), std::domain_error);
    CHECK_THROWS_AS(roots_for_h(cyl.h_cyl, k51), std::domain_error);
    CHECK_THROWS_AS(roots_for_h(cyl.h_cyl - 0.1, k51), std::domain_error);
    try {
        roots_for_h(0.0, k51);
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        // The admissible interval is part of the message.
        CHECK(std::string(e.what()).find("-0.18590") != std::string::npos);
    }
}

TEST_CASE("integration holds the fixed point") {
    const auto cyl = cylinder_constant(k51);
    const auto traj = integrate({0.0, cyl.c_cyl, 0.0}, 20.0, 1e-10, k51, 0.5);
    for (const auto& s : traj.samples) CHECK(std::fabs(s.u - cyl.c_cyl) <= 1e-10);
}

TEST_CASE("integration reproduces the cosh profile") {
    const auto traj = integrate({0.0, 1.0, 0.0}, 5.0, 1e-10, {5, 1}, 0.1);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const auto ref = oracles::sphere_closed_form(s.t, 5);
        worst = std::max(worst, std::fabs(s.u - ref.u));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("conserved quantity drifts below tolerance on long spans") {
    struct Case {
        OdeParams params;
        double h;
    };
    for (const auto& c : {Case{k51, -0.1}, Case{k52, -0.05}, Case{k73, -0.02}}) {
        const auto roots = roots_for_h(c.h, c.params);
        const auto traj = integrate({0.0, roots.u_max, 0.0}, 100.0, 1e-10, c.params, 0.25);
        CHECK(traj.max_drift <= 1e-8);
        CHECK(std::fabs(traj.h0 - c.h) <= 1e-10);
        // Samples arrive in strictly increasing time and inside the
        // level-set bounds.
        for (std::size_t i = 1; i < traj.samples.size(); ++i)
            CHECK(traj.samples[i].t > traj.samples[i - 1].t);
        for (const auto& s : traj.samples) {
            CHECK(s.u >= roots.u_min - 1e-7);
            CHECK(s.u <= roots.u_max + 1e-7);
        }
    }
}

TEST_CASE("equation residual along an integrated orbit") {
    const auto roots = roots_for_h(-0.1, k51);
    const auto traj = integrate({0.0, roots.u_max, 0.0}, 20.0, 1e-10, k51, 0.2);
    for (const auto& s : traj.samples) {
        const double utt = u_tt(s.u, s.p, k51);
        CHECK(std::fabs(ode_residual(s.u, s.p, utt, k51)) <= 1e-8);
    }
}

TEST_CASE("orbit samples satisfy the curvature equation pointwise") {
    namespace geo = sigmak::geometry;
    const auto roots = roots_for_h(-0.05, k52);
    const auto traj = integrate({0.0, roots.u_max, 0.0}, 10.0, 1e-10, k52, 0.1);
    for (const auto& s : traj.samples) {
        const auto jet = geo::radial_cylinder_jet(5, s.u, s.p, u_tt(s.u, s.p, k52));
        CHECK(std::fabs(geo::sigma_k_curvature(jet, 2).residual) <= 1e-8);
    }
}

TEST_CASE("integration validates its arguments") {
    CHECK_THROWS_AS(integrate({0.0, 1.0, 0.0}, 1.0, -1e-10, k51, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate({0.0, 1.0, 0.0}, 0.0, 1e-10, k51, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate({0.0, 1.0, 1.51}, 1.0, 1e-10, k51, 0.1),
                    singularity_error);
}

TEST_CASE("period against a brute-force integrator") {
    const double t_adaptive = period(-0.1, k51, 1e-10);
    const double t_bruteforce = oracles::rk4_period(-0.1, k51, 1e-5);
    CHECK(std::fabs(t_adaptive - t_bruteforce) <= 1e-6 * t_bruteforce);
    CHECK(t_adaptive == doctest::Approx(3.9854680158389479).epsilon(1e-10));

    // Stable under tolerance halving.
    CHECK(std::fabs(period(-0.1, k51, 1e-10) - period(-0.1, k51, 5e-11)) <= 1e-8);
}

TEST_CASE("period approaches the linearization limit") {
    const auto cyl = cylinder_constant(k51);
    const double mu = oracles::linearization_mu(k51);
    CHECK(mu == doctest::Approx(3.0).epsilon(1e-6));
    const double limit = 2.0 * std::numbers::pi / std::sqrt(mu);
    const double far = std::fabs(period(cyl.h_cyl * (1.0 - 1e-4), k51, 1e-10) - limit);
    const double near = std::fabs(period(cyl.h_cyl * (1.0 - 1e-6), k51, 1e-10) - limit);
    CHECK(near <= 1e-3);
    CHECK(near < far);
}

TEST_CASE("orbit returns to its starting state after one period") {
    const double h = -0.1;
    const double T = period(h, k51, 1e-10);
    const auto roots = roots_for_h(h, k51);
    const auto end = flow_to({0.0, roots.u_max, 0.0}, T, 1e-12, k51);
    CHECK(std::fabs(end.u - roots.u_max) + std::fabs(end.p) <= 1e-7);
}

TEST_CASE("sphere solution endpoints") {
    const auto at0 = sphere_solution(0.0, 5);
    CHECK(at0.u == 1.0);
    CHECK(at0.p == 0.0);
    for (double t : {-2.0, 0.3, 4.0}) {
        const auto s = sphere_solution(t, 7);
        const auto ref = oracles::sphere_closed_form(t, 7);
        CHECK(s.u == doctest::Approx(ref.u).epsilon(1e-14));
        CHECK(s.p == doctest::Approx(ref.up).epsilon(1e-14));
        CHECK(std::fabs(ode_residual(s.u, s.p, ref.upp, {7, 1})) <= 1e-12);
    }
}

TEST_CASE("conic limit formula") {
    CHECK(conic_h(-0.5) == -0.5625);
    CHECK(conic_h(-1.0) == -1.0);
    CHECK(std::fabs(conic_h(-1e-8)) <= 1e-15);
    CHECK_THROWS_AS(conic_h(0.1), std::domain_error);
    CHECK_THROWS_AS(conic_h(-1.5), std::domain_error);

    // The conic model decays onto the formula value: at large t the
    // volume term dies and the bracket term is t-independent.
    const OdeParams p42{4, 2};
    for (double beta : {-0.25, -0.5, -0.75}) {
        const double u = std::exp(-(1.0 + beta) * 20.0);
        const double up = -(1.0 + beta) * u;
        CHECK(std::fabs(conic_h(beta) - hamiltonian(u, up, p42)) <= 1e-6);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(OdeParams({2, 1}).validate(), std::domain_error);
    CHECK_THROWS_AS(OdeParams({5, 0}).validate(), std::domain_error);
    CHECK_THROWS_AS(OdeParams({5, 3}).validate(), std::domain_error);
    CHECK_NOTHROW(OdeParams({4, 2}).validate());
    CHECK_THROWS_AS(OdeParams({4, 2}).validate_subcritical(), std::domain_error);
    CHECK_NOTHROW(OdeParams({5, 2}).validate_subcritical());
}
