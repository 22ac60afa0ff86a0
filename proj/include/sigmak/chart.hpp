// Nested spherical coordinates on S^{n-1} and the product chart
// (t, theta_1, ..., theta_{n-1}) on the cylinder R x S^{n-1}.
//
// Chart conventions: theta_1..theta_{n-2} are polar angles in [0, pi],
// theta_{n-1} is the azimuth in [0, 2 pi).  The round metric is
// diagonal with g_ii = prod_{m<i} sin^2(theta_m); the cylinder metric
// prepends a flat t direction with g_tt = 1.
#pragma once

#include <span>
#include <vector>

namespace sigmak::chart {

// Scale factor s_i = sqrt(g_ii) of sphere coordinate i (1-based among
// the sphere angles, i in [1, n-1]).
double sphere_scale(std::span<const double> angles, int i);

// All cylinder-chart scale factors (s_t, s_1, ..., s_{n-1}) at a point;
// s_t = 1.  `angles` may be shorter than n-1: absent trailing angles
// are taken at the reference value pi/2, where their sine factors are 1.
std::vector<double> cylinder_scales(int n, std::span<const double> angles);

// Embedding of S^{n-1} into R^n in nested coordinates.
std::vector<double> sphere_ambient(int n, std::span<const double> angles);

// Columns of the embedding Jacobian d(ambient)/d(theta_i), i in [1, n-1].
std::vector<double> sphere_ambient_jacobian_column(int n,
                                                   std::span<const double> angles,
                                                   int i);

// Christoffel symbol Gamma^c_{ab} of the cylinder product metric in
// chart indices (0 = t, 1.. = sphere angles).  Angles may again omit
// trailing entries (reference value pi/2).
double cylinder_christoffel(int n, std::span<const double> angles, int c, int a,
                            int b);

// Angular volume density of the nested chart,
// J(theta) = prod_i s_i = prod_m sin^{n-1-m}(theta_m).
double sphere_chart_density(int n, std::span<const double> angles);

}  // namespace sigmak::chart
