// Schouten tensors of conformal metrics g = u^{4/(n-2)} g_b over the
// flat, cylindrical, and round-sphere backgrounds, sigma_k curvature
// evaluation, and the Euclidean <-> cylindrical coordinate dictionary.
#pragma once

#include <span>
#include <vector>

#include "sigmak/symfun.hpp"

namespace sigmak::geometry {

enum class BackgroundKind { Euclidean, Cylinder, RoundSphere };

struct Background {
    BackgroundKind kind;
    int dim;  // n >= 3
};

// Pointwise 2-jet of the conformal factor u, with derivative components
// taken in a g_b-orthonormal frame (covariant Hessian of g_b).
struct ConformalJet {
    Background background;
    double u;
    std::vector<double> grad_u;
    symfun::SymMatrix hess_u;

    ConformalJet(Background bg, double u_val, std::vector<double> grad,
                 symfun::SymMatrix hess);
};

// Frame components of the background Schouten tensor: 0 for flat space,
// diag(-1/2, 1/2, ..., 1/2) on the cylinder, (1/2) I on the sphere.
symfun::SymMatrix background_schouten(const Background& bg);

// Frame components of the Schouten tensor of g = u^{4/(n-2)} g_b:
//   A = A_b - (2/(n-2)) u^{-1} hess u + (2n/(n-2)^2) u^{-2} du x du
//       - (2/(n-2)^2) u^{-2} |du|^2 g_b.
// These are g_b-frame components; the operator g^{-1}A is the
// u^{-4/(n-2)} multiple of this matrix.
symfun::SymMatrix schouten_conformal(const ConformalJet& jet);

struct SigmaKValue {
    double value;     // sigma_k of the eigenvalues of g^{-1}A
    double residual;  // value - binom(n,k) (1/2)^k
};
SigmaKValue sigma_k_curvature(const ConformalJet& jet, int k);

// Garding cone test for the eigenvalues of g^{-1}A.
bool cone_check(const ConformalJet& jet, int k);

// Isotropic second-fundamental-form coefficient of the hyperplane
// {x_n = 0} under g = v^{4/(n-2)} g_E:  -(4/(n-2)) v^{-1} dv/dx_n.
// Only the sign carries geometric meaning (positive = convex side).
double hyperplane_2ff(double v, double dv_dxn, int n);

// Coordinate dictionary between the punctured Euclidean picture and the
// cylinder: t = -ln|x|, u_cyl = |x|^{(n-2)/2} u_euc.
struct CylinderPoint {
    double t;
    double u_cyl;
};
CylinderPoint euclidean_to_cylinder(double u_euc, std::span<const double> x);

struct EuclideanPoint {
    double radius;
    double u_euc;
};
EuclideanPoint cylinder_to_euclidean(double u_cyl, double t, int n);

// Neck coordinate of a spherical cap of geodesic radius r0:
// t0 = ln(tan(r0/2))^{-1} = -ln tan(r0/2).
double t0_from_r0(double r0);

// Analytic conformal factors with closed-form jets.
// Round-sphere factor u(x) = (2/(1+|x|^2))^{(n-2)/2} on flat background.
ConformalJet round_sphere_jet(int n, std::span<const double> x);
// u(t) = cosh(t)^{-(n-2)/2} on the cylinder (the sphere metric in
// cylindrical coordinates), radial.
ConformalJet sphere_solution_jet(int n, double t);
// Constant factor on any background.
ConformalJet constant_jet(const Background& bg, double value);
// Radial cylinder jet from ODE data (u, u_t, u_tt).
ConformalJet radial_cylinder_jet(int n, double u, double p, double utt);

}  // namespace sigmak::geometry
