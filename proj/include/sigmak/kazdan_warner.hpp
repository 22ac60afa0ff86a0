// Conformal Killing field catalog and finite-difference verification of
// the divergence identity
//   (n-k)/n <X, grad sigma_k> = div_g (X^a Hring_a^b)
// pointwise and in integral (annulus) form.
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "sigmak/gridfield.hpp"
#include "sigmak/pohozaev.hpp"

namespace sigmak::kw {

struct CkField {
    enum class Kind { Dilation, Translation, Rotation, SpecialConformal };
    enum class Chart { Euclidean, Cylinder };

    Kind kind;
    Chart chart;
    int n;
    // Dilation center, translation direction, or special-conformal
    // direction; unused for rotations.
    std::vector<double> direction;
    // Rotation plane, 1-based ambient coordinate indices.
    int plane_i = 1;
    int plane_j = 2;

    static CkField dilation(int n, Chart chart, std::vector<double> center = {});
    static CkField translation(int n, std::vector<double> direction);
    static CkField rotation(int n, Chart chart, int plane_i, int plane_j);
    static CkField special_conformal(int n, std::vector<double> direction);
};

// Chart components of the field at a point: Euclidean points are the n
// Cartesian coordinates; cylinder points are (t, theta_1, ...,
// theta_{n-1}), with trailing angles defaulting to pi/2 when the span
// is short.  On the cylinder only dilations (= d/dt) and rotations of
// the sphere factor are catalogued.
std::vector<double> ck_eval(const CkField& field, std::span<const double> point);

struct DivergenceReport {
    int fd_order;
    int k;
    std::vector<geometry::GridAxis> axes;  // fine-grid axes
    // Values at the comparison nodes (shared interior nodes of the two
    // resolutions), fine-grid evaluation.
    std::vector<std::vector<double>> nodes;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double max_residual;
    double l2_residual;  // root mean square
    double max_residual_coarse;
    double l2_residual_coarse;
    // log2(coarse max / fine max); 0 when both vanish to roundoff.
    double order_estimate;
};

// Pointwise residual of the divergence identity on the field's grid and
// on its stride-2 coarsening, with a Richardson order estimate.  The
// divergence is taken in density form,
// (det g)^{-1/2} d_b((det g)^{1/2} V^b), V^b = X^a Hring_a^b.
// Angular grids accept X = dilation or the azimuthal rotation
// (n-1, n); radial grids accept dilation and any rotation.
DivergenceReport divergence_identity_residual(const geometry::GridField& field,
                                              const CkField& X, int k);

struct AnnulusTerms {
    double volume;       // (n-k)/n integral of <X, grad sigma_k> dv
    double boundary_hi;  // outward flux through t = t_b
    double boundary_lo;  // same-orientation flux through t = t_a
};
AnnulusTerms annulus_terms(const geometry::GridField& field, const CkField& X, int k,
                           double t_a, double t_b, const pohozaev::SphereGrid& grid);

// |volume - (boundary_hi - boundary_lo)| on the annulus [t_a, t_b];
// t_a and t_b must land on grid nodes with full stencil margins.
double annulus_balance(const geometry::GridField& field, const CkField& X, int k,
                       double t_a, double t_b, const pohozaev::SphereGrid& grid);

void export_report_json(const DivergenceReport& report, std::ostream& out);
void export_residual_csv(const DivergenceReport& report, std::ostream& out);

}  // namespace sigmak::kw
