// Elementary symmetric functions of eigenvalue spectra, Garding cone
// membership, and Newton transforms of symmetric matrices.
#pragma once

#include <span>
#include <vector>

namespace sigmak::symfun {

// Eigenvalue list, ascending or not; treated as a multiset.
using Spectrum = std::vector<double>;

// Dense symmetric matrix.  Construction validates symmetry to a
// relative tolerance of 1e-12 and then symmetrizes exactly by
// averaging, so downstream code may rely on a(i,j) == a(j,i).
class SymMatrix {
  public:
    explicit SymMatrix(int dim);
    SymMatrix(int dim, std::span<const double> row_major);

    static SymMatrix identity(int dim);
    static SymMatrix diagonal(std::span<const double> entries);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * dim_ + j]; }
    double& entry(int i, int j) { return a_[std::size_t(i) * dim_ + j]; }
    void set(int i, int j, double v);
    double trace() const;

    const std::vector<double>& data() const { return a_; }

  private:
    int dim_;
    std::vector<double> a_;
};

// sigma_k(lambda) by the Pascal-type recurrence over prefix spectra.
// k = 0 gives 1; k outside [0, size] is a domain error.
double elem_sym(const Spectrum& lambda, int k);

// All elementary symmetric functions sigma_0..sigma_n at once.
std::vector<double> elem_sym_all(const Spectrum& lambda);

// Garding cone membership: sigma_1, ..., sigma_k all strictly positive.
bool in_positive_cone(const Spectrum& lambda, int k);

// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
// rotations.  Converges to machine precision for the small dimensions
// used here.
Spectrum eigenvalues(const SymMatrix& a);

// sigma_k of the eigenvalues of `a` without forming them, via the
// Faddeev-LeVerrier trace recursion.
double matrix_sigma_k(const SymMatrix& a, int k);

// Newton transform T_j(a) from the recursion
//   T_0 = I,  T_j = sigma_j(a) I - T_{j-1} a.
SymMatrix newton_transform(const SymMatrix& a, int j);

// T_j(a) assembled from the generalized Kronecker delta contraction,
// term by term.  Exponential cost; dim > 5 is rejected (length_error).
// Exists as an independent cross-check of newton_transform.
SymMatrix newton_transform_delta(const SymMatrix& a, int j);

// The pair H = T_{k-1}(a) a and its trace-free part
// Hring = H - (tr H / dim) I, with tr H = k sigma_k(a).
struct HTensors {
    SymMatrix h;
    SymMatrix hring;
    double sigma_k;
};
HTensors h_tensors(const SymMatrix& a, int k);

}  // namespace sigmak::symfun
