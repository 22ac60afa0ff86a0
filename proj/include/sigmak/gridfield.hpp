// Uniform grids carrying sampled conformal factors, finite-difference
// jets on them, and CSV/JSON import/export.
//
// Cylinder grids list the t axis first and then leading nested sphere
// angles theta_1, theta_2, ...; trailing angles may be omitted, which
// declares the field constant in them (they are evaluated at the
// reference angle pi/2).  Euclidean grids carry all n axes.
#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sigmak/geometry.hpp"

namespace sigmak::geometry {

struct GridAxis {
    std::string name;
    double lo;
    double step;
    int count;
};

class GridField {
  public:
    // `order` is the FD accuracy order (2 or 4).  Polar-angle axes must
    // stay inside [collar, pi - collar].
    GridField(Background bg, std::vector<GridAxis> axes, std::vector<double> samples,
              int order, double polar_collar = 1e-2);

    static GridField sample(Background bg, std::vector<GridAxis> axes, int order,
                            const std::function<double(std::span<const double>)>& f,
                            double polar_collar = 1e-2);

    const Background& background() const { return bg_; }
    int order() const { return order_; }
    const std::vector<GridAxis>& axes() const { return axes_; }
    int rank() const { return int(axes_.size()); }
    const std::vector<double>& samples() const { return samples_; }

    double value(std::span<const int> idx) const;
    std::vector<double> coords(std::span<const int> idx) const;

    // True when idx is at least (order/2 + 1 + extra) nodes away from
    // every boundary.
    bool interior(std::span<const int> idx, int extra = 0) const;

    // FD partial derivatives of the raw samples along present axes.
    double d1(std::span<const int> idx, int axis) const;
    double d2(std::span<const int> idx, int axis) const;
    double d11(std::span<const int> idx, int axis_a, int axis_b) const;

    // Every-second-node subsample along each axis (step doubles); axis
    // counts must be odd so that both endpoints survive.
    GridField coarsen() const;

  private:
    Background bg_;
    std::vector<GridAxis> axes_;
    std::vector<double> samples_;
    int order_;
    std::vector<std::size_t> strides_;

    std::size_t flat(std::span<const int> idx) const;
    double at_offset(std::span<const int> idx, int axis, int off) const;
    double at_offset2(std::span<const int> idx, int axis_a, int off_a, int axis_b,
                      int off_b) const;
};

// Finite-difference 2-jet of the sampled factor at a grid node, lifted
// to frame components (covariant Hessian on the cylinder chart).
// Angular dependence is supported for n in {3, 4}; radial (t-only)
// grids work for every n.
ConformalJet jet_from_grid(const GridField& field, std::span<const int> idx);

// CSV body: header "coord names...,u", one row per node, last axis
// fastest.  JSON header: chart, axes (name, lo, step, count), order.
void export_grid_csv(const GridField& field, std::ostream& out);
void export_grid_header(const GridField& field, std::ostream& out);
GridField import_grid(std::istream& header_json, std::istream& csv);

void save_grid(const GridField& field, const std::string& csv_path,
               const std::string& header_path);
GridField load_grid(const std::string& csv_path, const std::string& header_path);

}  // namespace sigmak::geometry
