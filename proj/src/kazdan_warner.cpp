#include "sigmak/kazdan_warner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sigmak/chart.hpp"
#include "sigmak/numeric.hpp"

namespace sigmak::kw {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_plane(int n, int i, int j) {
    if (i < 1 || j < 1 || i > n || j > n || i == j)
        throw std::invalid_argument("rotation plane indices must be distinct and in [1, n]");
}

}  // namespace

CkField CkField::dilation(int n, Chart chart, std::vector<double> center) {
    if (n < 3) throw std::invalid_argument("dimension must be at least 3");
    if (!center.empty() && int(center.size()) != n)
        throw std::invalid_argument("dilation center must have n components");
    if (chart == Chart::Cylinder) {
        for (double c : center)
            if (c != 0.0)
                throw std::invalid_argument("cylinder dilations must be centered at the puncture");
    }
    return {Kind::Dilation, chart, n, std::move(center), 1, 2};
}

CkField CkField::translation(int n, std::vector<double> direction) {
    if (n < 3) throw std::invalid_argument("dimension must be at least 3");
    if (int(direction.size()) != n)
        throw std::invalid_argument("translation direction must have n components");
    return {Kind::Translation, Chart::Euclidean, n, std::move(direction), 1, 2};
}

CkField CkField::rotation(int n, Chart chart, int plane_i, int plane_j) {
    if (n < 3) throw std::invalid_argument("dimension must be at least 3");
    check_plane(n, plane_i, plane_j);
    return {Kind::Rotation, chart, n, {}, plane_i, plane_j};
}

CkField CkField::special_conformal(int n, std::vector<double> direction) {
    if (n < 3) throw std::invalid_argument("dimension must be at least 3");
    if (int(direction.size()) != n)
        throw std::invalid_argument("special conformal direction must have n components");
    return {Kind::SpecialConformal, Chart::Euclidean, n, std::move(direction), 1, 2};
}

std::vector<double> ck_eval(const CkField& field, std::span<const double> point) {
    const int n = field.n;
    if (field.chart == CkField::Chart::Euclidean) {
        if (int(point.size()) != n)
            throw std::invalid_argument("euclidean points carry n coordinates");
        std::vector<double> out(n, 0.0);
        switch (field.kind) {
            case CkField::Kind::Dilation:
                for (int i = 0; i < n; ++i)
                    out[i] = point[i] - (field.direction.empty() ? 0.0 : field.direction[i]);
                return out;
            case CkField::Kind::Translation:
                return field.direction;
            case CkField::Kind::Rotation:
                out[field.plane_i - 1] = -point[field.plane_j - 1];
                out[field.plane_j - 1] = point[field.plane_i - 1];
                return out;
            case CkField::Kind::SpecialConformal: {
                double r2 = 0.0, bx = 0.0;
                for (int i = 0; i < n; ++i) {
                    r2 += point[i] * point[i];
                    bx += field.direction[i] * point[i];
                }
                for (int i = 0; i < n; ++i)
                    out[i] = r2 * field.direction[i] - 2.0 * bx * point[i];
                return out;
            }
        }
        throw std::logic_error("unhandled field kind");
    }
    // Cylinder chart: point = (t, theta_1, ...), short points pad the
    // trailing angles with pi/2.
    if (point.empty() || int(point.size()) > n)
        throw std::invalid_argument("cylinder points carry 1 to n coordinates");
    std::vector<double> out(n, 0.0);
    switch (field.kind) {
        case CkField::Kind::Dilation:
            out[0] = 1.0;
            return out;
        case CkField::Kind::Rotation: {
            std::span<const double> angles = point.subspan(1);
            std::vector<double> ambient = chart::sphere_ambient(n, angles);
            std::vector<double> gen(n, 0.0);
            gen[field.plane_i - 1] = -ambient[field.plane_j - 1];
            gen[field.plane_j - 1] = ambient[field.plane_i - 1];
            for (int a = 1; a <= n - 1; ++a) {
                std::vector<double> col =
                    chart::sphere_ambient_jacobian_column(n, angles, a);
                double dot = 0.0;
                for (int m = 0; m < n; ++m) dot += gen[m] * col[m];
                double s = chart::sphere_scale(angles, a);
                out[a] = dot / (s * s);
            }
            return out;
        }
        default:
            throw std::invalid_argument(
                "only dilations and rotations are catalogued on the cylinder chart");
    }
}

namespace {

using geometry::GridField;

struct Lattice {
    std::vector<int> dims;
    std::vector<std::size_t> strides;

    explicit Lattice(std::vector<int> d) : dims(std::move(d)) {
        strides.assign(dims.size(), 1);
        for (int a = int(dims.size()) - 2; a >= 0; --a)
            strides[a] = strides[a + 1] * std::size_t(dims[a + 1]);
    }
    std::size_t size() const {
        std::size_t s = 1;
        for (int d : dims) s *= std::size_t(d);
        return s;
    }
    std::size_t flat(std::span<const int> idx) const {
        std::size_t f = 0;
        for (std::size_t a = 0; a < dims.size(); ++a) f += std::size_t(idx[a]) * strides[a];
        return f;
    }
};

// Odometer increment, last axis fastest; false once exhausted.
bool next_index(std::vector<int>& idx, std::span<const int> dims) {
    for (int a = int(dims.size()) - 1; a >= 0; --a) {
        if (++idx[a] < dims[a]) return true;
        idx[a] = 0;
    }
    return false;
}

double fd1(const std::vector<double>& vals, const Lattice& lat, std::span<const int> idx,
           int axis, double step, int order) {
    auto at = [&](int off) {
        std::size_t f = 0;
        for (std::size_t a = 0; a < lat.dims.size(); ++a) {
            int i = idx[a] + (int(a) == axis ? off : 0);
            f += std::size_t(i) * lat.strides[a];
        }
        return vals[f];
    };
    if (order == 2) return (at(1) - at(-1)) / (2.0 * step);
    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * step);
}

double volume_factor(const GridField& g, std::span<const double> pt, double u) {
    const int n = g.background().dim;
    double w = std::pow(u, 2.0 * n / double(n - 2));
    if (g.background().kind == geometry::BackgroundKind::Cylinder)
        w *= chart::sphere_chart_density(n, pt.subspan(1));
    return w;
}

struct GridEval {
    std::vector<int> dims2;  // interior comparison block, per axis
    std::vector<std::vector<double>> nodes;
    std::vector<double> lhs, rhs, residual;
};

GridEval eval_grid(const GridField& g, const CkField& X, int k) {
    const int n = g.background().dim;
    const int r = g.rank();
    const bool cyl = g.background().kind == geometry::BackgroundKind::Cylinder;
    const int m1 = g.order() / 2 + 1;   // jet stencil margin
    const int ss = g.order() / 2;       // derivative stencil reach
    const double coef = double(n - k) / double(n);

    std::vector<int> dims1(r), dims2(r);
    for (int a = 0; a < r; ++a) {
        dims1[a] = g.axes()[a].count - 2 * m1;
        dims2[a] = g.axes()[a].count - 2 * (m1 + ss);
        if (dims2[a] < 1) throw std::invalid_argument("grid too small for interior stencils");
    }
    Lattice lat1(dims1);

    std::vector<double> sigma(lat1.size());
    std::vector<std::vector<double>> wv(r, std::vector<double>(lat1.size()));

    std::vector<int> idx1(r, 0), full(r);
    do {
        for (int a = 0; a < r; ++a) full[a] = m1 + idx1[a];
        geometry::ConformalJet jet = geometry::jet_from_grid(g, full);
        std::vector<double> pt = g.coords(full);
        std::size_t f = lat1.flat(idx1);

        sigma[f] = geometry::sigma_k_curvature(jet, k).value;
        symfun::SymMatrix hr = pohozaev::hring_frame(jet, k);
        std::vector<double> xc = ck_eval(X, pt);
        std::vector<double> s =
            cyl ? chart::cylinder_scales(n, std::span<const double>(pt).subspan(1))
                : std::vector<double>(n, 1.0);
        double w = volume_factor(g, pt, g.value(full));
        for (int b = 0; b < r; ++b) {
            double v = 0.0;
            for (int a = 0; a < n; ++a) v += xc[a] * (s[a] / s[b]) * hr(b, a);
            wv[b][f] = w * v;
        }
    } while (next_index(idx1, dims1));

    GridEval ev;
    ev.dims2 = dims2;
    std::vector<int> idx2(r, 0);
    do {
        for (int a = 0; a < r; ++a) {
            idx1[a] = ss + idx2[a];
            full[a] = m1 + ss + idx2[a];
        }
        std::vector<double> pt = g.coords(full);
        std::vector<double> xc = ck_eval(X, pt);

        double lhs = 0.0;
        for (int a = 0; a < r; ++a)
            lhs += xc[a] * fd1(sigma, lat1, idx1, a, g.axes()[a].step, g.order());
        lhs *= coef;

        double rhs = 0.0;
        for (int b = 0; b < r; ++b)
            rhs += fd1(wv[b], lat1, idx1, b, g.axes()[b].step, g.order());
        rhs /= volume_factor(g, pt, g.value(full));

        ev.nodes.push_back(std::move(pt));
        ev.lhs.push_back(lhs);
        ev.rhs.push_back(rhs);
        ev.residual.push_back(lhs - rhs);
    } while (next_index(idx2, dims2));
    return ev;
}

void check_scope(const GridField& g, const CkField& X, int k) {
    const int n = g.background().dim;
    if (X.n != n) throw std::invalid_argument("field dimension mismatch");
    if (k < 1 || k > n - 1) throw std::invalid_argument("k must lie in [1, n-1]");
    const bool cyl = g.background().kind == geometry::BackgroundKind::Cylinder;
    if (cyl != (X.chart == CkField::Chart::Cylinder))
        throw std::invalid_argument("field chart must match the grid background");
    if (!cyl) return;
    if (X.kind == CkField::Kind::Dilation) return;
    if (X.kind != CkField::Kind::Rotation)
        throw std::invalid_argument(
            "only dilations and rotations are catalogued on the cylinder chart");
    if (g.rank() > 1) {
        // Angular grids resolve only axisymmetric data, so the sole
        // admissible rotation is the azimuthal one.
        int lo = std::min(X.plane_i, X.plane_j), hi = std::max(X.plane_i, X.plane_j);
        if (lo != n - 1 || hi != n)
            throw std::invalid_argument(
                "angular grids support only the azimuthal rotation plane");
    }
}

}  // namespace

DivergenceReport divergence_identity_residual(const geometry::GridField& field,
                                              const CkField& X, int k) {
    check_scope(field, X, k);
    GridEval fine = eval_grid(field, X, k);
    GridField half = field.coarsen();
    GridEval coarse = eval_grid(half, X, k);

    const int r = field.rank();
    const int m = field.order() / 2 + 1 + field.order() / 2;  // box offset m1 + ss

    Lattice lat_f(fine.dims2);
    DivergenceReport rep;
    rep.fd_order = field.order();
    rep.k = k;
    rep.axes = field.axes();

    double max_f = 0.0, sum_f = 0.0, max_c = 0.0, sum_c = 0.0;
    std::vector<int> idx2c(r, 0), idx2f(r);
    Lattice lat_c(coarse.dims2);
    do {
        // Coarse node j sits at fine node 2j; shift both into their
        // interior blocks.
        for (int a = 0; a < r; ++a) idx2f[a] = m + 2 * idx2c[a];
        std::size_t fc = lat_c.flat(idx2c);
        std::size_t ff = lat_f.flat(idx2f);

        rep.nodes.push_back(fine.nodes[ff]);
        rep.lhs.push_back(fine.lhs[ff]);
        rep.rhs.push_back(fine.rhs[ff]);

        double rf = std::fabs(fine.residual[ff]);
        double rc = std::fabs(coarse.residual[fc]);
        max_f = std::max(max_f, rf);
        max_c = std::max(max_c, rc);
        sum_f += rf * rf;
        sum_c += rc * rc;
    } while (next_index(idx2c, coarse.dims2));

    double count = double(rep.lhs.size());
    rep.max_residual = max_f;
    rep.l2_residual = std::sqrt(sum_f / count);
    rep.max_residual_coarse = max_c;
    rep.l2_residual_coarse = std::sqrt(sum_c / count);
    rep.order_estimate = (max_f > 0.0 && max_c > 0.0) ? std::log2(max_c / max_f) : 0.0;
    return rep;
}

AnnulusTerms annulus_terms(const geometry::GridField& field, const CkField& X, int k,
                           double t_a, double t_b, const pohozaev::SphereGrid& grid) {
    check_scope(field, X, k);
    if (field.background().kind != geometry::BackgroundKind::Cylinder)
        throw std::invalid_argument("annuli live on the cylinder chart");
    const int n = field.background().dim;
    const int r = field.rank();
    const int m1 = field.order() / 2 + 1;
    const int ss = field.order() / 2;
    const geometry::GridAxis& taxis = field.axes()[0];
    const double coef = double(n - k) / double(n);
    const double vol_exp = 2.0 * n / double(n - 2);

    auto locate = [&](double t) {
        int i = int(std::lround((t - taxis.lo) / taxis.step));
        if (i < 0 || i >= taxis.count ||
            std::fabs(taxis.lo + i * taxis.step - t) > 1e-9)
            throw std::invalid_argument("annulus boundary must land on a grid node");
        return i;
    };
    int ia = locate(t_a), ib = locate(t_b);
    if (ia >= ib) throw std::invalid_argument("annulus requires t_a < t_b");
    if (ia < m1 + ss || ib > taxis.count - 1 - (m1 + ss))
        throw std::invalid_argument("annulus boundaries too close to the grid edge");
    if (ib - ia + 1 < 4)
        throw std::invalid_argument("annulus needs at least four t nodes");
    std::vector<double> simp = simpson_weights(ib - ia + 1, taxis.step);

    if (r == 1) {
        // Radial factor: the angular integral is omega_{n-1} times the
        // on-axis integrand.
        const double omega = sphere_volume(n - 1);
        std::vector<double> sig(std::size_t(ib - ia + 1 + 2 * ss));
        for (int i = ia - ss; i <= ib + ss; ++i) {
            int one[1] = {i};
            sig[std::size_t(i - (ia - ss))] =
                geometry::sigma_k_curvature(geometry::jet_from_grid(field, one), k).value;
        }
        auto boundary = [&](int i) {
            int one[1] = {i};
            geometry::ConformalJet jet = geometry::jet_from_grid(field, one);
            symfun::SymMatrix hr = pohozaev::hring_frame(jet, k);
            std::vector<double> pt = field.coords(one);
            std::vector<double> xc = ck_eval(X, pt);
            std::vector<double> s = chart::cylinder_scales(n, {});
            double flux = 0.0;
            for (int a = 0; a < n; ++a) flux += xc[a] * s[a] * hr(0, a);
            return flux * std::pow(field.value(one), vol_exp) * omega;
        };
        double vol = 0.0;
        for (int i = ia; i <= ib; ++i) {
            int one[1] = {i};
            std::vector<double> pt = field.coords(one);
            double ds = fd1(sig, Lattice({int(sig.size())}),
                            std::array<int, 1>{i - (ia - ss)}, 0, taxis.step,
                            field.order());
            double xt = ck_eval(X, pt)[0];
            vol += simp[std::size_t(i - ia)] * coef * xt * ds *
                   std::pow(field.value(one), vol_exp) * omega;
        }
        return {vol, boundary(ib), boundary(ia)};
    }

    // Angular factor: the passed quadrature must be the chart lattice of
    // this grid's angular axes with margin m1 + ss, so that every node
    // admits both the jet and the derivative stencils.
    grid.validate();
    std::span<const geometry::GridAxis> ang(field.axes().data() + 1, std::size_t(r - 1));
    std::vector<int> adims1(r - 1), alat_dims(r - 1), amargin(r - 1);
    for (int a = 0; a < r - 1; ++a) {
        adims1[a] = ang[a].count - 2 * m1;
        alat_dims[a] = ang[a].count - 2 * (m1 + ss);
        amargin[a] = m1 + ss;
        if (alat_dims[a] < 1)
            throw std::invalid_argument("grid too small for interior stencils");
    }
    std::size_t expected = 1;
    for (int d : alat_dims) expected *= std::size_t(d);
    if (grid.nodes.size() != expected)
        throw std::invalid_argument("sphere grid does not match the chart lattice");

    // sigma over [ia-ss, ib+ss] x angular margin-m1 block.
    std::vector<int> dims1(r);
    dims1[0] = ib - ia + 1 + 2 * ss;
    for (int a = 1; a < r; ++a) dims1[a] = adims1[a - 1];
    Lattice lat1(dims1);
    std::vector<double> sigma(lat1.size());
    {
        std::vector<int> idx1(r, 0), full(r);
        do {
            full[0] = ia - ss + idx1[0];
            for (int a = 1; a < r; ++a) full[a] = m1 + idx1[a];
            sigma[lat1.flat(idx1)] =
                geometry::sigma_k_curvature(geometry::jet_from_grid(field, full), k)
                    .value;
        } while (next_index(idx1, dims1));
    }

    auto for_each_angular = [&](const std::function<void(std::size_t,
                                                         std::span<const int>)>& fn) {
        std::vector<int> aidx(r - 1, 0);
        std::size_t j = 0;
        do {
            std::vector<int> full_a(r - 1);
            for (int a = 0; a < r - 1; ++a) {
                full_a[a] = amargin[a] + aidx[a];
                double theta = ang[a].lo + full_a[a] * ang[a].step;
                if (std::fabs(theta - grid.nodes[j][std::size_t(a)]) > 1e-9)
                    throw std::invalid_argument(
                        "sphere grid does not match the chart lattice");
            }
            fn(j, full_a);
            ++j;
        } while (next_index(aidx, alat_dims));
    };

    auto boundary = [&](int i) {
        double acc = 0.0;
        for_each_angular([&](std::size_t j, std::span<const int> full_a) {
            std::vector<int> full(r);
            full[0] = i;
            for (int a = 1; a < r; ++a) full[a] = full_a[a - 1];
            geometry::ConformalJet jet = geometry::jet_from_grid(field, full);
            symfun::SymMatrix hr = pohozaev::hring_frame(jet, k);
            std::vector<double> pt = field.coords(full);
            std::vector<double> xc = ck_eval(X, pt);
            std::vector<double> s =
                chart::cylinder_scales(n, std::span<const double>(pt).subspan(1));
            double flux = 0.0;
            for (int a = 0; a < n; ++a) flux += xc[a] * s[a] * hr(0, a);
            acc += grid.weights[j] * flux * std::pow(field.value(full), vol_exp);
        });
        return acc;
    };

    double vol = 0.0;
    for (int i = ia; i <= ib; ++i) {
        double slab = 0.0;
        for_each_angular([&](std::size_t j, std::span<const int> full_a) {
            std::vector<int> full(r), idx1(r);
            full[0] = i;
            idx1[0] = ss + (i - ia);
            for (int a = 1; a < r; ++a) {
                full[a] = full_a[a - 1];
                idx1[a] = full[a] - m1;
            }
            std::vector<double> pt = field.coords(full);
            std::vector<double> xc = ck_eval(X, pt);
            double adv = 0.0;
            for (int a = 0; a < r; ++a)
                adv += xc[a] * fd1(sigma, lat1, idx1, a, field.axes()[a].step,
                                   field.order());
            slab += grid.weights[j] * coef * adv * std::pow(field.value(full), vol_exp);
        });
        vol += simp[std::size_t(i - ia)] * slab;
    }
    return {vol, boundary(ib), boundary(ia)};
}

double annulus_balance(const geometry::GridField& field, const CkField& X, int k,
                       double t_a, double t_b, const pohozaev::SphereGrid& grid) {
    AnnulusTerms terms = annulus_terms(field, X, k, t_a, t_b, grid);
    return std::fabs(terms.volume - (terms.boundary_hi - terms.boundary_lo));
}

void export_report_json(const DivergenceReport& report, std::ostream& out) {
    out << "{\"fd_order\":" << report.fd_order << ",\"k\":" << report.k
        << ",\"comparison_nodes\":" << report.lhs.size()
        << ",\"max_residual\":" << fmt17(report.max_residual)
        << ",\"l2_residual\":" << fmt17(report.l2_residual)
        << ",\"max_residual_coarse\":" << fmt17(report.max_residual_coarse)
        << ",\"l2_residual_coarse\":" << fmt17(report.l2_residual_coarse)
        << ",\"order_estimate\":" << fmt17(report.order_estimate) << "}\n";
}

void export_residual_csv(const DivergenceReport& report, std::ostream& out) {
    for (const geometry::GridAxis& ax : report.axes) out << ax.name << ",";
    out << "lhs,rhs,residual\n";
    for (std::size_t i = 0; i < report.lhs.size(); ++i) {
        for (double c : report.nodes[i]) out << fmt17(c) << ",";
        out << fmt17(report.lhs[i]) << "," << fmt17(report.rhs[i]) << ","
            << fmt17(report.lhs[i] - report.rhs[i]) << "\n";
    }
}

}  // namespace sigmak::kw
