#include "sigmak/gridfield.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sigmak/chart.hpp"

namespace sigmak::geometry {

namespace {

void check_axes(const Background& bg, const std::vector<GridAxis>& axes, int order,
                double collar) {
    const int n = bg.dim;
    if (order != 2 && order != 4)
        throw std::invalid_argument("GridField: order must be 2 or 4");
    if (axes.empty()) throw std::invalid_argument("GridField: no axes");
    for (const auto& ax : axes) {
        if (ax.count < 2 || !(ax.step > 0.0))
            throw std::invalid_argument("GridField: bad axis spacing");
    }
    switch (bg.kind) {
        case BackgroundKind::Euclidean:
            if (int(axes.size()) != n)
                throw std::invalid_argument(
                    "GridField: Euclidean grids need all n axes");
            break;
        case BackgroundKind::Cylinder: {
            if (int(axes.size()) > n)
                throw std::invalid_argument("GridField: more axes than dimensions");
            // Axes beyond t are sphere polar angles (and possibly a final
            // azimuth); polar ranges must avoid the chart poles.
            for (std::size_t i = 1; i < axes.size(); ++i) {
                const bool azimuth = int(i) == n - 1;
                if (azimuth) continue;
                const double hi = axes[i].lo + axes[i].step * (axes[i].count - 1);
                if (axes[i].lo < collar || hi > std::numbers::pi - collar)
                    throw std::invalid_argument(
                        "GridField: polar axis enters the pole collar");
            }
            break;
        }
        case BackgroundKind::RoundSphere:
            throw std::invalid_argument("GridField: sphere chart grids unsupported");
    }
}

}  // namespace

GridField::GridField(Background bg, std::vector<GridAxis> axes,
                     std::vector<double> samples, int order, double polar_collar)
    : bg_(bg), axes_(std::move(axes)), samples_(std::move(samples)), order_(order) {
    check_axes(bg_, axes_, order_, polar_collar);
    std::size_t total = 1;
    for (const auto& ax : axes_) total *= std::size_t(ax.count);
    if (samples_.size() != total)
        throw std::invalid_argument("GridField: sample count mismatch");
    for (double v : samples_)
        if (!(v > 0.0))
            throw std::invalid_argument("GridField: samples must be positive");
    strides_.assign(axes_.size(), 1);
    for (int a = int(axes_.size()) - 2; a >= 0; --a)
        strides_[std::size_t(a)] =
            strides_[std::size_t(a) + 1] * std::size_t(axes_[std::size_t(a) + 1].count);
}

GridField GridField::sample(Background bg, std::vector<GridAxis> axes, int order,
                            const std::function<double(std::span<const double>)>& f,
                            double polar_collar) {
    std::size_t total = 1;
    for (const auto& ax : axes) total *= std::size_t(ax.count);
    std::vector<double> vals(total);
    std::vector<int> idx(axes.size(), 0);
    std::vector<double> pt(axes.size());
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t a = 0; a < axes.size(); ++a)
            pt[a] = axes[a].lo + axes[a].step * idx[a];
        vals[flat] = f(pt);
        for (int a = int(axes.size()) - 1; a >= 0; --a) {
            if (++idx[std::size_t(a)] < axes[std::size_t(a)].count) break;
            idx[std::size_t(a)] = 0;
        }
    }
    return GridField(bg, std::move(axes), std::move(vals), order, polar_collar);
}

std::size_t GridField::flat(std::span<const int> idx) const {
    if (idx.size() != axes_.size())
        throw std::invalid_argument("GridField: index rank mismatch");
    std::size_t f = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (idx[a] < 0 || idx[a] >= axes_[a].count)
            throw std::out_of_range("GridField: index outside grid");
        f += strides_[a] * std::size_t(idx[a]);
    }
    return f;
}

double GridField::value(std::span<const int> idx) const { return samples_[flat(idx)]; }

std::vector<double> GridField::coords(std::span<const int> idx) const {
    flat(idx);  // bounds check
    std::vector<double> pt(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a)
        pt[a] = axes_[a].lo + axes_[a].step * idx[a];
    return pt;
}

bool GridField::interior(std::span<const int> idx, int extra) const {
    const int margin = order_ / 2 + 1 + extra;
    for (std::size_t a = 0; a < axes_.size(); ++a)
        if (idx[a] < margin || idx[a] > axes_[a].count - 1 - margin) return false;
    return true;
}

double GridField::at_offset(std::span<const int> idx, int axis, int off) const {
    std::vector<int> j(idx.begin(), idx.end());
    j[std::size_t(axis)] += off;
    return value(j);
}

double GridField::at_offset2(std::span<const int> idx, int axis_a, int off_a,
                             int axis_b, int off_b) const {
    std::vector<int> j(idx.begin(), idx.end());
    j[std::size_t(axis_a)] += off_a;
    j[std::size_t(axis_b)] += off_b;
    return value(j);
}

double GridField::d1(std::span<const int> idx, int axis) const {
    const double s = axes_[std::size_t(axis)].step;
    if (order_ == 2)
        return (at_offset(idx, axis, 1) - at_offset(idx, axis, -1)) / (2.0 * s);
    return (-at_offset(idx, axis, 2) + 8.0 * at_offset(idx, axis, 1) -
            8.0 * at_offset(idx, axis, -1) + at_offset(idx, axis, -2)) /
           (12.0 * s);
}

double GridField::d2(std::span<const int> idx, int axis) const {
    const double s = axes_[std::size_t(axis)].step;
    if (order_ == 2)
        return (at_offset(idx, axis, 1) - 2.0 * value(idx) + at_offset(idx, axis, -1)) /
               (s * s);
    return (-at_offset(idx, axis, 2) + 16.0 * at_offset(idx, axis, 1) -
            30.0 * value(idx) + 16.0 * at_offset(idx, axis, -1) -
            at_offset(idx, axis, -2)) /
           (12.0 * s * s);
}

double GridField::d11(std::span<const int> idx, int axis_a, int axis_b) const {
    if (axis_a == axis_b) return d2(idx, axis_a);
    const double sa = axes_[std::size_t(axis_a)].step;
    const double sb = axes_[std::size_t(axis_b)].step;
    if (order_ == 2)
        return (at_offset2(idx, axis_a, 1, axis_b, 1) -
                at_offset2(idx, axis_a, 1, axis_b, -1) -
                at_offset2(idx, axis_a, -1, axis_b, 1) +
                at_offset2(idx, axis_a, -1, axis_b, -1)) /
               (4.0 * sa * sb);
    static constexpr int off[4] = {-2, -1, 1, 2};
    static constexpr double cf[4] = {1.0, -8.0, 8.0, -1.0};
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            acc += cf[i] * cf[j] * at_offset2(idx, axis_a, off[i], axis_b, off[j]);
    return acc / (144.0 * sa * sb);
}

GridField GridField::coarsen() const {
    std::vector<GridAxis> axes = axes_;
    for (auto& ax : axes) {
        if (ax.count % 2 == 0)
            throw std::invalid_argument("GridField::coarsen: axis counts must be odd");
        ax.count = (ax.count + 1) / 2;
        ax.step *= 2.0;
    }
    std::size_t total = 1;
    for (const auto& ax : axes) total *= std::size_t(ax.count);
    std::vector<double> vals(total);
    std::vector<int> cidx(axes.size(), 0);
    std::vector<int> fidx(axes.size(), 0);
    for (std::size_t f = 0; f < total; ++f) {
        for (std::size_t a = 0; a < axes.size(); ++a) fidx[a] = 2 * cidx[a];
        vals[f] = value(fidx);
        for (int a = int(axes.size()) - 1; a >= 0; --a) {
            if (++cidx[std::size_t(a)] < axes[std::size_t(a)].count) break;
            cidx[std::size_t(a)] = 0;
        }
    }
    return GridField(bg_, std::move(axes), std::move(vals), order_);
}

ConformalJet jet_from_grid(const GridField& field, std::span<const int> idx) {
    if (!field.interior(idx))
        throw std::out_of_range("jet_from_grid: stencil touches the boundary");
    const int n = field.background().dim;
    const int rank = field.rank();
    const double u = field.value(idx);

    if (field.background().kind == BackgroundKind::Euclidean) {
        std::vector<double> grad(std::size_t(n), 0.0);
        symfun::SymMatrix hess(n);
        for (int a = 0; a < n; ++a) {
            grad[std::size_t(a)] = field.d1(idx, a);
            for (int b = a; b < n; ++b) hess.set(a, b, field.d11(idx, a, b));
        }
        return ConformalJet(field.background(), u, std::move(grad), std::move(hess));
    }

    // Cylinder chart.
    if (rank > 1 && n > 4)
        throw std::invalid_argument(
            "jet_from_grid: angular dependence supported only for n in {3, 4}");
    const auto pt = field.coords(idx);
    const std::span<const double> angles(pt.data() + 1, std::size_t(rank - 1));
    const auto scales = chart::cylinder_scales(n, angles);

    std::vector<double> dchart(std::size_t(rank), 0.0);
    for (int a = 0; a < rank; ++a) dchart[std::size_t(a)] = field.d1(idx, a);

    std::vector<double> grad(std::size_t(n), 0.0);
    for (int a = 0; a < rank; ++a)
        grad[std::size_t(a)] = dchart[std::size_t(a)] / scales[std::size_t(a)];

    symfun::SymMatrix hess(n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            double h = 0.0;
            if (a < rank && b < rank) h = field.d11(idx, a, b);
            for (int c = 0; c < rank; ++c)
                h -= chart::cylinder_christoffel(n, angles, c, a, b) *
                     dchart[std::size_t(c)];
            hess.set(a, b, h / (scales[std::size_t(a)] * scales[std::size_t(b)]));
        }
    return ConformalJet(field.background(), u, std::move(grad), std::move(hess));
}

void export_grid_csv(const GridField& field, std::ostream& out) {
    char buf[64];
    const auto& axes = field.axes();
    for (std::size_t a = 0; a < axes.size(); ++a) out << axes[a].name << ",";
    out << "u\n";
    std::vector<int> idx(axes.size(), 0);
    const std::size_t total = field.samples().size();
    for (std::size_t f = 0; f < total; ++f) {
        for (std::size_t a = 0; a < axes.size(); ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", axes[a].lo + axes[a].step * idx[a]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", field.samples()[f]);
        out << buf << "\n";
        for (int a = int(axes.size()) - 1; a >= 0; --a) {
            if (++idx[std::size_t(a)] < axes[std::size_t(a)].count) break;
            idx[std::size_t(a)] = 0;
        }
    }
}

void export_grid_header(const GridField& field, std::ostream& out) {
    nlohmann::ordered_json j;
    switch (field.background().kind) {
        case BackgroundKind::Euclidean: j["chart"] = "euclidean"; break;
        case BackgroundKind::Cylinder: j["chart"] = "cylinder"; break;
        case BackgroundKind::RoundSphere: j["chart"] = "sphere"; break;
    }
    j["dim"] = field.background().dim;
    j["order"] = field.order();
    auto axes = nlohmann::ordered_json::array();
    for (const auto& ax : field.axes()) {
        axes.push_back({{"name", ax.name},
                        {"lo", ax.lo},
                        {"step", ax.step},
                        {"count", ax.count}});
    }
    j["axes"] = axes;
    out << j.dump(2) << "\n";
}

GridField import_grid(std::istream& header_json, std::istream& csv) {
    nlohmann::json j = nlohmann::json::parse(header_json);
    Background bg{};
    const std::string chart = j.at("chart").get<std::string>();
    if (chart == "euclidean")
        bg.kind = BackgroundKind::Euclidean;
    else if (chart == "cylinder")
        bg.kind = BackgroundKind::Cylinder;
    else
        throw std::invalid_argument("import_grid: unknown chart '" + chart + "'");
    bg.dim = j.at("dim").get<int>();
    const int order = j.at("order").get<int>();
    std::vector<GridAxis> axes;
    for (const auto& a : j.at("axes")) {
        axes.push_back(GridAxis{a.at("name").get<std::string>(),
                                a.at("lo").get<double>(), a.at("step").get<double>(),
                                a.at("count").get<int>()});
    }
    std::size_t total = 1;
    for (const auto& ax : axes) total *= std::size_t(ax.count);

    std::string line;
    if (!std::getline(csv, line))
        throw std::invalid_argument("import_grid: empty CSV");
    std::vector<double> vals;
    vals.reserve(total);
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const auto pos = line.find_last_of(',');
        if (pos == std::string::npos)
            throw std::invalid_argument("import_grid: malformed CSV row");
        vals.push_back(std::stod(line.substr(pos + 1)));
    }
    return GridField(bg, std::move(axes), std::move(vals), order);
}

void save_grid(const GridField& field, const std::string& csv_path,
               const std::string& header_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("save_grid: cannot open " + csv_path);
    export_grid_csv(field, csv);
    std::ofstream hdr(header_path);
    if (!hdr) throw std::runtime_error("save_grid: cannot open " + header_path);
    export_grid_header(field, hdr);
}

GridField load_grid(const std::string& csv_path, const std::string& header_path) {
    std::ifstream hdr(header_path);
    if (!hdr) throw std::runtime_error("load_grid: cannot open " + header_path);
    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("load_grid: cannot open " + csv_path);
    return import_grid(hdr, csv);
}

}  // namespace sigmak::geometry
