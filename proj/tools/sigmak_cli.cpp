// Batch front end: every computation the library exposes, with CSV/JSON
// output suitable for scripted runs.  All numbers print with 17
// significant digits and identical invocations produce identical bytes.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sigmak/delaunay.hpp"
#include "sigmak/geometry.hpp"
#include "sigmak/gridfield.hpp"
#include "sigmak/kazdan_warner.hpp"
#include "sigmak/numeric.hpp"
#include "sigmak/pohozaev.hpp"
#include "sigmak/symfun.hpp"

namespace {

using namespace sigmak;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Route a writer to stdout or to the --out path.
void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    writer(out);
}

// Plain key=value lines naming long flags of the invoked subcommand.
// Keys already given on the command line keep their explicit values.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + long(i));
        } else {
            ++i;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        if (line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string value = line.substr(eq + 1);
        const auto v0 = value.find_first_not_of(" \t");
        value = v0 == std::string::npos ? std::string() : value.substr(v0);
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!given) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

std::vector<double> parse_tuple(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        vals.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad number: " + item);
    }
    if (vals.empty()) throw std::invalid_argument("empty tuple: " + text);
    return vals;
}

kw::CkField parse_ck(const std::string& text, int n) {
    if (text == "dilation") return kw::CkField::dilation(n, kw::CkField::Chart::Cylinder);
    const std::string rot = "rotation:";
    if (text.rfind(rot, 0) == 0) {
        std::vector<double> ij = parse_tuple(text.substr(rot.size()));
        if (ij.size() != 2) throw std::invalid_argument("rotation wants two indices");
        return kw::CkField::rotation(n, kw::CkField::Chart::Cylinder, int(ij[0]),
                                     int(ij[1]));
    }
    throw std::invalid_argument("unknown field: " + text +
                                " (use dilation or rotation:i,j)");
}

int g_exit = 0;

// ---------------------------------------------------------------- sigma

struct SigmaOpts {
    std::string factor;
    std::string bg = "euclidean";
    int n = 0, k = 0;
    std::vector<std::string> points;
    std::string grid_csv, grid_header;
    std::string format = "json";
    std::string out;
};

void run_sigma(const SigmaOpts& o) {
    if (o.n < 3) throw std::invalid_argument("n must be >= 3");
    if (o.k < 1 || o.k > o.n) throw std::invalid_argument("k must lie in [1, n]");

    enum class Factor { RoundSphere, Const, CylinderConst, Grid } kind;
    double const_value = 0.0;
    bool cylinder = o.bg == "cylinder";
    std::optional<geometry::GridField> grid;

    if (o.factor == "round-sphere") {
        kind = Factor::RoundSphere;
        cylinder = false;
    } else if (o.factor == "cylinder-const") {
        kind = Factor::CylinderConst;
        cylinder = true;
        const_value = delaunay::cylinder_constant({o.n, o.k}).c_cyl;
    } else if (o.factor.rfind("const:", 0) == 0) {
        kind = Factor::Const;
        const_value = std::stod(o.factor.substr(6));
    } else if (o.factor == "grid") {
        kind = Factor::Grid;
        grid = geometry::load_grid(o.grid_csv, o.grid_header);
        cylinder = grid->background().kind == geometry::BackgroundKind::Cylinder;
    } else {
        throw std::invalid_argument(
            "unknown factor (round-sphere | const:<v> | cylinder-const | grid)");
    }

    int width = kind == Factor::Grid ? grid->rank() : o.n;
    std::vector<std::vector<double>> pts;
    for (const std::string& p : o.points) pts.push_back(parse_tuple(p));
    if (pts.empty()) pts.push_back({0.0});
    for (auto& p : pts) {
        if (int(p.size()) > width)
            throw std::invalid_argument("point has too many coordinates");
        p.resize(std::size_t(width), cylinder ? std::acos(0.0) : 0.0);
    }

    const double normalization = binomial(o.n, o.k) * std::pow(0.5, o.k);
    std::vector<geometry::SigmaKValue> rows;
    for (const auto& p : pts) {
        geometry::ConformalJet jet = [&] {
            switch (kind) {
                case Factor::RoundSphere:
                    return geometry::round_sphere_jet(o.n, p);
                case Factor::Const:
                    if (cylinder)
                        return geometry::radial_cylinder_jet(o.n, const_value, 0.0, 0.0);
                    return geometry::constant_jet(
                        {geometry::BackgroundKind::Euclidean, o.n}, const_value);
                case Factor::CylinderConst:
                    return geometry::radial_cylinder_jet(o.n, const_value, 0.0, 0.0);
                case Factor::Grid: {
                    std::vector<int> idx(p.size());
                    for (int a = 0; a < grid->rank(); ++a) {
                        const geometry::GridAxis& ax = grid->axes()[std::size_t(a)];
                        int i = int(std::lround((p[std::size_t(a)] - ax.lo) / ax.step));
                        if (i < 0 || i >= ax.count ||
                            std::fabs(ax.lo + i * ax.step - p[std::size_t(a)]) > 1e-9)
                            throw std::invalid_argument("point is not a grid node");
                        idx[std::size_t(a)] = i;
                    }
                    return geometry::jet_from_grid(*grid, idx);
                }
            }
            throw std::logic_error("unhandled factor");
        }();
        rows.push_back(geometry::sigma_k_curvature(jet, o.k));
    }

    emit(o.out, [&](std::ostream& os) {
        if (o.format == "csv") {
            for (int a = 0; a < width; ++a) os << "c" << (a + 1) << ",";
            os << "sigma_k,normalization,residual\n";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                for (double c : pts[i]) os << fmt17(c) << ",";
                os << fmt17(rows[i].value) << "," << fmt17(normalization) << ","
                   << fmt17(rows[i].residual) << "\n";
            }
        } else {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                os << "{\"n\":" << o.n << ",\"k\":" << o.k << ",\"point\":[";
                for (std::size_t a = 0; a < pts[i].size(); ++a)
                    os << (a ? "," : "") << fmt17(pts[i][a]);
                os << "],\"sigma_k\":" << fmt17(rows[i].value)
                   << ",\"normalization\":" << fmt17(normalization)
                   << ",\"residual\":" << fmt17(rows[i].residual) << "}\n";
            }
        }
    });
}

// ------------------------------------------------------------------ ode

struct OdeOpts {
    int n = 0, k = 1;
    double h = 0.0;
    bool sphere = false;
    bool has_h = false;
    double t_min = 0.0, t_max = 0.0;
    double tol = 1e-10;
    double step = 0.01;
    double drift_tol = 1e-8;
    double h_min = 0.0, h_max = 0.0;
    int steps = 0;
    std::string out;
};

void run_ode_solve(const OdeOpts& o) {
    delaunay::OdeParams params{o.n, o.k};
    if (o.sphere == o.has_h)
        throw std::invalid_argument("pass exactly one of --h and --sphere");
    if (!(o.t_max > o.t_min)) throw std::invalid_argument("need t-max > t-min");

    delaunay::Trajectory traj;
    if (o.sphere) {
        params.validate();
        std::vector<delaunay::DelaunayState> samples;
        double t = o.t_min;
        while (t < o.t_max - 1e-12) {
            auto sp = delaunay::sphere_solution(t, o.n);
            samples.push_back({t, sp.u, sp.p});
            t = o.t_min + double(samples.size()) * o.step;
        }
        auto sp = delaunay::sphere_solution(o.t_max, o.n);
        samples.push_back({o.t_max, sp.u, sp.p});
        double drift = 0.0;
        for (const auto& s : samples)
            drift = std::max(drift, std::fabs(delaunay::hamiltonian(s.u, s.p, params)));
        traj = delaunay::Trajectory{params, std::move(samples), 0.0, drift};
    } else {
        if (!(o.t_min <= 0.0) || !(o.t_max >= 0.0))
            throw std::invalid_argument("the t range must contain the anchor t = 0");
        auto roots = delaunay::roots_for_h(o.h, params);
        delaunay::DelaunayState start{0.0, roots.u_max, 0.0};
        traj.params = params;
        traj.h0 = delaunay::hamiltonian(start.u, start.p, params);
        traj.max_drift = 0.0;
        if (o.t_min < 0.0) {
            auto leg = delaunay::integrate(start, o.t_min, o.tol, params, o.step);
            traj.samples = leg.samples;
            traj.max_drift = std::max(traj.max_drift, leg.max_drift);
        } else {
            traj.samples.push_back(start);
        }
        if (o.t_max > 0.0) {
            auto leg = delaunay::integrate(start, o.t_max, o.tol, params, o.step);
            traj.samples.insert(traj.samples.end(), leg.samples.begin() + 1,
                                leg.samples.end());
            traj.max_drift = std::max(traj.max_drift, leg.max_drift);
        }
    }
    emit(o.out, [&](std::ostream& os) { delaunay::export_trajectory_csv(traj, os); });
    if (traj.max_drift > o.drift_tol) g_exit = 1;
}

void run_ode_period(const OdeOpts& o) {
    delaunay::OdeParams params{o.n, o.k};
    double T = delaunay::period(o.h, params, o.tol);
    emit(o.out, [&](std::ostream& os) {
        os << "h,period\n" << fmt17(o.h) << "," << fmt17(T) << "\n";
    });
}

void run_ode_scan(const OdeOpts& o) {
    delaunay::OdeParams params{o.n, o.k};
    if (o.steps < 1) throw std::invalid_argument("need at least one step");
    if (!(o.h_min <= o.h_max)) throw std::invalid_argument("need h-min <= h-max");
    emit(o.out, [&](std::ostream& os) {
        os << "h,period,u_min,u_max,dk_closed_form\n";
        for (int i = 0; i < o.steps; ++i) {
            // Endpoints land exactly on the requested bounds.
            double h = i == 0 ? o.h_min
                     : i == o.steps - 1
                           ? o.h_max
                           : o.h_min + (o.h_max - o.h_min) * double(i) /
                                           double(o.steps - 1);
            auto roots = delaunay::roots_for_h(h, params);
            double T = delaunay::period(h, params, o.tol);
            os << fmt17(h) << "," << fmt17(T) << "," << fmt17(roots.u_min) << ","
               << fmt17(roots.u_max) << ","
               << fmt17(pohozaev::dk_closed_form(h, params)) << "\n";
        }
    });
}

// ------------------------------------------------------------- pohozaev

struct PohozaevOpts {
    int n = 0, k = 0;
    double h = 0.0;
    std::string metric = "delaunay";
    double t0 = 0.0;
    std::string t0s = "0,1,2,3";
    double rel_tol = 1e-6;
    double orbit_tol = 1e-12;
    std::string out;
};

pohozaev::PuncturedMetric make_radial_metric(const PohozaevOpts& o, double t_reach) {
    delaunay::OdeParams params{o.n, o.k};
    if (o.metric == "sphere") return pohozaev::PuncturedMetric::sphere(params);
    if (o.metric == "cylinder") return pohozaev::PuncturedMetric::cylinder(params);
    if (o.metric == "delaunay")
        return pohozaev::PuncturedMetric::delaunay_orbit(
            params, o.h, std::min(-6.0, -t_reach - 1.0), std::max(6.0, t_reach + 1.0),
            o.orbit_tol);
    throw std::invalid_argument("unknown metric (delaunay | sphere | cylinder)");
}

void run_pohozaev_compute(const PohozaevOpts& o) {
    auto metric = make_radial_metric(o, std::fabs(o.t0));
    auto grid = pohozaev::SphereGrid::product_gauss(o.n, 6, 6);
    pohozaev::DkResult res = pohozaev::compute_dk(metric, o.t0, grid);
    emit(o.out, [&](std::ostream& os) { pohozaev::export_dk_json(res, os); });
    if (res.closed_form) {
        double gate = o.rel_tol * std::fabs(*res.closed_form);
        if (*res.closed_form == 0.0) gate = o.rel_tol;
        if (res.residual > gate) g_exit = 1;
    }
}

void run_pohozaev_check_sum(const PohozaevOpts& o) {
    auto metric = make_radial_metric(o, std::fabs(o.t0));
    auto grid = pohozaev::SphereGrid::product_gauss(o.n, 6, 6);
    pohozaev::SignedEnd ends[2] = {
        {pohozaev::compute_dk(metric, o.t0, grid), +1},
        {pohozaev::compute_dk(metric, -o.t0, grid), -1},
    };
    double sum = pohozaev::puncture_sum(ends);
    double reference = pohozaev::dk_closed_form(o.h, {o.n, o.k});
    emit(o.out, [&](std::ostream& os) {
        os << "{\"n\":" << o.n << ",\"k\":" << o.k << ",\"h\":" << fmt17(o.h)
           << ",\"t0\":" << fmt17(o.t0) << ",\"sum\":" << fmt17(sum)
           << ",\"reference\":" << fmt17(reference)
           << ",\"relative\":" << fmt17(std::fabs(sum) / std::fabs(reference)) << "}\n";
    });
    if (std::fabs(sum) > o.rel_tol * std::fabs(reference)) g_exit = 1;
}

void run_pohozaev_spread(const PohozaevOpts& o) {
    std::vector<double> t0s = parse_tuple(o.t0s);
    double reach = 0.0;
    for (double t : t0s) reach = std::max(reach, std::fabs(t));
    auto metric = make_radial_metric(o, reach);
    auto grid = pohozaev::SphereGrid::product_gauss(o.n, 6, 6);
    std::vector<double> values;
    for (double t : t0s) values.push_back(pohozaev::dk_quadrature(metric, t, grid, o.k));
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double spread = hi - lo;
    double reference = metric.h() ? std::fabs(pohozaev::dk_closed_form(*metric.h(), {o.n, o.k}))
                                  : std::fabs(values[0]);
    emit(o.out, [&](std::ostream& os) {
        os << "{\"n\":" << o.n << ",\"k\":" << o.k << ",\"t0\":[";
        for (std::size_t i = 0; i < t0s.size(); ++i) os << (i ? "," : "") << fmt17(t0s[i]);
        os << "],\"values\":[";
        for (std::size_t i = 0; i < values.size(); ++i)
            os << (i ? "," : "") << fmt17(values[i]);
        os << "],\"spread\":" << fmt17(spread)
           << ",\"relative\":" << fmt17(reference > 0.0 ? spread / reference : spread)
           << "}\n";
    });
    if (spread > o.rel_tol * (reference > 0.0 ? reference : 1.0)) g_exit = 1;
}

// ------------------------------------------------------------------- kw

struct KwOpts {
    int n = 0, k = 0;
    double h = -0.1;
    std::string metric;
    std::string base = "sphere";
    std::string X = "dilation";
    int order = 2;
    double t_min = -1.0, t_max = 1.0;
    int t_count = 41;
    double theta_min = 0.4, theta_max = 2.7;
    int theta_count = 41;
    double amp = 0.05, decay = 1.0;
    double order_tol = 1.9, abs_tol = 1e-9;
    double ta = 0.0, tb = 0.0;
    int refine = 1;
    std::string csv;
    std::string out;
};

pohozaev::PuncturedMetric make_kw_metric(const KwOpts& o) {
    delaunay::OdeParams params{o.n, o.k};
    auto radial = [&](const std::string& name) {
        if (name == "sphere") return pohozaev::PuncturedMetric::sphere(params);
        if (name == "cylinder") return pohozaev::PuncturedMetric::cylinder(params);
        if (name == "delaunay")
            return pohozaev::PuncturedMetric::delaunay_orbit(
                params, o.h, std::min(-6.0, o.t_min - 1.0), std::max(6.0, o.t_max + 1.0));
        throw std::invalid_argument("unknown metric (delaunay | sphere | cylinder | perturbed)");
    };
    if (o.metric == "perturbed")
        return pohozaev::PuncturedMetric::perturbed(radial(o.base), o.amp, o.decay);
    return radial(o.metric);
}

geometry::GridField sample_metric(const KwOpts& o, const pohozaev::PuncturedMetric& metric,
                                  int level) {
    int scale = 1 << level;
    std::vector<geometry::GridAxis> axes;
    axes.push_back({"t", o.t_min, (o.t_max - o.t_min) / double((o.t_count - 1) * scale),
                    (o.t_count - 1) * scale + 1});
    if (o.metric == "perturbed")
        axes.push_back({"theta_1", o.theta_min,
                        (o.theta_max - o.theta_min) / double((o.theta_count - 1) * scale),
                        (o.theta_count - 1) * scale + 1});
    return geometry::GridField::sample(
        {geometry::BackgroundKind::Cylinder, o.n}, axes, o.order,
        [&](std::span<const double> c) { return metric.value(c[0], c.subspan(1)); });
}

void run_kw_verify(const KwOpts& o) {
    auto metric = make_kw_metric(o);
    geometry::GridField field = sample_metric(o, metric, 0);
    kw::CkField X = parse_ck(o.X, o.n);
    kw::DivergenceReport report = kw::divergence_identity_residual(field, X, o.k);
    emit(o.out, [&](std::ostream& os) { kw::export_report_json(report, os); });
    if (!o.csv.empty())
        emit(o.csv, [&](std::ostream& os) { kw::export_residual_csv(report, os); });
    if (!(report.order_estimate >= o.order_tol || report.max_residual <= o.abs_tol))
        g_exit = 1;
}

void run_kw_annulus(const KwOpts& opts) {
    KwOpts o = opts;
    if (!(o.ta < o.tb)) throw std::invalid_argument("need ta < tb");
    if (o.refine < 1) throw std::invalid_argument("refine must be >= 1");
    // Unset t range: pad by a quarter span on each side, which keeps ta
    // and tb on grid nodes at the default count and all refinements.
    double span = o.tb - o.ta;
    if (o.t_min == -1e300) o.t_min = o.ta - span / 4.0;
    if (o.t_max == 1e300) o.t_max = o.tb + span / 4.0;
    auto metric = make_kw_metric(o);
    kw::CkField X = parse_ck(o.X, o.n);
    int margin = o.order / 2 + 1 + o.order / 2;
    std::vector<double> balances;
    emit(o.out, [&](std::ostream& os) {
        os << "level,t_step,balance\n";
        for (int level = 0; level < o.refine; ++level) {
            geometry::GridField field = sample_metric(o, metric, level);
            pohozaev::SphereGrid grid =
                field.rank() > 1
                    ? pohozaev::SphereGrid::chart_lattice(
                          o.n,
                          std::span<const geometry::GridAxis>(field.axes().data() + 1,
                                                              field.axes().size() - 1),
                          margin)
                    : pohozaev::SphereGrid::product_gauss(o.n, 4, 4);
            double bal = kw::annulus_balance(field, X, o.k, o.ta, o.tb, grid);
            balances.push_back(bal);
            os << level << "," << fmt17(field.axes()[0].step) << "," << fmt17(bal)
               << "\n";
        }
    });
    for (std::size_t i = 1; i < balances.size(); ++i)
        if (!(balances[i] < balances[i - 1])) g_exit = 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma-k curvature, Delaunay orbits, Pohozaev invariants"};
    app.require_subcommand(1);
    std::string config_note;  // --config is handled before parsing; listed for --help

    SigmaOpts so;
    CLI::App* sigma = app.add_subcommand("sigma", "evaluate sigma_k of a conformal factor");
    sigma->add_option("--factor", so.factor,
                      "round-sphere | const:<v> | cylinder-const | grid")
        ->required();
    sigma->add_option("--bg", so.bg, "euclidean | cylinder");
    sigma->add_option("--n", so.n, "dimension")->required();
    sigma->add_option("--k", so.k, "curvature index")->required();
    sigma->add_option("--points", so.points, "evaluation points, comma-separated tuples");
    sigma->add_option("--grid-csv", so.grid_csv, "grid sample file");
    sigma->add_option("--grid-header", so.grid_header, "grid header file");
    sigma->add_option("--format", so.format, "json | csv");
    sigma->add_option("--out", so.out, "output path (default stdout)");
    sigma->add_option("--config", config_note, "key=value defaults, flags win");
    sigma->callback([&] { run_sigma(so); });

    CLI::App* ode = app.add_subcommand("ode", "radial cylinder ODE");
    ode->require_subcommand(1);
    OdeOpts oo;
    CLI::App* solve = ode->add_subcommand("solve", "integrate and emit t,u,u_t,h_drift");
    solve->set_help_flag("--help", "print help");
    solve->add_option("--n", oo.n)->required();
    solve->add_option("--k", oo.k, "curvature index (default 1)");
    solve->add_option("--h", oo.h)->each([&](const std::string&) { oo.has_h = true; });
    solve->add_flag("--sphere", oo.sphere, "closed-form h = 0 solution");
    solve->add_option("--t-min", oo.t_min);
    solve->add_option("--t-max", oo.t_max)->required();
    solve->add_option("--tol", oo.tol);
    solve->add_option("--step", oo.step, "output sampling step");
    solve->add_option("--drift-tol", oo.drift_tol);
    solve->add_option("--out", oo.out);
    solve->add_option("--config", config_note, "key=value defaults, flags win");
    solve->callback([&] { run_ode_solve(oo); });

    OdeOpts po_ode;
    CLI::App* period = ode->add_subcommand("period", "orbit period T(h)");
    period->set_help_flag("--help", "print help");
    period->add_option("--n", po_ode.n)->required();
    period->add_option("--k", po_ode.k)->required();
    period->add_option("--h", po_ode.h)->required();
    period->add_option("--tol", po_ode.tol);
    period->add_option("--out", po_ode.out);
    period->add_option("--config", config_note, "key=value defaults, flags win");
    period->callback([&] { run_ode_period(po_ode); });

    OdeOpts so_ode;
    CLI::App* scan = ode->add_subcommand("scan", "sweep h");
    scan->set_help_flag("--help", "print help");
    scan->add_option("--n", so_ode.n)->required();
    scan->add_option("--k", so_ode.k)->required();
    scan->add_option("--h-min", so_ode.h_min)->required();
    scan->add_option("--h-max", so_ode.h_max)->required();
    scan->add_option("--steps", so_ode.steps)->required();
    scan->add_option("--tol", so_ode.tol);
    scan->add_option("--out", so_ode.out);
    scan->add_option("--config", config_note, "key=value defaults, flags win");
    scan->callback([&] { run_ode_scan(so_ode); });

    CLI::App* poh = app.add_subcommand("pohozaev", "dilational invariants");
    poh->require_subcommand(1);
    PohozaevOpts po;
    CLI::App* compute = poh->add_subcommand("compute", "quadrature vs closed form");
    compute->set_help_flag("--help", "print help");
    compute->add_option("--n", po.n)->required();
    compute->add_option("--k", po.k)->required();
    compute->add_option("--h", po.h)->required();
    compute->add_option("--t0", po.t0);
    compute->add_option("--metric", po.metric);
    compute->add_option("--rel-tol", po.rel_tol);
    compute->add_option("--out", po.out);
    compute->add_option("--config", config_note, "key=value defaults, flags win");
    compute->callback([&] { run_pohozaev_compute(po); });

    PohozaevOpts co;
    co.t0 = 1.0;
    CLI::App* checksum = poh->add_subcommand("check-sum", "two-ended signed sum");
    checksum->set_help_flag("--help", "print help");
    checksum->add_option("--n", co.n)->required();
    checksum->add_option("--k", co.k)->required();
    checksum->add_option("--h", co.h)->required();
    checksum->add_option("--t0", co.t0);
    checksum->add_option("--rel-tol", co.rel_tol);
    checksum->add_option("--out", co.out);
    checksum->add_option("--config", config_note, "key=value defaults, flags win");
    checksum->callback([&] { run_pohozaev_check_sum(co); });

    PohozaevOpts sp;
    CLI::App* spread = poh->add_subcommand("t0-spread", "quadrature spread across t0");
    spread->set_help_flag("--help", "print help");
    spread->add_option("--n", sp.n)->required();
    spread->add_option("--k", sp.k)->required();
    spread->add_option("--h", sp.h)->required();
    spread->add_option("--t0s", sp.t0s, "comma-separated t0 list");
    spread->add_option("--rel-tol", sp.rel_tol);
    spread->add_option("--out", sp.out);
    spread->add_option("--config", config_note, "key=value defaults, flags win");
    spread->callback([&] { run_pohozaev_spread(sp); });

    CLI::App* kwc = app.add_subcommand("kw", "divergence identity checks");
    kwc->require_subcommand(1);
    KwOpts ko;
    CLI::App* verify = kwc->add_subcommand("verify", "pointwise residual + FD order");
    verify->set_help_flag("--help", "print help");
    verify->add_option("--metric", ko.metric, "delaunay | sphere | cylinder | perturbed")
        ->required();
    verify->add_option("--n", ko.n)->required();
    verify->add_option("--k", ko.k)->required();
    verify->add_option("--h", ko.h);
    verify->add_option("--X", ko.X, "dilation | rotation:i,j");
    verify->add_option("--base", ko.base, "base factor when --metric perturbed");
    verify->add_option("--order", ko.order, "FD order (2 | 4)");
    verify->add_option("--t-min", ko.t_min);
    verify->add_option("--t-max", ko.t_max);
    verify->add_option("--t-count", ko.t_count);
    verify->add_option("--theta-min", ko.theta_min);
    verify->add_option("--theta-max", ko.theta_max);
    verify->add_option("--theta-count", ko.theta_count);
    verify->add_option("--amp", ko.amp);
    verify->add_option("--decay", ko.decay);
    verify->add_option("--order-tol", ko.order_tol);
    verify->add_option("--abs-tol", ko.abs_tol);
    verify->add_option("--csv", ko.csv, "residual field CSV path");
    verify->add_option("--out", ko.out);
    verify->add_option("--config", config_note, "key=value defaults, flags win");
    verify->callback([&] { run_kw_verify(ko); });

    KwOpts ao;
    ao.t_min = -1e300;
    ao.t_max = 1e300;
    ao.t_count = 49;
    CLI::App* annulus = kwc->add_subcommand("annulus", "integral balance on [ta, tb]");
    annulus->set_help_flag("--help", "print help");
    annulus->add_option("--metric", ao.metric)->required();
    annulus->add_option("--n", ao.n)->required();
    annulus->add_option("--k", ao.k)->required();
    annulus->add_option("--h", ao.h);
    annulus->add_option("--X", ao.X);
    annulus->add_option("--base", ao.base);
    annulus->add_option("--order", ao.order);
    annulus->add_option("--ta", ao.ta)->required();
    annulus->add_option("--tb", ao.tb)->required();
    annulus->add_option("--t-min", ao.t_min);
    annulus->add_option("--t-max", ao.t_max);
    annulus->add_option("--t-count", ao.t_count);
    annulus->add_option("--theta-min", ao.theta_min);
    annulus->add_option("--theta-max", ao.theta_max);
    annulus->add_option("--theta-count", ao.theta_count);
    annulus->add_option("--amp", ao.amp);
    annulus->add_option("--decay", ao.decay);
    annulus->add_option("--refine", ao.refine, "number of resolutions");
    annulus->add_option("--out", ao.out);
    annulus->add_option("--config", config_note, "key=value defaults, flags win");
    annulus->callback([&] { run_kw_annulus(ao); });

    try {
        std::vector<std::string> args = expand_config({argv + 1, argv + argc});
        std::reverse(args.begin(), args.end());  // parse consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return g_exit;
}
