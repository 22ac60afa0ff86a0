#include "sigmak/chart.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigmak::chart {

namespace {

// Angle m (1-based among sphere angles); absent trailing angles sit at
// pi/2 so that the field conventions for reduced grids hold exactly.
double angle_at(std::span<const double> angles, int m) {
    if (m - 1 < int(angles.size())) return angles[std::size_t(m - 1)];
    return 0.5 * std::numbers::pi;
}

}  // namespace

double sphere_scale(std::span<const double> angles, int i) {
    double s = 1.0;
    for (int m = 1; m < i; ++m) s *= std::sin(angle_at(angles, m));
    return s;
}

std::vector<double> cylinder_scales(int n, std::span<const double> angles) {
    std::vector<double> s(std::size_t(n), 1.0);
    for (int i = 1; i <= n - 1; ++i) s[std::size_t(i)] = sphere_scale(angles, i);
    return s;
}

std::vector<double> sphere_ambient(int n, std::span<const double> angles) {
    std::vector<double> w(std::size_t(n), 0.0);
    double sines = 1.0;
    for (int i = 1; i <= n - 1; ++i) {
        const double th = angle_at(angles, i);
        w[std::size_t(i) - 1] = sines * std::cos(th);
        sines *= std::sin(th);
    }
    w[std::size_t(n) - 1] = sines;
    return w;
}

std::vector<double> sphere_ambient_jacobian_column(int n,
                                                   std::span<const double> angles,
                                                   int i) {
    if (i < 1 || i > n - 1)
        throw std::out_of_range("sphere_ambient_jacobian_column: bad index");
    // Differentiate the nested product by summing per-component factors.
    std::vector<double> col(std::size_t(n), 0.0);
    for (int comp = 1; comp <= n; ++comp) {
        // Component comp = (prod_{m < comp} sin theta_m) * cos theta_comp,
        // with cos replaced by 1 when comp == n.
        double v = 1.0;
        bool depends = false;
        for (int m = 1; m < comp && m <= n - 1; ++m) {
            const double th = angle_at(angles, m);
            if (m == i) {
                v *= std::cos(th);
                depends = true;
            } else {
                v *= std::sin(th);
            }
        }
        if (comp <= n - 1) {
            const double th = angle_at(angles, comp);
            if (comp == i) {
                v *= -std::sin(th);
                depends = true;
            } else {
                v *= std::cos(th);
            }
        }
        col[std::size_t(comp) - 1] = depends ? v : 0.0;
    }
    return col;
}

double cylinder_christoffel(int n, std::span<const double> angles, int c, int a,
                            int b) {
    if (c < 0 || c >= n || a < 0 || a >= n || b < 0 || b >= n)
        throw std::out_of_range("cylinder_christoffel: index outside [0, n)");
    // Flat t direction: any index equal to 0 kills the symbol.
    if (c == 0 || a == 0 || b == 0) return 0.0;
    auto cot = [&](int m) {
        const double th = angle_at(angles, m);
        return std::cos(th) / std::sin(th);
    };
    // Diagonal metric g_ii = s_i^2 depending only on earlier angles.
    if (a == b) {
        if (c == a) return 0.0;
        if (c < a) {
            const double sa = sphere_scale(angles, a);
            const double sc = sphere_scale(angles, c);
            return -(sa * sa) / (sc * sc) * cot(c);
        }
        return 0.0;
    }
    if (c == a && b < a) return cot(b);
    if (c == b && a < b) return cot(a);
    return 0.0;
}

double sphere_chart_density(int n, std::span<const double> angles) {
    double j = 1.0;
    for (int m = 1; m <= n - 2; ++m)
        j *= std::pow(std::sin(angle_at(angles, m)), double(n - 1 - m));
    return j;
}

}  // namespace sigmak::chart
