#include "sigmak/numeric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigmak {

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return std::round(r);
}

double sphere_volume(int m) {
    if (m < 0) throw std::domain_error("sphere_volume: m must be >= 0");
    const double half = 0.5 * double(m + 1);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

GaussRule gauss_legendre(int points) {
    if (points < 1) throw std::domain_error("gauss_legendre: points must be >= 1");
    GaussRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const int n = points;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

GaussRule gauss_gegenbauer(int points, double alpha) {
    if (points < 1) throw std::domain_error("gauss_gegenbauer: points must be >= 1");
    if (!(alpha > -1.0)) throw std::domain_error("gauss_gegenbauer: alpha must be > -1");
    const int m = points;
    const double lambda = alpha + 0.5;
    const double mu0 =
        std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);

    // Orthonormal three-term recurrence for the weight (1 - x^2)^alpha;
    // symmetry removes the linear coefficients.
    std::vector<double> c(std::size_t(m) + 1, 0.0);
    for (int k = 1; k <= m; ++k)
        c[std::size_t(k)] = std::sqrt(double(k) * (double(k) + 2.0 * lambda - 1.0) /
                                      (4.0 * (double(k) + lambda) * (double(k) + lambda - 1.0)));

    // Returns p_m, p_m' and the Christoffel sum over degrees below m.
    const auto eval = [&](double x, double& pm, double& dpm) {
        double p0 = 1.0 / std::sqrt(mu0), d0 = 0.0;
        double p1 = x * p0 / c[1], d1 = p0 / c[1];
        double sum = p0 * p0;
        for (int k = 1; k < m; ++k) {
            sum += p1 * p1;
            const double p2 = (x * p1 - c[std::size_t(k)] * p0) / c[std::size_t(k) + 1];
            const double d2 =
                (p1 + x * d1 - c[std::size_t(k)] * d0) / c[std::size_t(k) + 1];
            p0 = p1;
            d0 = d1;
            p1 = p2;
            d1 = d2;
        }
        pm = p1;
        dpm = d1;
        return sum;
    };

    GaussRule rule;
    rule.nodes.resize(std::size_t(m));
    rule.weights.resize(std::size_t(m));
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Ultraspherical zero asymptotics seed Newton from the top.
        double x = std::cos(std::numbers::pi * (double(i) + 0.5 + 0.5 * lambda) /
                            (double(m) + lambda));
        double pm = 0.0, dpm = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            eval(x, pm, dpm);
            const double dx = pm / dpm;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double christoffel = eval(x, pm, dpm);
        const double w = 1.0 / christoffel;
        rule.nodes[std::size_t(i)] = -x;
        rule.weights[std::size_t(i)] = w;
        rule.nodes[std::size_t(m - 1 - i)] = x;
        rule.weights[std::size_t(m - 1 - i)] = w;
    }
    if (m % 2 == 1) rule.nodes[std::size_t(m / 2)] = 0.0;
    return rule;
}

std::vector<double> simpson_weights(int count, double step) {
    if (count < 4) throw std::invalid_argument("simpson_weights: need at least 4 nodes");
    const int intervals = count - 1;
    std::vector<double> w(count, 0.0);
    // Even interval count: plain composite 1/3 rule.  Odd: 1/3 rule on
    // the first intervals - 3, then one 3/8 block of three intervals.
    int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += step / 3.0;
        w[i + 1] += 4.0 * step / 3.0;
        w[i + 2] += step / 3.0;
    }
    if (intervals % 2 != 0) {
        const int b = simpson_end;
        w[b] += 3.0 * step / 8.0;
        w[b + 1] += 9.0 * step / 8.0;
        w[b + 2] += 9.0 * step / 8.0;
        w[b + 3] += 3.0 * step / 8.0;
    }
    return w;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: endpoints do not bracket a root");
    for (int i = 0; i < 200 && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace sigmak
