#include "sigmak/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigmak::symfun {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Plain dense product, row major.
std::vector<double> mat_mul(int n, const std::vector<double>& a,
                            const std::vector<double>& b) {
    std::vector<double> c(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            const double ail = a[std::size_t(i) * n + l];
            if (ail == 0.0) continue;
            for (int j = 0; j < n; ++j)
                c[std::size_t(i) * n + j] += ail * b[std::size_t(l) * n + j];
        }
    return c;
}

// Determinant of a small dense matrix by Gaussian elimination with
// partial pivoting.  Used only for generalized Kronecker deltas, whose
// entries are 0/1, so sizes stay tiny.
double small_det(int n, std::vector<double> m) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[std::size_t(r) * n + col]) >
                std::abs(m[std::size_t(piv) * n + col]))
                piv = r;
        if (m[std::size_t(piv) * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(m[std::size_t(piv) * n + c], m[std::size_t(col) * n + c]);
            det = -det;
        }
        const double d = m[std::size_t(col) * n + col];
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            const double f = m[std::size_t(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                m[std::size_t(r) * n + c] -= f * m[std::size_t(col) * n + c];
        }
    }
    return det;
}

// Generalized Kronecker delta  delta^{upper}_{lower} = det[ delta_{upper_p, lower_q} ].
double gen_delta(std::span<const int> upper, std::span<const int> lower) {
    const int m = int(upper.size());
    std::vector<double> d(std::size_t(m) * m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            d[std::size_t(p) * m + q] = (upper[p] == lower[q]) ? 1.0 : 0.0;
    return small_det(m, d);
}

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim), a_(std::size_t(dim) * dim, 0.0) {
    if (dim < 1) throw std::domain_error("SymMatrix: dim must be >= 1");
}

SymMatrix::SymMatrix(int dim, std::span<const double> row_major) : SymMatrix(dim) {
    if (row_major.size() != std::size_t(dim) * dim)
        throw std::invalid_argument("SymMatrix: entry count != dim^2");
    std::copy(row_major.begin(), row_major.end(), a_.begin());
    const double scale = std::max(max_abs(row_major), 1.0);
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j) {
            const double d = a_[std::size_t(i) * dim_ + j] - a_[std::size_t(j) * dim_ + i];
            if (std::abs(d) > 1e-12 * scale)
                throw std::invalid_argument("SymMatrix: input is not symmetric");
            const double avg =
                0.5 * (a_[std::size_t(i) * dim_ + j] + a_[std::size_t(j) * dim_ + i]);
            a_[std::size_t(i) * dim_ + j] = avg;
            a_[std::size_t(j) * dim_ + i] = avg;
        }
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.entry(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> entries) {
    SymMatrix m(int(entries.size()));
    for (int i = 0; i < m.dim(); ++i) m.entry(i, i) = entries[i];
    return m;
}

void SymMatrix::set(int i, int j, double v) {
    a_[std::size_t(i) * dim_ + j] = v;
    a_[std::size_t(j) * dim_ + i] = v;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += a_[std::size_t(i) * dim_ + i];
    return t;
}

double elem_sym(const Spectrum& lambda, int k) {
    const int n = int(lambda.size());
    if (k < 0 || k > n)
        throw std::domain_error("elem_sym: k outside [0, size]");
    return elem_sym_all(lambda)[std::size_t(k)];
}

std::vector<double> elem_sym_all(const Spectrum& lambda) {
    const int n = int(lambda.size());
    // e[j] after processing i entries holds sigma_j of the prefix.
    std::vector<double> e(std::size_t(n) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(i + 1, n); j >= 1; --j)
            e[std::size_t(j)] += lambda[std::size_t(i)] * e[std::size_t(j) - 1];
    return e;
}

bool in_positive_cone(const Spectrum& lambda, int k) {
    const int n = int(lambda.size());
    if (k < 1 || k > n)
        throw std::domain_error("in_positive_cone: k outside [1, size]");
    const auto e = elem_sym_all(lambda);
    for (int j = 1; j <= k; ++j)
        if (e[std::size_t(j)] <= 0.0) return false;
    return true;
}

Spectrum eigenvalues(const SymMatrix& a) {
    const int n = a.dim();
    std::vector<double> m(a.data());
    auto at = [&](int i, int j) -> double& { return m[std::size_t(i) * n + j]; };

    double norm = 0.0;
    for (double x : m) norm = std::max(norm, std::abs(x));
    if (norm == 0.0) norm = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
        if (off <= 1e-14 * norm) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = at(i, p), aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = at(p, i), aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
            }
    }
    Spectrum ev(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) ev[std::size_t(i)] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

namespace {

// Joint Faddeev-LeVerrier recursion.  Returns T_0..T_j and sigma_1..sigma_j.
struct FlState {
    std::vector<std::vector<double>> t;  // T_0..T_j, row major
    std::vector<double> sigma;           // sigma[i] = sigma_i, sigma[0] = 1
};

FlState faddeev_leverrier(const SymMatrix& a, int j) {
    const int n = a.dim();
    if (j < 0 || j > n)
        throw std::domain_error("newton_transform: order outside [0, dim]");
    FlState st;
    st.sigma.assign(std::size_t(j) + 1, 0.0);
    st.sigma[0] = 1.0;
    std::vector<double> id(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) id[std::size_t(i) * n + i] = 1.0;
    st.t.push_back(id);
    for (int m = 1; m <= j; ++m) {
        const auto prod = mat_mul(n, st.t.back(), a.data());
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += prod[std::size_t(i) * n + i];
        const double sm = tr / double(m);
        st.sigma[std::size_t(m)] = sm;
        std::vector<double> tm(std::size_t(n) * n);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c)
                tm[std::size_t(i) * n + c] =
                    (i == c ? sm : 0.0) - prod[std::size_t(i) * n + c];
        st.t.push_back(std::move(tm));
    }
    return st;
}

}  // namespace

double matrix_sigma_k(const SymMatrix& a, int k) {
    if (k == 0) return 1.0;
    return faddeev_leverrier(a, k).sigma[std::size_t(k)];
}

SymMatrix newton_transform(const SymMatrix& a, int j) {
    const auto st = faddeev_leverrier(a, j);
    return SymMatrix(a.dim(), st.t[std::size_t(j)]);
}

SymMatrix newton_transform_delta(const SymMatrix& a, int j) {
    const int n = a.dim();
    if (n > 5)
        throw std::length_error("newton_transform_delta: dim > 5 not supported");
    if (j < 0 || j > n)
        throw std::domain_error("newton_transform_delta: order outside [0, dim]");
    if (j == 0) return SymMatrix::identity(n);

    // (T_j)^m_i = (1/j!) delta^{m i_1..i_j}_{i l_1..l_j} a_{i_1 l_1} ... a_{i_j l_j}
    double fact = 1.0;
    for (int p = 2; p <= j; ++p) fact *= double(p);

    std::vector<int> upper(std::size_t(j) + 1), lower(std::size_t(j) + 1);
    SymMatrix out(n);
    const std::size_t tuples = [&] {
        std::size_t t = 1;
        for (int p = 0; p < 2 * j; ++p) t *= std::size_t(n);
        return t;
    }();
    for (int mi = 0; mi < n; ++mi)
        for (int ii = 0; ii < n; ++ii) {
            upper[0] = mi;
            lower[0] = ii;
            double sum = 0.0;
            for (std::size_t code = 0; code < tuples; ++code) {
                std::size_t c = code;
                for (int p = 1; p <= j; ++p) {
                    upper[std::size_t(p)] = int(c % std::size_t(n));
                    c /= std::size_t(n);
                    lower[std::size_t(p)] = int(c % std::size_t(n));
                    c /= std::size_t(n);
                }
                const double d = gen_delta(upper, lower);
                if (d == 0.0) continue;
                double prod = d;
                for (int p = 1; p <= j; ++p)
                    prod *= a(upper[std::size_t(p)], lower[std::size_t(p)]);
                sum += prod;
            }
            out.entry(mi, ii) = sum / fact;
        }
    // Symmetrize roundoff through the validating constructor.
    return SymMatrix(n, out.data());
}

HTensors h_tensors(const SymMatrix& a, int k) {
    const int n = a.dim();
    if (k < 1 || k > n)
        throw std::domain_error("h_tensors: k outside [1, dim]");
    const auto st = faddeev_leverrier(a, k);
    const auto h_raw = mat_mul(n, st.t[std::size_t(k) - 1], a.data());
    SymMatrix h(n, h_raw);
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += h(i, i);
    SymMatrix hring(n, h.data());
    for (int i = 0; i < n; ++i) hring.entry(i, i) -= tr / double(n);
    return HTensors{std::move(h), std::move(hring), st.sigma[std::size_t(k)]};
}

}  // namespace sigmak::symfun
