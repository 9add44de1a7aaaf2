#include "bhdimer/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "bhdimer/errors.hpp"

namespace bhd {

double TridiagonalMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double d : diag) s += d * d;
    for (double e : offdiag) s += 2.0 * e * e;
    return std::sqrt(s);
}

std::vector<double> TridiagonalMatrix::apply(const std::vector<double>& x) const {
    int n = dim();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) v += offdiag[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

TridiagonalMatrix build_tridiagonal(const ReducedParams& r) {
    int N = r.N();
    TridiagonalMatrix m;
    m.diag.resize(N + 1);
    m.offdiag.resize(N);
    for (int n = 0; n <= N; ++n)
        m.diag[n] = r.delta() * n + r.c2() * double(n) * double(N - n);
    for (int n = 0; n < N; ++n)
        m.offdiag[n] = std::sqrt(double(n + 1) * double(N - n));
    return m;
}

TridiagonalMatrix build_physical_tridiagonal(const PhysicalParams& p) {
    validate(p);
    int N = p.N;
    double offset = 0.5 * p.U * double(N) * double(N - 1);
    TridiagonalMatrix m;
    m.diag.resize(N + 1);
    m.offdiag.resize(N);
    for (int n = 0; n <= N; ++n)
        m.diag[n] = p.epsilon * double(N - 2 * n) + (p.U - p.V) * double(n) * double(n - N) + offset;
    for (int n = 0; n < N; ++n)
        m.offdiag[n] = -p.J * std::sqrt(double(n + 1) * double(N - n));
    return m;
}

namespace {

// QL with implicit Wilkinson shifts (tql2 layout). d: diagonal, e: subdiagonal
// shifted so e[i] couples i and i+1, z: row-major eigenvector accumulator or null.
void tql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z, int n) {
    const int max_iter = 60;
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == max_iter)
                    throw Error(ErrorKind::ConvergenceFailure,
                                "QL iteration cap reached at eigenvalue index " + std::to_string(l));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        auto& Z = *z;
                        for (int k = 0; k < n; ++k) {
                            double t = Z[std::size_t(k) * n + i + 1];
                            Z[std::size_t(k) * n + i + 1] = s * Z[std::size_t(k) * n + i] + c * t;
                            Z[std::size_t(k) * n + i] = c * Z[std::size_t(k) * n + i] - s * t;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

Spectrum eigen_spectrum(const TridiagonalMatrix& m, bool want_vectors) {
    int n = m.dim();
    if (n < 1 || static_cast<int>(m.offdiag.size()) != n - 1)
        throw Error(ErrorKind::LengthMismatch, "offdiag must have dim-1 entries");
    std::vector<double> d = m.diag;
    std::vector<double> e = m.offdiag;
    std::vector<double> z;
    if (want_vectors) {
        z.assign(std::size_t(n) * n, 0.0);
        for (int i = 0; i < n; ++i) z[std::size_t(i) * n + i] = 1.0;
    }
    tql(d, e, want_vectors ? &z : nullptr, n);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    Spectrum s;
    s.energies.resize(n);
    for (int k = 0; k < n; ++k) s.energies[k] = d[order[k]];
    if (want_vectors) {
        std::vector<std::vector<double>> cols(n, std::vector<double>(n));
        for (int k = 0; k < n; ++k) {
            auto& v = cols[k];
            int j = order[k];
            int big = 0;
            for (int i = 0; i < n; ++i) {
                v[i] = z[std::size_t(i) * n + j];
                if (std::fabs(v[i]) > std::fabs(v[big])) big = i;
            }
            if (v[big] < 0.0)
                for (double& x : v) x = -x;
        }
        s.amplitudes = std::move(cols);
    }
    return s;
}

Spectrum reduced_spectrum(const ReducedParams& r, bool want_vectors) {
    return eigen_spectrum(build_tridiagonal(r), want_vectors);
}

Spectrum physical_spectrum(const PhysicalParams& p, bool want_vectors) {
    return eigen_spectrum(build_physical_tridiagonal(p), want_vectors);
}

double free_spectrum(const PhysicalParams& p, int sigma) {
    if (sigma < 0 || sigma > p.N)
        throw Error(ErrorKind::IndexOutOfRange, "sigma must lie in 0..N");
    return std::hypot(p.epsilon, p.J) * double(2 * sigma - p.N);
}

double zero_tunneling_spectrum(const ReducedParams& r, int n) {
    if (n < 0 || n > r.N())
        throw Error(ErrorKind::IndexOutOfRange, "n must lie in 0..N");
    return double(r.N() - n) * (r.delta() + r.c2() * n);
}

double reduced_trace(const ReducedParams& r) {
    double N = r.N();
    // sum n = N(N+1)/2, sum n(N-n) = N(N+1)(N-1)/6
    return r.delta() * N * (N + 1.0) / 2.0 + r.c2() * N * (N + 1.0) * (N - 1.0) / 6.0;
}

std::vector<double> dedup_energies(const std::vector<double>& sorted, double rel_tol) {
    double scale = 0.0;
    for (double x : sorted) scale = std::max(scale, std::fabs(x));
    double tol = rel_tol * scale;
    std::vector<double> out;
    for (double x : sorted)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

double spectrum_mismatch(const std::vector<double>& a, const std::vector<double>& b, int sign) {
    if (a.size() != b.size())
        throw Error(ErrorKind::LengthMismatch, "spectra differ in length");
    std::size_t n = a.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double other = sign > 0 ? b[i] : -b[n - 1 - i];
        worst = std::max(worst, std::fabs(a[i] - other));
    }
    return worst;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "sigma,energy\n";
    char buf[64];
    for (std::size_t i = 0; i < s.energies.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, s.energies[i]);
        os << buf;
    }
}

}  // namespace bhd
