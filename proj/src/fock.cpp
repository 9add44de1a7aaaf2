#include "bhdimer/fock.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"

namespace bhd {

namespace {

using wide = boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_int;

struct WideComplex {
    wide re = 0, im = 0;
};

// Coefficients of prod_i (1 + z_i t), built one factor at a time.
std::vector<WideComplex> elementary(const std::vector<WideComplex>& z) {
    std::size_t n = z.size();
    std::vector<WideComplex> e(n + 1);
    e[0].re = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = i + 1; m >= 1; --m) {
            const auto& p = e[m - 1];
            e[m].re += p.re * z[i].re - p.im * z[i].im;
            e[m].im += p.re * z[i].im + p.im * z[i].re;
        }
    }
    return e;
}

std::vector<WideComplex> widen(const std::vector<cplx>& v) {
    std::vector<WideComplex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = {wide(v[i].real()), wide(v[i].imag())};
    return out;
}

std::mutex d_mutex;
std::vector<std::vector<cpp_int>> d_table = {{cpp_int(1)}};  // row M holds D(M, 0..M), D(0,0) = 1

cpp_int d_value(int M, int k) {
    if (k < 0 || k > M) return 0;
    std::lock_guard<std::mutex> lock(d_mutex);
    while (static_cast<int>(d_table.size()) <= M) {
        int m = static_cast<int>(d_table.size());
        const auto& prev = d_table.back();
        std::vector<cpp_int> row(m + 1);
        for (int j = 0; j <= m; ++j) {
            cpp_int a = j < m ? cpp_int(j) * prev[j] : cpp_int(0);
            cpp_int b = j >= 1 ? prev[j - 1] : cpp_int(0);
            row[j] = a + b;
        }
        d_table.push_back(std::move(row));
    }
    return d_table[M][k];
}

wide wide_factorial(int n) {
    wide f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void guard(const BetheState& s, const FockOptions& opts) {
    if (s.params.N() > opts.max_n)
        throw Error(ErrorKind::SizeGuard, "N = " + std::to_string(s.params.N()) +
                                              " exceeds the expansion bound " +
                                              std::to_string(opts.max_n));
    if (static_cast<int>(s.roots.size()) != s.params.N())
        throw Error(ErrorKind::LengthMismatch, "expected N roots");
}

std::vector<wide> real_parts(const std::vector<WideComplex>& e) {
    std::vector<wide> out(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = e[i].re;
    return out;
}

std::vector<wide> wide_ket(const BetheState& s) {
    const int N = s.params.N();
    const wide c = s.params.c(), D = s.params.delta();
    // e_p of {delta + c l_j}; with stored pole offsets these are c * (l_j + delta/c) exactly
    std::vector<WideComplex> shifted(N);
    const bool precise = s.pole_offsets && chain_agrees(s);
    for (int j = 0; j < N; ++j) {
        if (precise) {
            const cplx& p = (*s.pole_offsets)[j];
            shifted[j] = {c * wide(p.real()), c * wide(p.imag())};
        } else {
            const cplx& z = s.roots[j];
            shifted[j] = {D + c * wide(z.real()), c * wide(z.imag())};
        }
    }
    std::vector<wide> E = real_parts(elementary(shifted));
    std::vector<wide> out(N + 1);
    for (int k = 0; k <= N; ++k) {
        wide acc = 0;
        for (int l = k; l <= N; ++l) {
            cpp_int d = d_value(l, k);
            if (d == 0) continue;
            acc += wide(d) * pow(c, 2 * l - 2 * k - N) * E[N - l];
        }
        out[k] = sqrt(wide_factorial(k) * wide_factorial(N - k)) * acc;
    }
    return out;
}

std::vector<wide> wide_bra(const BetheState& s) {
    const int N = s.params.N();
    const wide c = s.params.c();
    std::vector<wide> e = real_parts(elementary(widen(s.roots)));
    std::vector<wide> out(N + 1);
    // the summation index is the b occupation kb; the coefficient belongs to a occupation N - kb
    for (int kb = 0; kb <= N; ++kb) {
        wide acc = 0;
        for (int m = 0; m <= N - kb; ++m) {
            cpp_int d = d_value(N - m, kb);
            if (d == 0) continue;
            acc += wide(d) * pow(c, N - m - 2 * kb) * e[m];
        }
        out[N - kb] = sqrt(wide_factorial(kb) * wide_factorial(N - kb)) * acc;
    }
    return out;
}

std::vector<double> narrow(const std::vector<wide>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = static_cast<double>(v[i]);
        if (!std::isfinite(out[i]))
            throw Error(ErrorKind::NumericalOverflow, "coefficient outside the double range");
    }
    return out;
}

}  // namespace

SymmetricFunctions elem_sym(const std::vector<cplx>& roots) {
    auto e = elementary(widen(roots));
    SymmetricFunctions out;
    out.e.resize(e.size());
    for (std::size_t m = 0; m < e.size(); ++m) {
        double re = static_cast<double>(e[m].re);
        double im = static_cast<double>(e[m].im);
        out.e[m] = re;
        out.imag_residue = std::max(out.imag_residue, std::fabs(im) / std::max(1.0, std::fabs(re)));
    }
    return out;
}

cpp_int stirling_D(int M, int k) {
    if (M < 1 || k < 0)
        throw Error(ErrorKind::InvalidIndex, "D(M,k) needs M >= 1 and k >= 0");
    return d_value(M, k);
}

FockVector ket_expansion(const BetheState& s, const FockOptions& opts) {
    guard(s, opts);
    return {Side::KET, narrow(wide_ket(s)), s.params};
}

FockVector bra_expansion(const BetheState& s, const FockOptions& opts) {
    guard(s, opts);
    return {Side::BRA, narrow(wide_bra(s)), s.params};
}

double pairing(const FockVector& bra, const FockVector& ket) {
    if (bra.coeffs.size() != ket.coeffs.size())
        throw Error(ErrorKind::LengthMismatch, "vectors differ in length");
    wide acc = 0;
    for (std::size_t k = 0; k < bra.coeffs.size(); ++k) acc += wide(bra.coeffs[k]) * ket.coeffs[k];
    return static_cast<double>(acc);
}

const char* to_string(ObservableKind k) {
    switch (k) {
        case ObservableKind::NumberA: return "na";
        case ObservableKind::NumberB: return "nb";
        case ObservableKind::ABdag: return "abdag";
        case ObservableKind::AdagB: return "adagb";
        case ObservableKind::NaNb: return "nanb";
        case ObservableKind::Total: return "total";
        case ObservableKind::Hamiltonian: return "hamiltonian";
        case ObservableKind::Custom: return "custom";
    }
    return "?";
}

std::vector<std::vector<double>> observable_matrix(const Observable& obs, const ReducedParams& r) {
    const int N = r.N();
    const int dim = N + 1;
    if (obs.kind == ObservableKind::Custom) {
        if (static_cast<int>(obs.matrix.size()) != dim)
            throw Error(ErrorKind::LengthMismatch, "custom observable must be (N+1)x(N+1)");
        for (const auto& row : obs.matrix)
            if (static_cast<int>(row.size()) != dim)
                throw Error(ErrorKind::LengthMismatch, "custom observable must be (N+1)x(N+1)");
        return obs.matrix;
    }
    std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
    for (int k = 0; k <= N; ++k) {
        double na = k, nb = N - k;
        switch (obs.kind) {
            case ObservableKind::NumberA: A[k][k] = na; break;
            case ObservableKind::NumberB: A[k][k] = nb; break;
            case ObservableKind::NaNb: A[k][k] = na * nb; break;
            case ObservableKind::Total: A[k][k] = N; break;
            case ObservableKind::ABdag:
                // a b+ |k, N-k> = sqrt(k (N-k+1)) |k-1, N-k+1>
                if (k >= 1) A[k - 1][k] = std::sqrt(na * (nb + 1.0));
                break;
            case ObservableKind::AdagB:
                if (k < N) A[k + 1][k] = std::sqrt((na + 1.0) * nb);
                break;
            case ObservableKind::Hamiltonian:
                A[k][k] = r.delta() * nb + r.c2() * na * nb;
                if (k >= 1) A[k - 1][k] = std::sqrt(na * (nb + 1.0));
                if (k < N) A[k + 1][k] = std::sqrt((na + 1.0) * nb);
                break;
            case ObservableKind::Custom: break;
        }
    }
    return A;
}

double expectation(const BetheState& s, const Observable& obs, const FockOptions& opts) {
    guard(s, opts);
    auto bra = wide_bra(s);
    auto ket = wide_ket(s);
    auto A = observable_matrix(obs, s.params);
    const int dim = s.params.N() + 1;
    wide scale_b = 0, scale_k = 0;
    for (int k = 0; k < dim; ++k) {
        scale_b = std::max<wide>(scale_b, abs(bra[k]));
        scale_k = std::max<wide>(scale_k, abs(ket[k]));
    }
    if (scale_b == 0 || scale_k == 0) throw Error(ErrorKind::ZeroNorm, "vanishing expansion");
    for (int k = 0; k < dim; ++k) {
        bra[k] /= scale_b;
        ket[k] /= scale_k;
    }
    wide norm = 0, num = 0;
    for (int k = 0; k < dim; ++k) {
        norm += bra[k] * ket[k];
        for (int kp = 0; kp < dim; ++kp)
            if (A[k][kp] != 0.0) num += bra[k] * wide(A[k][kp]) * ket[kp];
    }
    if (abs(norm) < 1e-300) throw Error(ErrorKind::ZeroNorm, "<Psi|Psi> vanishes");
    return static_cast<double>(num / norm);
}

std::pair<double, double> expectation_with_approx_roots(const ReducedParams& r, const Observable& obs,
                                                        const SolverOptions& sopts,
                                                        const FockOptions& fopts) {
    if (r.N() > fopts.max_n)
        throw Error(ErrorKind::SizeGuard, "N exceeds the expansion bound");
    auto init = equidistant_init(r);
    std::vector<cplx> roots(init.begin(), init.end());
    BetheState approx = make_state(roots, r, 0);
    BetheState solved = solve_ground(r, sopts);
    return {expectation(approx, obs, fopts), expectation(solved, obs, fopts)};
}

double exact_expectation(const ReducedParams& r, int sigma, const Observable& obs) {
    auto sp = reduced_spectrum(r, true);
    if (sigma < 0 || sigma > r.N())
        throw Error(ErrorKind::IndexOutOfRange, "sigma must lie in 0..N");
    const auto& amp = (*sp.amplitudes)[sigma];  // indexed by b occupation
    const int N = r.N();
    std::vector<double> v(N + 1);
    for (int k = 0; k <= N; ++k) v[k] = amp[N - k];
    auto A = observable_matrix(obs, r);
    double num = 0.0, norm = 0.0;
    for (int k = 0; k <= N; ++k) {
        norm += v[k] * v[k];
        for (int kp = 0; kp <= N; ++kp) num += v[k] * A[k][kp] * v[kp];
    }
    return num / norm;
}

void write_fock_csv(std::ostream& os, const FockVector& v) {
    os << "k,coefficient\n";
    char buf[64];
    for (std::size_t k = 0; k < v.coeffs.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, v.coeffs[k]);
        os << buf;
    }
}

}  // namespace bhd
