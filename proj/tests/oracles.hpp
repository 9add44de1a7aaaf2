#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using boost::multiprecision::cpp_int;
using ld = long double;
using State = std::map<std::pair<int, int>, ld>;  // (n_a, n_b) -> amplitude

// Nested-sum form of D(M, k): sum over n_1 + ... + n_{k-1} <= M - k of k^n1 (k-1)^n2 ... 2^n_{k-1}.
inline cpp_int d_closed(int M, int k) {
    if (k < 1 || k > M) return 0;
    std::function<cpp_int(int, int)> rec = [&](int base, int budget) -> cpp_int {
        if (base < 2) return 1;
        cpp_int total = 0, pw = 1;
        for (int n = 0; n <= budget; ++n) {
            total += pw * rec(base - 1, budget - n);
            pw *= base;
        }
        return total;
    };
    return rec(k, M - k);
}

inline State apply_X(const State& s, ld c, ld delta) {
    State out;
    for (auto [key, v] : s) {
        auto [na, nb] = key;
        ld up_b = std::sqrt(ld(nb + 1));
        out[{na, nb + 1}] += v * (delta / c + c * na) * up_b;
        out[{na + 1, nb}] += v * std::sqrt(ld(na + 1)) / c;
    }
    return out;
}

// Adjoint of Y = b/c + c a b+b, applied to a ket.
inline State apply_Ydag(const State& s, ld c) {
    State out;
    for (auto [key, v] : s) {
        auto [na, nb] = key;
        out[{na, nb + 1}] += v * std::sqrt(ld(nb + 1)) / c;
        out[{na + 1, nb}] += v * c * nb * std::sqrt(ld(na + 1));
    }
    return out;
}

inline State raise(const State& s, bool a_mode) {
    State out;
    for (auto [key, v] : s) {
        auto [na, nb] = key;
        if (a_mode)
            out[{na + 1, nb}] += v * std::sqrt(ld(na + 1));
        else
            out[{na, nb + 1}] += v * std::sqrt(ld(nb + 1));
    }
    return out;
}

inline std::vector<ld> esym(const std::vector<ld>& x) {
    std::vector<ld> e(x.size() + 1, 0);
    e[0] = 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t m = i + 1; m >= 1; --m) e[m] += e[m - 1] * x[i];
    return e;
}

// Components indexed by the a occupation.
inline std::vector<ld> symbolic_ket(const std::vector<ld>& roots, ld c, ld delta) {
    int N = roots.size();
    auto e = esym(roots);
    std::vector<ld> out(N + 1, 0);
    for (int m = 0; m <= N; ++m) {
        State s{{{0, 0}, 1}};
        for (int i = 0; i < N - m; ++i) s = apply_X(s, c, delta);
        for (int i = 0; i < m; ++i) s = raise(s, false);
        for (auto [key, v] : s) out[key.first] += e[m] * v;
    }
    return out;
}

inline std::vector<ld> symbolic_bra(const std::vector<ld>& roots, ld c) {
    int N = roots.size();
    auto e = esym(roots);
    std::vector<ld> out(N + 1, 0);
    for (int m = 0; m <= N; ++m) {
        State s{{{0, 0}, 1}};
        for (int i = 0; i < m; ++i) s = raise(s, true);
        for (int i = 0; i < N - m; ++i) s = apply_Ydag(s, c);
        for (auto [key, v] : s) out[key.first] += e[m] * v;
    }
    return out;
}

}  // namespace oracle
