#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bhdimer/bethe.hpp"
#include "bhdimer/errors.hpp"

namespace bhd {

namespace {

void check_length(const std::vector<cplx>& roots, const ReducedParams& r) {
    if (static_cast<int>(roots.size()) != r.N())
        throw Error(ErrorKind::LengthMismatch, "expected N roots");
}

// Products of all factors except index j, for every j, without division.
std::vector<cplx> products_except(const std::vector<cplx>& f) {
    std::size_t n = f.size();
    std::vector<cplx> pre(n + 1, 1.0), suf(n + 1, 1.0), out(n);
    for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] * f[i];
    for (std::size_t i = n; i-- > 0;) suf[i] = suf[i + 1] * f[i];
    for (std::size_t i = 0; i < n; ++i) out[i] = pre[i] * suf[i + 1];
    return out;
}

// log|1 + s e^t| and its sign, for s = +-1.
std::pair<double, int> log_one_plus(int s, double t) {
    if (t < -1.0) return {std::log1p(s * std::exp(t)), 1};
    if (t > 30.0) return {t + std::log1p(s * std::exp(-t)), s};
    double v = 1.0 + s * std::exp(t);
    return {std::log(std::fabs(v)), v < 0.0 ? -1 : 1};
}

}  // namespace

std::vector<cplx> residual(const std::vector<cplx>& roots, const ReducedParams& r) {
    check_length(roots, r);
    const int N = r.N();
    const double c = r.c(), D = r.delta();
    std::vector<cplx> F(N);
    for (int n = 0; n < N; ++n) {
        cplx P = 1.0, Q = 1.0;
        for (int j = 0; j < N; ++j) {
            if (j == n) continue;
            cplx diff = roots[n] - roots[j];
            P *= diff + c;
            Q *= diff - c;
        }
        cplx A = c * roots[n] * (c * roots[n] + D);
        F[n] = A * P - Q;
    }
    return F;
}

std::vector<std::vector<cplx>> jacobian(const std::vector<cplx>& roots, const ReducedParams& r) {
    check_length(roots, r);
    const int N = r.N();
    const double c = r.c(), D = r.delta();
    std::vector<std::vector<cplx>> Jm(N, std::vector<cplx>(N));
    for (int n = 0; n < N; ++n) {
        std::vector<cplx> fp, fm;
        std::vector<int> idx;
        for (int j = 0; j < N; ++j) {
            if (j == n) continue;
            cplx diff = roots[n] - roots[j];
            fp.push_back(diff + c);
            fm.push_back(diff - c);
            idx.push_back(j);
        }
        cplx P = 1.0, Q = 1.0;
        for (std::size_t i = 0; i < fp.size(); ++i) {
            P *= fp[i];
            Q *= fm[i];
        }
        auto Pex = products_except(fp);
        auto Qex = products_except(fm);
        cplx A = c * roots[n] * (c * roots[n] + D);
        cplx dA = 2.0 * c * c * roots[n] + c * D;
        cplx dPn = 0.0, dQn = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            dPn += Pex[i];
            dQn += Qex[i];
            Jm[n][idx[i]] = -A * Pex[i] + Qex[i];
        }
        Jm[n][n] = dA * P + A * dPn - dQn;
    }
    return Jm;
}

double relative_residual(const std::vector<cplx>& roots, const ReducedParams& r) {
    check_length(roots, r);
    const int N = r.N();
    const double c = r.c(), D = r.delta();
    double worst = 0.0;
    for (int n = 0; n < N; ++n) {
        cplx acc = std::log(cplx(c) * roots[n]) + std::log(c * roots[n] + D);
        for (int j = 0; j < N; ++j) {
            if (j == n) continue;
            cplx diff = roots[n] - roots[j];
            acc += std::log(diff + c) - std::log(diff - c);
        }
        if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
            return std::numeric_limits<double>::infinity();
        double im = std::remainder(acc.imag(), 2.0 * std::numbers::pi);
        worst = std::max(worst, std::hypot(acc.real(), im));
    }
    return worst;
}

std::vector<double> equidistant_init(const ReducedParams& r) {
    std::vector<double> out(r.N());
    for (int n = 0; n < r.N(); ++n) out[n] = -r.delta() / r.c() - r.c() * n;
    return out;
}

BetheState make_state(const std::vector<cplx>& roots, const ReducedParams& r, int sigma) {
    check_length(roots, r);
    BetheState s;
    s.roots = roots;
    s.params = r;
    s.sigma = sigma;
    s.residual_norm = relative_residual(roots, r);
    return s;
}

double energy_from_roots(const std::vector<cplx>& roots, const ReducedParams& r) {
    check_length(roots, r);
    const double c = r.c();
    for (const auto& z : roots)
        if (std::abs(z) < 1e-12)
            throw Error(ErrorKind::ZeroRoot, "root with |l| < 1e-12");
    cplx prod;
    if (r.N() <= 512) {
        prod = 1.0;
        for (const auto& z : roots) prod *= 1.0 + c / z;
    } else {
        cplx lg = 0.0;
        for (const auto& z : roots) lg += std::log(1.0 + c / z);
        if (lg.real() > 709.0)
            throw Error(ErrorKind::NumericalOverflow, "root product overflows");
        prod = std::exp(lg);
    }
    if (std::fabs(prod.imag()) / std::max(1.0, std::fabs(prod.real())) > 1e-8)
        throw Error(ErrorKind::NonRealEnergy, "imaginary part of the root product is too large");
    return (prod.real() - 1.0) / (c * c);
}

double energy_from_roots(const BetheState& s) {
    if (!chain_agrees(s)) return energy_from_roots(s.roots, s.params);
    // Telescoped product over the descending chain:
    //   prod (1 + c/l_j) = (l_1 + c)/l_N * prod_{j<N} (1 - e_j/l_j),  e_j = gap excess.
    const auto& ch = *s.chain;
    const int N = s.params.N();
    const double c = s.params.c();
    if (static_cast<int>(ch.log_abs_root.size()) != N)
        throw Error(ErrorKind::LengthMismatch, "chain does not match N");
    auto [lg, sg] = log_one_plus(ch.root_sign[0], ch.log_abs_root[0] - std::log(c));
    lg += std::log(c) - ch.log_abs_root[N - 1];
    sg *= ch.root_sign[N - 1];
    for (int j = 0; j + 1 < N; ++j) {
        auto [l, s1] = log_one_plus(-ch.root_sign[j], ch.log_excess[j] - ch.log_abs_root[j]);
        lg += l;
        sg *= s1;
    }
    if (lg > 709.0)
        throw Error(ErrorKind::NumericalOverflow, "root product overflows");
    return (sg * std::exp(lg) - 1.0) / (c * c);
}

// Head position and gap ratio are structural diagnostics; they hold in the
// small-c picture only and do not make a state invalid.
bool DiagnosticsReport::ok() const {
    return distinct && conjugate_closed && residual_ok && real_negative;
}

bool chain_agrees(const BetheState& s) {
    if (!s.chain) return false;
    const auto& ch = *s.chain;
    const std::size_t n = s.roots.size();
    if (ch.log_abs_root.size() != n || ch.root_sign.size() != n || ch.log_excess.size() + 1 != n)
        return false;
    const double q = s.params.delta() / s.params.c();
    for (std::size_t k = 0; k < n; ++k) {
        const cplx& z = s.roots[k];
        double from_chain = ch.root_sign[k] * std::exp(ch.log_abs_root[k]);
        if (z.imag() != 0.0 || std::fabs(z.real() - from_chain) > 1e-12 * std::max(1.0, std::fabs(from_chain)))
            return false;
        if (s.pole_offsets) {
            const cplx& p = (*s.pole_offsets)[k];
            if (std::fabs(p.real() - (z.real() + q)) > 1e-12 * std::max({1.0, std::fabs(z.real()), q}))
                return false;
        }
    }
    return true;
}

DiagnosticsReport validate_state(const BetheState& s, double tol) {
    DiagnosticsReport rep;
    rep.tolerance = tol;
    const auto& z = s.roots;
    const int n = static_cast<int>(z.size());
    if (n != s.params.N()) rep.notes.push_back("root count differs from N");

    double scale = 1.0;
    for (const auto& x : z) scale = std::max(scale, std::abs(x));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(z[i] - z[j]) <= 1e-8 * scale) rep.distinct = false;
    if (!rep.distinct) rep.notes.push_back("roots are not pairwise distinct");

    for (int i = 0; i < n; ++i) {
        if (std::fabs(z[i].imag()) <= 1e-8) continue;
        bool found = false;
        for (int j = 0; j < n && !found; ++j)
            if (j != i && std::abs(z[j] - std::conj(z[i])) <= 1e-8) found = true;
        if (!found) rep.conjugate_closed = false;
    }
    if (!rep.conjugate_closed) rep.notes.push_back("root set is not closed under conjugation");

    const bool use_chain = chain_agrees(s);
    if (s.chain && !use_chain) rep.notes.push_back("stored chain does not match the roots; ignored");
    if (n == s.params.N()) {
        if (use_chain) {
            double m = 0.0;
            for (double g : chain_residual(*s.chain, s.params)) m = std::max(m, std::fabs(g));
            if (!chain_sign_consistent(*s.chain)) {
                m = std::numeric_limits<double>::infinity();
                rep.notes.push_back("equation signs disagree");
            }
            rep.residual_norm = m;
        } else {
            rep.residual_norm = relative_residual(z, s.params);
        }
    } else {
        rep.residual_norm = std::numeric_limits<double>::infinity();
    }
    rep.residual_ok = rep.residual_norm <= tol;
    if (!rep.residual_ok) rep.notes.push_back("residual above tolerance");

    if (s.sigma == 0 && n > 0) {
        rep.ground_checked = true;
        const double c = s.params.c();
        const double q = s.params.delta() / c;
        std::vector<double> re;
        for (const auto& x : z) {
            if (!(x.real() < 0.0) || std::fabs(x.imag()) > 1e-8) rep.real_negative = false;
            re.push_back(x.real());
        }
        std::sort(re.begin(), re.end(), std::greater<>());
        rep.head_offset = s.pole_offsets && use_chain ? s.chain->pole_sign[0] *
                                                          std::exp(s.chain->log_abs_pole[0])
                                                    : re[0] + q;
        double band = 0.1 * (q > 0.0 ? q : c);
        rep.head_near_pole = std::fabs(rep.head_offset) <= band;
        rep.min_gap_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i + 1 < n; ++i)
            rep.min_gap_ratio = std::min(rep.min_gap_ratio, (re[i] - re[i + 1]) / c);
        rep.gap_ok = n < 2 || rep.min_gap_ratio >= 0.95;
        if (!rep.real_negative) rep.notes.push_back("ground state roots must be real and negative");
        if (!rep.head_near_pole) rep.notes.push_back("largest root is far from -delta/c");
        if (!rep.gap_ok) rep.notes.push_back("consecutive gap below 0.95 c");
    }
    return rep;
}

BetheState shift_state(const BetheState& s) {
    const double q = s.params.delta() / s.params.c();
    BetheState t = s;
    t.params = ReducedParams(s.params.c(), -s.params.delta(), s.params.N());
    if (s.pole_offsets) {
        t.roots = *s.pole_offsets;
    } else {
        for (auto& z : t.roots) z += q;
    }
    t.pole_offsets = s.roots;
    if (s.chain) {
        std::swap(t.chain->log_abs_root, t.chain->log_abs_pole);
        std::swap(t.chain->root_sign, t.chain->pole_sign);
    }
    return t;
}

std::pair<std::vector<cplx>, ReducedParams> shift_transform(const BetheState& s) {
    BetheState t = shift_state(s);
    return {t.roots, t.params};
}

namespace {

nlohmann::json complex_list(const std::vector<cplx>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
}

std::vector<cplx> complex_list(const nlohmann::json& a) {
    std::vector<cplx> out;
    for (const auto& e : a) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return out;
}

}  // namespace

nlohmann::json state_to_json(const BetheState& s) {
    nlohmann::json j = {
        {"sigma", s.sigma},
        {"c", s.params.c()},
        {"delta", s.params.delta()},
        {"N", s.params.N()},
        {"roots", complex_list(s.roots)},
        {"residual_norm", s.residual_norm},
        {"iterations", s.iterations},
        {"continuation_steps", s.continuation_steps},
    };
    if (s.pole_offsets) j["pole_offsets"] = complex_list(*s.pole_offsets);
    if (s.chain) {
        j["chain"] = {
            {"log_excess", s.chain->log_excess},
            {"log_abs_root", s.chain->log_abs_root},
            {"log_abs_pole", s.chain->log_abs_pole},
            {"root_sign", s.chain->root_sign},
            {"pole_sign", s.chain->pole_sign},
        };
    }
    return j;
}

BetheState state_from_json(const nlohmann::json& j) {
    try {
        BetheState s;
        s.params = ReducedParams(j.at("c").get<double>(), j.at("delta").get<double>(),
                                 j.at("N").get<int>());
        s.sigma = j.at("sigma").get<int>();
        s.roots = complex_list(j.at("roots"));
        if (static_cast<int>(s.roots.size()) != s.params.N())
            throw Error(ErrorKind::LengthMismatch, "roots length differs from N");
        s.residual_norm = j.contains("residual_norm") && !j["residual_norm"].is_null()
                              ? j["residual_norm"].get<double>()
                              : relative_residual(s.roots, s.params);
        s.iterations = j.value("iterations", 0);
        s.continuation_steps = j.value("continuation_steps", 0);
        if (j.contains("pole_offsets")) s.pole_offsets = complex_list(j["pole_offsets"]);
        if (j.contains("chain")) {
            const auto& c = j["chain"];
            RootChain ch;
            ch.log_excess = c.at("log_excess").get<std::vector<double>>();
            ch.log_abs_root = c.at("log_abs_root").get<std::vector<double>>();
            ch.log_abs_pole = c.at("log_abs_pole").get<std::vector<double>>();
            ch.root_sign = c.at("root_sign").get<std::vector<int>>();
            ch.pole_sign = c.at("pole_sign").get<std::vector<int>>();
            s.chain = std::move(ch);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidParams, e.what());
    }
}

}  // namespace bhd
