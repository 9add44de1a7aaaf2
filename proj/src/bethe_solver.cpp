#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "bhdimer/approx.hpp"
#include "bhdimer/bethe.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"

namespace bhd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Real root sets are parametrized by u = log of positive offsets w = exp(u):
//   Ground:        l_0 = -q - w_0,                l_{k+1} = l_k - c - w_{k+1}
//   ExcitedLarge:  l_0 = w_0,                     l_{k+1} = l_k - c - w_{k+1}
//   ExcitedSmall:  l_0 = w_0, l_1 = -q - w_1,     l_{k+1} = l_k - c - w_{k+1} (k >= 1)
// with q = delta/c. Every gap then exceeds c and the anchors sit on the correct
// side of 0 and -q by construction; the equations are solved in log-ratio form.
enum class Topology { Ground, ExcitedLarge, ExcitedSmall };

double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

struct Eval {
    std::vector<double> G;
    Eigen::MatrixXd J;
    RootChain chain;
    std::vector<double> root, pole;
    bool finite = true;
};

Eval evaluate(Topology topo, const std::vector<double>& u, double c, double delta, bool want_jac) {
    const int N = static_cast<int>(u.size());
    const double q = delta / c;
    const double lq = safe_log(q);
    const double logc = std::log(c);
    const bool small = topo == Topology::ExcitedSmall;

    Eval ev;
    for (double x : u)
        if (!std::isfinite(x) || x > 700.0) {
            ev.finite = false;
            return ev;
        }
    std::vector<double> w(N);
    for (int v = 0; v < N; ++v) w[v] = std::exp(u[v]);

    // links
    const int L = N - 1;
    std::vector<double> le(L), ex(L), d(L);
    for (int k = 0; k < L; ++k) {
        if (small && k == 0)
            le[k] = log_add(std::log((delta - c * c) / c), log_add(u[0], u[1]));
        else
            le[k] = u[k + 1];
        ex[k] = std::exp(le[k]);
        d[k] = c + ex[k];
    }

    // single-root quantities
    auto& ch = ev.chain;
    ch.log_excess = le;
    ch.log_abs_root.resize(N);
    ch.log_abs_pole.resize(N);
    ch.root_sign.resize(N);
    ch.pole_sign.resize(N);
    ev.root.resize(N);
    ev.pole.resize(N);
    auto set_linear = [&](int i, double root, double pole) {
        ev.root[i] = root;
        ev.pole[i] = pole;
        ch.root_sign[i] = root < 0.0 ? -1 : 1;
        ch.pole_sign[i] = pole < 0.0 ? -1 : 1;
        ch.log_abs_root[i] = safe_log(std::fabs(root));
        ch.log_abs_pole[i] = safe_log(std::fabs(pole));
    };
    if (topo == Topology::Ground) {
        double D = 0.0;
        for (int i = 0; i < N; ++i) {
            if (i > 0) D += d[i - 1];
            double pole = -(w[0] + D);
            set_linear(i, pole - q, pole);
        }
        ch.log_abs_pole[0] = u[0];
        ch.log_abs_root[0] = log_add(lq, u[0]);
        ch.pole_sign[0] = ch.root_sign[0] = -1;
    } else {
        set_linear(0, w[0], w[0] + q);
        ch.log_abs_root[0] = u[0];
        ch.log_abs_pole[0] = log_add(u[0], lq);
        ch.root_sign[0] = ch.pole_sign[0] = 1;
        if (small) {
            double D = 0.0;
            for (int i = 1; i < N; ++i) {
                if (i > 1) D += d[i - 1];
                double pole = -(w[1] + D);
                set_linear(i, pole - q, pole);
            }
            if (N > 1) {
                ch.log_abs_pole[1] = u[1];
                ch.log_abs_root[1] = log_add(lq, u[1]);
                ch.pole_sign[1] = ch.root_sign[1] = -1;
            }
        } else {
            double D = 0.0;
            for (int i = 1; i < N; ++i) {
                D += d[i - 1];
                double root = w[0] - D;
                set_linear(i, root, root + q);
            }
        }
    }

    ev.G.assign(N, 0.0);
    for (int i = 0; i < N; ++i)
        ev.G[i] = 2.0 * logc + ch.log_abs_root[i] + ch.log_abs_pole[i];

    // pair terms T_ij = log(S+c) - log(S-c), S = l_i - l_j, added to G_i, subtracted from G_j
    std::vector<double> h;  // h[i*N+j] = dT/dS for non-adjacent pairs
    if (want_jac) h.assign(std::size_t(N) * N, 0.0);
    for (int i = 0; i < N; ++i) {
        double M = 0.0;
        for (int j = i + 1; j < N; ++j) {
            double T;
            if (j == i + 1) {
                M = ex[i];
                T = std::log(M + 2.0 * c) - le[i];
            } else {
                M += d[j - 1];
                T = std::log(M + 2.0 * c) - std::log(M);
                if (want_jac) h[std::size_t(i) * N + j] = 1.0 / (M + 2.0 * c) - 1.0 / M;
            }
            ev.G[i] += T;
            ev.G[j] -= T;
        }
    }
    for (double g : ev.G)
        if (!std::isfinite(g)) ev.finite = false;
    if (!want_jac || !ev.finite) return ev;

    Eigen::MatrixXd& J = ev.J;
    J.setZero(N, N);

    // single-root derivatives
    auto ratio = [&](int v, double logq) { return std::exp(u[v] - logq); };
    for (int i = 0; i < N; ++i) {
        const double lr = ch.log_abs_root[i], lp = ch.log_abs_pole[i];
        const int sr = ch.root_sign[i], sp = ch.pole_sign[i];
        if (topo == Topology::Ground) {
            for (int v = 0; v <= i; ++v) J(i, v) += ratio(v, lr) + ratio(v, lp);
        } else if (i == 0) {
            J(i, 0) += 1.0 + ratio(0, lp);
        } else if (small) {
            for (int v = 1; v <= i; ++v) J(i, v) += ratio(v, lr) + ratio(v, lp);
        } else {
            J(i, 0) += sr * ratio(0, lr) + sp * ratio(0, lp);
            for (int v = 1; v <= i; ++v) J(i, v) -= sr * ratio(v, lr) + sp * ratio(v, lp);
        }
    }

    // link k contributes through (variable, de_k/du_v, dle_k/du_v)
    auto for_link_vars = [&](int k, auto&& f) {
        if (small && k == 0) {
            f(0, w[0], std::exp(u[0] - le[0]));
            f(1, w[1], std::exp(u[1] - le[0]));
        } else {
            f(k + 1, ex[k], 1.0);
        }
    };

    std::vector<double> acc(std::max(L, 0));
    for (int i = 0; i < N; ++i) {
        // pairs (i, j > i): links k >= i, weight sum_{j >= max(k+1, i+2)} h_ij
        std::fill(acc.begin(), acc.end(), 0.0);
        double suffix = 0.0;
        for (int k = L - 1; k >= i; --k) {
            int j = k + 1;
            if (j >= i + 2) suffix += h[std::size_t(i) * N + j];
            acc[k] = suffix;
        }
        for (int k = i; k < L; ++k) {
            double a = acc[k];
            bool adj = k == i;
            for_link_vars(k, [&](int v, double de, double dle) {
                J(i, v) += de * a;
                if (adj) J(i, v) += de / (ex[k] + 2.0 * c) - dle;
            });
        }
        // pairs (i' < i, i): links k in [i', i-1], weight -sum_{i' <= min(k, i-2)} h_{i'i}
        double prefix = 0.0;
        for (int k = 0; k < i; ++k) {
            if (k <= i - 2) prefix += h[std::size_t(k) * N + i];
            double b = -prefix;
            bool adj = k == i - 1;
            for_link_vars(k, [&](int v, double de, double dle) {
                J(i, v) += de * b;
                if (adj) J(i, v) += dle - de / (ex[k] + 2.0 * c);
            });
        }
    }
    return ev;
}

double inf_norm(const std::vector<double>& g) {
    double m = 0.0;
    for (double x : g) m = std::max(m, std::fabs(x));
    return m;
}

bool signs_ok(const RootChain& ch) { return chain_sign_consistent(ch); }

struct NewtonResult {
    bool converged = false;
    std::vector<double> u;
    double norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

NewtonResult newton(Topology topo, std::vector<double> u, double c, double delta,
                    const SolverOptions& opts) {
    NewtonResult res;
    Eval ev = evaluate(topo, u, c, delta, true);
    if (!ev.finite) {
        res.u = u;
        return res;
    }
    double norm = inf_norm(ev.G);
    const int N = static_cast<int>(u.size());
    int polish = 0;
    int it = 0;
    while (it < opts.max_iter) {
        if (norm <= opts.tol) {
            if (polish >= 3) break;
            ++polish;
        }
        Eigen::VectorXd g(N);
        for (int i = 0; i < N; ++i) g[i] = ev.G[i];
        Eigen::VectorXd du = ev.J.partialPivLu().solve(-g);
        double big = du.cwiseAbs().maxCoeff();
        if (!std::isfinite(big)) break;
        if (big > opts.max_step) du *= opts.max_step / big;

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
            std::vector<double> trial(u);
            for (int i = 0; i < N; ++i) trial[i] += t * du[i];
            Eval tr = evaluate(topo, trial, c, delta, false);
            if (!tr.finite) continue;
            double tn = inf_norm(tr.G);
            if (tn < norm) {
                u = std::move(trial);
                ev = evaluate(topo, u, c, delta, true);
                norm = tn;
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) break;
    }
    res.u = std::move(u);
    res.norm = norm;
    res.iterations = it;
    res.converged = norm <= opts.tol && signs_ok(ev.chain);
    return res;
}

std::vector<double> seed(Topology topo, const ReducedParams& r, const SolverOptions& opts) {
    const int N = r.N();
    const double c = r.c(), delta = r.delta();
    std::vector<double> u(N, std::log(opts.seed_gap * c));
    if (topo == Topology::ExcitedSmall) {
        double l1 = 0.0;
        if (N >= 2) {
            try {
                l1 = lambda_linear(r);
            } catch (const Error&) {
                l1 = 0.0;
            }
        }
        if (l1 > 0.0 && std::isfinite(l1)) u[0] = std::log(l1);
    } else if (topo == Topology::ExcitedLarge) {
        // scalar pre-solve of the first equation for the positive root, others held fixed
        auto g0 = [&](double x) {
            u[0] = x;
            Eval ev = evaluate(topo, u, c, delta, false);
            return ev.finite ? ev.G[0] : std::numeric_limits<double>::quiet_NaN();
        };
        double lo = std::log(1e-250), hi = std::log(c) + 2.0;
        double glo = g0(lo), ghi = g0(hi);
        double x = std::log(1e-3 * c);
        if (std::isfinite(glo) && std::isfinite(ghi) && glo < 0.0 && ghi > 0.0) {
            for (int k = 0; k < 100 && hi - lo > 1e-12; ++k) {
                double mid = 0.5 * (lo + hi);
                double gm = g0(mid);
                if (!std::isfinite(gm)) break;
                (gm < 0.0 ? lo : hi) = mid;
            }
            x = 0.5 * (lo + hi);
        } else if (std::isfinite(glo) && glo >= 0.0) {
            x = lo;
        }
        u[0] = x;
    }
    return u;
}

BetheState finish(Topology topo, const std::vector<double>& u, const ReducedParams& r, int sigma,
                  const NewtonResult& nr) {
    Eval ev = evaluate(topo, u, r.c(), r.delta(), false);
    BetheState s;
    s.params = r;
    s.sigma = sigma;
    const int N = r.N();
    s.roots.resize(N);
    std::vector<cplx> poles(N);
    for (int i = 0; i < N; ++i) {
        s.roots[i] = ev.root[i];
        poles[i] = ev.pole[i];
    }
    s.pole_offsets = std::move(poles);
    s.chain = std::move(ev.chain);
    s.residual_norm = inf_norm(ev.G);
    s.iterations = nr.iterations;
    return s;
}

std::string format_trace(const std::vector<ContinuationStep>& trace) {
    std::ostringstream os;
    os << "continuation trace:";
    for (const auto& st : trace)
        os << " [c=" << st.c << (st.converged ? " ok" : " fail") << " it=" << st.iterations
           << " res=" << st.residual_norm << "]";
    return os.str();
}

BetheState solve_topology(Topology topo, const ReducedParams& r, int sigma, const SolverOptions& opts) {
    NewtonResult nr = newton(topo, seed(topo, r, opts), r.c(), r.delta(), opts);
    std::vector<ContinuationStep> trace;
    trace.push_back({r.c(), nr.converged, nr.iterations, nr.norm});
    int steps = 0;
    int total_iter = nr.iterations;

    if (!nr.converged && opts.continuation) {
        const double ct = r.c();
        double cs = topo == Topology::ExcitedSmall ? 0.25 * ct
                                                   : 4.0 * std::max(ct, std::sqrt(r.delta()));
        ReducedParams rs(cs, r.delta(), r.N());
        NewtonResult cur = newton(topo, seed(topo, rs, opts), cs, r.delta(), opts);
        trace.push_back({cs, cur.converged, cur.iterations, cur.norm});
        total_iter += cur.iterations;
        if (cur.converged) {
            double cc = cs;
            double step = (ct - cs) / 8.0;
            const double floor = opts.continuation_floor * ct;
            while (cc != ct) {
                double next = cc + step;
                if ((step < 0.0 && next <= ct) || (step > 0.0 && next >= ct)) next = ct;
                NewtonResult tr = newton(topo, cur.u, next, r.delta(), opts);
                trace.push_back({next, tr.converged, tr.iterations, tr.norm});
                total_iter += tr.iterations;
                ++steps;
                if (tr.converged) {
                    cur = std::move(tr);
                    cc = next;
                    step *= 1.5;
                } else {
                    step *= 0.5;
                    if (std::fabs(step) < floor) break;
                }
            }
            if (cc == ct) nr = cur;
        }
    }

    if (!nr.converged) {
        Eval ev = evaluate(topo, nr.u, r.c(), r.delta(), false);
        if (ev.finite && inf_norm(ev.G) <= opts.tol && !signs_ok(ev.chain))
            throw Error(ErrorKind::StructureViolation,
                        "converged to a root set whose equation signs disagree; " +
                            format_trace(trace));
        throw Error(ErrorKind::NoConvergence, format_trace(trace));
    }

    BetheState s = finish(topo, nr.u, r, sigma, nr);
    s.iterations = total_iter;
    s.continuation_steps = steps;
    s.trace = std::move(trace);

    if (opts.cross_validate) {
        double E = energy_from_roots(s);
        double Ex = reduced_spectrum(r).energies.at(sigma);
        if (std::fabs(E - Ex) > opts.energy_check_tol * std::max(1.0, std::fabs(Ex)))
            throw Error(ErrorKind::StructureViolation,
                        "energy from roots does not match eigenvalue " + std::to_string(sigma));
    }
    return s;
}

void require_solver_params(const ReducedParams& r) {
    if (r.delta() < 0.0)
        throw Error(ErrorKind::InvalidParams, "root solvers require delta >= 0");
}

}  // namespace

BetheState solve_ground(const ReducedParams& r, const SolverOptions& opts) {
    require_solver_params(r);
    BetheState s = solve_topology(Topology::Ground, r, 0, opts);
    // underflowed roots print as -0, so the signs come from the chain
    for (int sg : s.chain->root_sign)
        if (sg >= 0) throw Error(ErrorKind::StructureViolation, "ground state root is not negative");
    return s;
}

BetheState solve_first_excited(const ReducedParams& r, const SolverOptions& opts) {
    require_solver_params(r);
    double gap = r.c2() - r.delta();
    if (std::fabs(gap) < opts.boundary_guard)
        throw Error(ErrorKind::RegimeBoundary, "|c^2 - delta| below the boundary guard");
    Topology topo = gap > 0.0 ? Topology::ExcitedLarge : Topology::ExcitedSmall;
    return solve_topology(topo, r, 1, opts);
}

std::vector<double> chain_residual(const RootChain& ch, const ReducedParams& r) {
    const int N = static_cast<int>(ch.log_abs_root.size());
    if (static_cast<int>(ch.log_abs_pole.size()) != N ||
        static_cast<int>(ch.log_excess.size()) != std::max(N - 1, 0))
        throw Error(ErrorKind::LengthMismatch, "inconsistent chain lengths");
    const double c = r.c();
    std::vector<double> G(N);
    for (int i = 0; i < N; ++i) G[i] = 2.0 * std::log(c) + ch.log_abs_root[i] + ch.log_abs_pole[i];
    for (int i = 0; i < N; ++i) {
        double M = 0.0;
        for (int j = i + 1; j < N; ++j) {
            double T;
            if (j == i + 1) {
                M = std::exp(ch.log_excess[i]);
                T = std::log(M + 2.0 * c) - ch.log_excess[i];
            } else {
                M += c + std::exp(ch.log_excess[j - 1]);
                T = std::log(M + 2.0 * c) - std::log(M);
            }
            G[i] += T;
            G[j] -= T;
        }
    }
    return G;
}

bool chain_sign_consistent(const RootChain& ch) {
    for (std::size_t i = 0; i < ch.root_sign.size(); ++i)
        if (ch.root_sign[i] * ch.pole_sign[i] <= 0) return false;
    return true;
}

}  // namespace bhd
