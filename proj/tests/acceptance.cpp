// One line per acceptance criterion. Exit status is zero when the set of failing
// criteria equals the set named with --expect-fail (comma separated).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bhdimer/approx.hpp"
#include "bhdimer/bethe.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"
#include "bhdimer/fock.hpp"
#include "bhdimer/sweep.hpp"
#include "oracles.hpp"

using namespace bhd;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Converged ground states of criterion 2, reused by criterion 9.
std::vector<BetheState> ground_states;

Outcome oracle_correctness() {
    Outcome o;
    double worst2 = 0, worst_tr = 0;
    for (double d : {0.0, 0.5})
        for (double c : {0.4, 1.0, 2.5}) {
            auto e = reduced_spectrum(ReducedParams(c, d, 1)).energies;
            double r = std::sqrt(0.25 * d * d + 1.0);
            worst2 = std::max({worst2, std::fabs(e[0] - (0.5 * d - r)), std::fabs(e[1] - (0.5 * d + r))});
        }
    if (worst2 > 1e-12) o.fail(fmt("2x2 deviation %.3g", worst2));
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> C(0.05, 3.0), D(0.0, 2.0);
    std::uniform_int_distribution<int> N(1, 200);
    for (int t = 0; t < 50; ++t) {
        ReducedParams r(C(rng), D(rng), N(rng));
        double sum = 0;
        for (double e : reduced_spectrum(r).energies) sum += e;
        double tr = reduced_trace(r);
        worst_tr = std::max(worst_tr, std::fabs(sum - tr) / std::max(1.0, std::fabs(tr)));
    }
    if (worst_tr > 1e-9) o.fail(fmt("trace deviation %.3g", worst_tr));
    if (o.pass) o.detail = fmt("2x2 err %.2g, trace err %.2g", worst2, worst_tr);
    return o;
}

Outcome ground_soundness() {
    Outcome o;
    double worst = 0;
    int solved = 0;
    for (double c2 : {0.04, 0.09, 0.25, 1.0, 4.0})
        for (double d : {0.0, 0.5, 1.0})
            for (int N : {2, 5, 15, 50}) {
                ReducedParams r(std::sqrt(c2), d, N);
                try {
                    BetheState s = solve_ground(r);
                    double x = rel(energy_from_roots(s), reduced_spectrum(r).energies[0]);
                    worst = std::max(worst, x);
                    if (x > 1e-8) o.fail(fmt("c2=%g delta=%g N=%d rel %.3g", c2, d, N, x));
                    ground_states.push_back(s);
                    ++solved;
                } catch (const Error& e) {
                    o.fail(fmt("c2=%g delta=%g N=%d: %s", c2, d, N, to_string(e.kind())));
                }
            }
    BetheState s = solve_ground(ReducedParams(0.3, 0.5, 15));
    auto rep = validate_state(s);
    if (!(rep.ok() && rep.real_negative && rep.head_near_pole && rep.min_gap_ratio >= 0.95))
        o.fail(fmt("root pattern: head offset %.3g, gap ratio %.3g", rep.head_offset, rep.min_gap_ratio));
    if (o.pass)
        o.detail = fmt("%d/60 solved, worst rel %.2g; pattern head %+.3g, gap ratio %.3f", solved, worst,
                       rep.head_offset, rep.min_gap_ratio);
    return o;
}

Outcome excited_soundness() {
    Outcome o;
    double worst = 0;
    int solved = 0;
    for (double c2 : {0.04, 0.09, 0.25, 1.0, 4.0})
        for (double d : {0.0, 0.5, 1.0}) {
            if (std::fabs(c2 - d) < 0.05) continue;
            for (int N : {2, 5, 15, 50}) {
                ReducedParams r(std::sqrt(c2), d, N);
                try {
                    BetheState s = solve_first_excited(r);
                    double ex = reduced_spectrum(r).energies[1];
                    double E = energy_from_roots(s);
                    // an exactly vanishing level (delta = 0, N = 2) is compared absolutely
                    double x = std::fabs(ex) < 1e-12 ? std::fabs(E - ex) : rel(E, ex);
                    worst = std::max(worst, x);
                    if (x > 1e-8) o.fail(fmt("c2=%g delta=%g N=%d rel %.3g", c2, d, N, x));
                    ++solved;
                } catch (const Error& e) {
                    o.fail(fmt("c2=%g delta=%g N=%d: %s", c2, d, N, to_string(e.kind())));
                }
            }
        }
    if (o.pass) o.detail = fmt("%d solved, worst rel %.2g", solved, worst);
    return o;
}

Outcome ground_formula_accuracy() {
    Outcome o;
    double worst = 0;
    for (double c2 : {0.01, 0.04, 0.4, 1.0}) {
        ReducedParams r(std::sqrt(c2), 0.5, 1000);
        double ex = reduced_spectrum(r).energies[0];
        double xi = std::fabs((ground_energy_reduced(r).value - ex) / ex);
        worst = std::max(worst, xi);
        if (xi >= 0.01) o.fail(fmt("c2=%g |xi|=%.4f", c2, xi));
    }
    if (o.pass) o.detail = fmt("max |xi| %.4f", worst);
    return o;
}

Outcome power_laws() {
    Outcome o;
    struct Case {
        FormulaId f;
        double U, target;
    };
    const Case cases[] = {
        {FormulaId::G_RED, -0.4, 1.0},        {FormulaId::G_PHYS, -0.4, 2.9},
        {FormulaId::E1_RED_SMALL, -0.4, 2.0}, {FormulaId::E1_PHYS_SMALL, -0.4, 2.9},
        {FormulaId::E1_RED_LARGE, -1.0, 3.0}, {FormulaId::E1_PHYS_LARGE, -1.0, 4.0},
    };
    std::string summary;
    for (const auto& cs : cases) {
        SweepSpec s;
        s.axis = SweepAxis::N;
        s.range = {100, 1000, 100.0, std::nullopt};
        s.fixed = PhysicalParams{-0.25, -1.0, cs.U, 0.0, 1};
        s.formulas = {cs.f};
        s.workers = 4;
        try {
            AlphaFit fit = fit_alpha(run_sweep(s));
            summary += fmt("%s %.2f ", to_string(cs.f), fit.alpha);
            if (std::fabs(fit.alpha - cs.target) > 0.5)
                o.fail(fmt("%s alpha %.3f vs %.1f", to_string(cs.f), fit.alpha, cs.target));
        } catch (const Error& e) {
            o.fail(fmt("%s: %s", to_string(cs.f), e.what()));
        }
    }
    if (o.pass) o.detail = summary;
    return o;
}

Outcome regime_transition() {
    Outcome o;
    const int N = 100;
    double w26 = 0, w30 = 0, wshift = 0;
    // c from 0.4 to 1.6: c^2 from 0.16 to 2.56, straddling the boundary c^2 = delta = 1
    for (int i = 0; i <= 24; ++i) {
        double c = 0.4 + 0.05 * i;
        double c2 = c * c;
        ReducedParams r(c, 1.0, N);
        double ex = reduced_spectrum(r).energies[1];
        if (c2 <= 0.5 + 1e-12) {
            double x = std::fabs((first_excited_reduced_small_c(r).value - ex) / ex);
            w26 = std::max(w26, x);
            if (x > 0.02) o.fail(fmt("small-c formula at c2=%.3f: %.4f", c2, x));
        }
        if (c2 >= 2.0 - 1e-12) {
            double x = std::fabs((first_excited_reduced_large_c(r).value - ex) / ex);
            w30 = std::max(w30, x);
            if (x > 0.02) o.fail(fmt("large-c formula at c2=%.3f: %.4f", c2, x));
            double y = std::fabs(ex - N * 1.0) / (N * 1.0);
            wshift = std::max(wshift, y);
            if (y > 0.03) o.fail(fmt("exact level at c2=%.3f is %.3f from N delta", c2, y));
        }
    }
    // reported, not asserted: the small-c formula below the grid
    ReducedParams low(std::sqrt(0.1), 1.0, N);
    double e_low = reduced_spectrum(low).energies[1];
    double x_low = std::fabs((first_excited_reduced_small_c(low).value - e_low) / e_low);
    if (o.pass)
        o.detail = fmt("small-c %.4f, large-c %.4f, |E1/(N delta) - 1| %.4f; c2=0.1 small-c %.4f", w26, w30,
                       wshift, x_low);
    return o;
}

Outcome symmetry_suite() {
    Outcome o;
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> E(-1.5, 1.5), J(-2.0, 2.0), U(-1.5, 1.5);
    std::uniform_int_distribution<int> N(1, 50);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        PhysicalParams p{E(rng), J(rng), U(rng), U(rng), N(rng)};
        auto base = physical_spectrum(p).energies;
        double scale = 1.0;
        for (double e : base) scale = std::max(scale, std::fabs(e));
        for (const auto& im : symmetry_images(p)) {
            double m = spectrum_mismatch(base, physical_spectrum(im.params).energies, im.sign) / scale;
            worst = std::max(worst, m);
            if (m > 1e-10) o.fail(fmt("trial %d mismatch %.3g", t, m));
        }
    }
    if (o.pass) o.detail = fmt("60 images, worst scaled mismatch %.2g", worst);
    return o;
}

Outcome fock_machinery() {
    Outcome o;
    for (int M = 1; M <= 8; ++M)
        for (int k = 0; k <= M; ++k)
            if (stirling_D(M, k) != oracle::d_closed(M, k)) o.fail(fmt("D(%d,%d) differs", M, k));

    std::mt19937 rng(29);
    std::uniform_real_distribution<double> C(0.3, 2.0), D(0.0, 1.5), R(-3.0, 1.0);
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
        double c = C(rng), d = D(rng);
        for (int N = 1; N <= 6; ++N) {
            std::vector<cplx> roots(N);
            std::vector<oracle::ld> lr(N);
            for (int j = 0; j < N; ++j) {
                roots[j] = R(rng);
                lr[j] = roots[j].real();
            }
            BetheState s = make_state(roots, ReducedParams(c, d, N), 0);
            auto cmp = [&](const std::vector<double>& got, const std::vector<oracle::ld>& want) {
                oracle::ld scale = 0;
                for (auto w : want) scale = std::max(scale, std::fabs(w));
                for (std::size_t k = 0; k < got.size(); ++k)
                    worst = std::max(worst, double(std::fabs(got[k] - want[k]) / scale));
            };
            cmp(ket_expansion(s).coeffs, oracle::symbolic_ket(lr, c, d));
            cmp(bra_expansion(s).coeffs, oracle::symbolic_bra(lr, c));
        }
    }
    if (worst > 1e-12) o.fail(fmt("expansion deviation %.3g", worst));

    ReducedParams r(1.0, 0.5, 10);
    Observable abd{ObservableKind::ABdag, {}};
    double ex = exact_expectation(r, 0, abd);
    auto [approx, solved] = expectation_with_approx_roots(r, abd);
    double ds = rel(solved, ex), da = rel(approx, ex);
    if (ds > 1e-6) o.fail(fmt("solved-root <ab+> off by %.3g", ds));
    if (!(da > 0.1)) o.fail(fmt("equidistant-root <ab+> deviates only %.4f (exact %.6f, equidistant %.6f)", da, ex, approx));
    if (o.pass) o.detail = fmt("expansions %.2g, solved %.2g, equidistant %.3f", worst, ds, da);
    return o;
}

Outcome eigenstate_coherence() {
    Outcome o;
    Observable ham{ObservableKind::Hamiltonian, {}};
    double worst = 0;
    int used = 0;
    for (const auto& s : ground_states) {
        if (s.params.N() > 20) continue;
        double E = energy_from_roots(s);
        double x = rel(expectation(s, ham), E);
        worst = std::max(worst, x);
        ++used;
        if (x > 1e-8) o.fail(fmt("c=%g delta=%g N=%d rel %.3g", s.params.c(), s.params.delta(), s.params.N(), x));
    }
    if (used == 0) o.fail("no converged states from criterion 2");
    if (o.pass) o.detail = fmt("%d states, worst rel %.2g", used, worst);
    return o;
}

Outcome determinism() {
    Outcome o;
    SweepSpec s;
    s.axis = SweepAxis::C;
    s.range = {0.1, 2.0, std::nullopt, 40};
    s.fixed = ReducedParams(1.0, 0.5, 200);
    s.formulas = all_formulas();
    auto render = [&](int workers) {
        s.workers = workers;
        std::ostringstream os;
        write_records_csv(os, run_sweep(s));
        return os.str();
    };
    std::string a = render(1), b = render(1), c = render(6);
    if (a != b) o.fail("repeated single-worker runs differ");
    if (a != c) o.fail("worker count changes the output");
    if (o.pass) o.detail = fmt("%zu bytes identical across 3 runs", a.size());
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expected;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--expect-fail") == 0) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) expected.insert(std::stoi(item));
        }

    using Fn = Outcome (*)();
    const std::pair<const char*, Fn> criteria[] = {
        {"oracle correctness", oracle_correctness},
        {"ground-state soundness", ground_soundness},
        {"first-excited soundness", excited_soundness},
        {"ground formula accuracy", ground_formula_accuracy},
        {"power-law exponents", power_laws},
        {"regime transition", regime_transition},
        {"symmetry suite", symmetry_suite},
        {"Fock machinery", fock_machinery},
        {"eigenstate coherence", eigenstate_coherence},
        {"determinism", determinism},
    };
    std::set<int> failed;
    int idx = 0;
    for (const auto& [name, fn] : criteria) {
        ++idx;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) failed.insert(idx);
        const char* tag = o.pass ? (expected.count(idx) ? "XPASS" : "PASS") : (expected.count(idx) ? "XFAIL" : "FAIL");
        std::printf("[%-5s] criterion %2d  %-24s %s (%.1fs)\n", tag, idx, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/10 criteria pass\n", 10 - failed.size());
    return failed == expected ? 0 : 1;
}
