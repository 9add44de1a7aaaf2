#include <doctest.h>

#include <cmath>
#include <random>

#include "bhdimer/approx.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"

using namespace bhd;

namespace {

double xi(double approx, double exact) { return (approx - exact) / exact; }

}  // namespace

TEST_CASE("ground formula arithmetic") {
    CHECK(ground_energy_reduced(ReducedParams(0.3, 0.5, 15)).value == doctest::Approx(-16.0 / 1.76).epsilon(1e-14));
    CHECK(ground_energy_reduced(ReducedParams(1.0, 0.5, 100)).value == doctest::Approx(-101.0 / 99.5).epsilon(1e-14));
    CHECK(ground_energy_reduced_telescoped(ReducedParams(1.0, 0.5, 100)).value ==
          doctest::Approx(-100.0 / 99.5).epsilon(1e-14));
    PhysicalParams p{-0.25, -1.0, -0.4, 0.0, 100};
    CHECK(ground_energy_physical(p).value == doctest::Approx(-2007.5187032418953).epsilon(1e-12));
}

TEST_CASE("excited formula arithmetic") {
    auto s = first_excited_reduced_small_c(ReducedParams(0.5, 1.0, 100));
    CHECK(s.value == doctest::Approx(0.25 * 99 - 100 / 25.5 + 1).epsilon(1e-14));
    CHECK(s.in_validity_regime);
    CHECK_FALSE(first_excited_reduced_small_c(ReducedParams(1.5, 1.0, 100)).in_validity_regime);

    ReducedParams r(1.0, 0.5, 100);
    CHECK(first_excited_reduced_large_c(r).value == doctest::Approx(50 - 101 / 99.5).epsilon(1e-14));
    CHECK(first_excited_reduced_large_c(r).value == 50.0 + ground_energy_reduced(r).value);

    PhysicalParams q{-0.25, -1.0, -0.4, 0.0, 100};
    CHECK_FALSE(first_excited_physical_small_c(q).in_validity_regime);
    PhysicalParams w{-0.25, -1.0, -1.0, 0.0, 100};
    auto l = first_excited_physical_large_c(w);
    CHECK_FALSE(l.in_validity_regime);
    CHECK(std::isfinite(l.value));
    CHECK(l.value - ground_energy_physical(w).value == doctest::Approx(-2 * w.epsilon * w.N));
}

TEST_CASE("physical formulas are the reduced ones mapped through the energy relation") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> E(-1.0, 1.0), J(-2.0, -0.2), U(-2.0, -0.05), V(-0.5, 0.5);
    std::uniform_int_distribution<int> N(3, 300);
    const std::pair<FormulaId, FormulaId> pairs[] = {
        {FormulaId::G_PHYS, FormulaId::G_RED},
        {FormulaId::E1_PHYS_SMALL, FormulaId::E1_RED_SMALL},
        {FormulaId::E1_PHYS_LARGE, FormulaId::E1_RED_LARGE},
    };
    int checked = 0;
    while (checked < 30) {
        PhysicalParams p{E(rng), J(rng), U(rng), V(rng), N(rng)};
        if (!(p.U - p.V < 0)) continue;
        ReducedParams r = reduce(p);
        if (r.delta() < 0) continue;
        for (auto [ph, red] : pairs) {
            double a = evaluate_formula(ph, r, p).value;
            double b = map_energy_to_physical(evaluate_formula(red, r).value, p);
            CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)) * 10);
        }
        ++checked;
    }
}

TEST_CASE("accuracy against the exact spectrum") {
    ReducedParams big(1.0, 0.5, 1000);
    auto e = reduced_spectrum(big).energies;
    CHECK(std::fabs(xi(ground_energy_reduced(big).value, e[0])) < 0.01);

    PhysicalParams p{-1.0, -1.0, -1.0, 0.0, 100};
    CHECK(std::fabs(xi(ground_energy_physical(p).value, physical_spectrum(p).energies[0])) < 0.01);

    ReducedParams s(0.5, 1.0, 100);
    CHECK(std::fabs(xi(first_excited_reduced_small_c(s).value, reduced_spectrum(s).energies[1])) < 0.02);
    ReducedParams l(1.0, 0.5, 100);
    CHECK(std::fabs(xi(first_excited_reduced_large_c(l).value, reduced_spectrum(l).energies[1])) < 0.02);

    PhysicalParams q{-0.25, -1.0, -0.1, 0.0, 500};
    // the physical flags follow U - V < 2 epsilon literally; with J < 0 that is the opposite side of c^2 = delta
    CHECK_FALSE(first_excited_physical_small_c(q).in_validity_regime);
    CHECK(std::fabs(xi(first_excited_physical_small_c(q).value, physical_spectrum(q).energies[1])) < 0.02);
    PhysicalParams w{-0.25, -1.0, -0.3, 0.0, 500};
    CHECK(first_excited_physical_large_c(w).in_validity_regime);
    CHECK(std::fabs(xi(first_excited_physical_large_c(w).value, physical_spectrum(w).energies[1])) < 0.02);
}

TEST_CASE("ground formula error shrinks with N") {
    for (double c2 : {0.04, 0.25, 1.0}) {
        double prev = INFINITY;
        for (int N : {100, 200, 400, 800}) {
            ReducedParams r(std::sqrt(c2), 0.5, N);
            double x = std::fabs(xi(ground_energy_reduced(r).value, reduced_spectrum(r).energies[0]));
            CHECK(x <= 1.2 * prev);
            prev = x;
        }
    }
}

TEST_CASE("linearized excited root and regimes") {
    CHECK(lambda_linear(ReducedParams(0.5, 1.0, 100)) == doctest::Approx(0.0022879).epsilon(1e-4));
    try {
        lambda_linear(ReducedParams(1.0, 1.0, 100));
        FAIL("boundary accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RegimeViolation);
    }
    CHECK(regime(ReducedParams(0.5, 1.0, 4)) == Regime::SMALL_C);
    CHECK(regime(ReducedParams(1.2, 1.0, 4)) == Regime::LARGE_C);
    CHECK(regime(ReducedParams(1.0, 1.0, 4)) == Regime::BOUNDARY);
    for (double c : {0.3, 0.9, 1.1, 2.0}) {
        ReducedParams r(c, 1.0, 50);
        CHECK(first_excited_reduced_small_c(r).in_validity_regime !=
              first_excited_reduced_large_c(r).in_validity_regime);
    }
}

TEST_CASE("degenerate denominators and identifiers") {
    try {
        ground_energy_reduced(ReducedParams(1e-8, 0.0, 1));
        FAIL("zero denominator accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateDenominator);
    }
    for (FormulaId f : all_formulas()) CHECK(formula_from_string(to_string(f)) == f);
    CHECK_FALSE(formula_from_string("nope"));
}
