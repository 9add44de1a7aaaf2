#include "bhdimer/approx.hpp"

#include <cmath>

#include "bhdimer/errors.hpp"

namespace bhd {

namespace {

constexpr double kDenomFloor = 1e-12;

double checked(double denom) {
    if (std::fabs(denom) < kDenomFloor)
        throw Error(ErrorKind::DegenerateDenominator, "denominator below 1e-12");
    return denom;
}

void require_physical(const PhysicalParams& p) {
    validate(p);
    if (p.J == 0.0)
        throw Error(ErrorKind::ZeroTunneling, "J = 0");
    if (!(p.U - p.V < 0.0))
        throw Error(ErrorKind::NonAttractive, "formulas require U - V < 0");
}

}  // namespace

const char* to_string(FormulaId f) {
    switch (f) {
        case FormulaId::G_RED: return "G_RED";
        case FormulaId::G_PHYS: return "G_PHYS";
        case FormulaId::E1_RED_SMALL: return "E1_RED_SMALL";
        case FormulaId::E1_PHYS_SMALL: return "E1_PHYS_SMALL";
        case FormulaId::E1_RED_LARGE: return "E1_RED_LARGE";
        case FormulaId::E1_PHYS_LARGE: return "E1_PHYS_LARGE";
        case FormulaId::G_RED_TELESCOPED: return "G_RED_TELESCOPED";
    }
    return "?";
}

std::vector<FormulaId> all_formulas() {
    return {FormulaId::G_RED,        FormulaId::G_PHYS,        FormulaId::E1_RED_SMALL,
            FormulaId::E1_PHYS_SMALL, FormulaId::E1_RED_LARGE, FormulaId::E1_PHYS_LARGE,
            FormulaId::G_RED_TELESCOPED};
}

std::optional<FormulaId> formula_from_string(const std::string& s) {
    for (FormulaId f : all_formulas())
        if (s == to_string(f)) return f;
    return std::nullopt;
}

bool is_physical(FormulaId f) {
    return f == FormulaId::G_PHYS || f == FormulaId::E1_PHYS_SMALL || f == FormulaId::E1_PHYS_LARGE;
}

int target_sigma(FormulaId f) {
    switch (f) {
        case FormulaId::G_RED:
        case FormulaId::G_PHYS:
        case FormulaId::G_RED_TELESCOPED: return 0;
        default: return 1;
    }
}

const char* to_string(Regime g) {
    switch (g) {
        case Regime::SMALL_C: return "SMALL_C";
        case Regime::LARGE_C: return "LARGE_C";
        case Regime::BOUNDARY: return "BOUNDARY";
    }
    return "?";
}

EnergyEstimate ground_energy_reduced(const ReducedParams& r) {
    double N = r.N();
    double den = checked(r.c2() * (N - 1.0) + r.delta());
    return {-(N + 1.0) / den, FormulaId::G_RED, r.c2() > 0.01};
}

EnergyEstimate ground_energy_reduced_telescoped(const ReducedParams& r) {
    double N = r.N();
    double den = checked(r.c2() * (N - 1.0) + r.delta());
    return {-N / den, FormulaId::G_RED_TELESCOPED, r.c2() > 0.01};
}

EnergyEstimate ground_energy_physical(const PhysicalParams& p) {
    require_physical(p);
    double N = p.N;
    double den = checked((p.U - p.V) * (N - 1.0) + 2.0 * p.epsilon);
    double value = p.J * p.J * (N + 1.0) / den + 0.5 * p.U * N * (N - 1.0) + p.epsilon * N;
    return {value, FormulaId::G_PHYS, (p.U - p.V) / p.J > 0.01};
}

EnergyEstimate first_excited_reduced_small_c(const ReducedParams& r) {
    double N = r.N();
    double den = checked(r.c2() * (N - 2.0) + r.delta());
    double value = r.c2() * (N - 1.0) - N / den + r.delta();
    return {value, FormulaId::E1_RED_SMALL, r.c2() < r.delta()};
}

EnergyEstimate first_excited_physical_small_c(const PhysicalParams& p) {
    require_physical(p);
    double N = p.N;
    double UV = p.U - p.V;
    double den = checked(UV * (N - 2.0) + 2.0 * p.epsilon);
    double value = p.epsilon * (N - 2.0) - UV * (N - 1.0) + 0.5 * p.U * N * (N - 1.0) +
                   p.J * p.J * N / den;
    return {value, FormulaId::E1_PHYS_SMALL, UV < 2.0 * p.epsilon};
}

EnergyEstimate first_excited_reduced_large_c(const ReducedParams& r) {
    double N = r.N();
    double den = checked(r.c2() * (N - 1.0) + r.delta());
    return {r.delta() * N - (N + 1.0) / den, FormulaId::E1_RED_LARGE, r.c2() > r.delta()};
}

EnergyEstimate first_excited_physical_large_c(const PhysicalParams& p) {
    require_physical(p);
    double N = p.N;
    double UV = p.U - p.V;
    double den = checked(UV * (N - 1.0) + 2.0 * p.epsilon);
    double value = p.J * p.J * (N + 1.0) / den + 0.5 * p.U * N * (N - 1.0) - p.epsilon * N;
    return {value, FormulaId::E1_PHYS_LARGE, UV > 2.0 * p.epsilon};
}

EnergyEstimate evaluate_formula(FormulaId f, const ReducedParams& r,
                                const std::optional<PhysicalParams>& p) {
    if (is_physical(f) && !p)
        throw Error(ErrorKind::InvalidParams,
                    std::string(to_string(f)) + " needs physical parameters");
    switch (f) {
        case FormulaId::G_RED: return ground_energy_reduced(r);
        case FormulaId::G_PHYS: return ground_energy_physical(*p);
        case FormulaId::E1_RED_SMALL: return first_excited_reduced_small_c(r);
        case FormulaId::E1_PHYS_SMALL: return first_excited_physical_small_c(*p);
        case FormulaId::E1_RED_LARGE: return first_excited_reduced_large_c(r);
        case FormulaId::E1_PHYS_LARGE: return first_excited_physical_large_c(*p);
        case FormulaId::G_RED_TELESCOPED: return ground_energy_reduced_telescoped(r);
    }
    throw Error(ErrorKind::InvalidParams, "unknown formula");
}

double lambda_linear(const ReducedParams& r) {
    double c = r.c(), c2 = r.c2(), D = r.delta(), N = r.N();
    if (!(c2 < D))
        throw Error(ErrorKind::RegimeViolation, "lambda_linear needs c^2 < delta");
    double den = checked((c2 * (N - 2.0) + D) * (c2 * (N - 1.0) + D) * c - c);
    return (D - c2) / den;
}

Regime regime(const ReducedParams& r, std::optional<double> guard) {
    double g = guard ? *guard : 1e-9 * std::max(1.0, r.delta());
    if (r.c2() < r.delta() - g) return Regime::SMALL_C;
    if (r.c2() > r.delta() + g) return Regime::LARGE_C;
    return Regime::BOUNDARY;
}

}  // namespace bhd
