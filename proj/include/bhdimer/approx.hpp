#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bhdimer/model.hpp"

namespace bhd {

enum class FormulaId {
    G_RED,
    G_PHYS,
    E1_RED_SMALL,
    E1_PHYS_SMALL,
    E1_RED_LARGE,
    E1_PHYS_LARGE,
    G_RED_TELESCOPED,
};

const char* to_string(FormulaId f);
std::optional<FormulaId> formula_from_string(const std::string& s);
std::vector<FormulaId> all_formulas();
bool is_physical(FormulaId f);
int target_sigma(FormulaId f);  // 0 for ground formulas, 1 for first-excited ones

struct EnergyEstimate {
    double value;
    FormulaId formula_id;
    bool in_validity_regime;
};

enum class Regime { SMALL_C, LARGE_C, BOUNDARY };
const char* to_string(Regime g);

EnergyEstimate ground_energy_reduced(const ReducedParams& r);
EnergyEstimate ground_energy_reduced_telescoped(const ReducedParams& r);
EnergyEstimate ground_energy_physical(const PhysicalParams& p);
EnergyEstimate first_excited_reduced_small_c(const ReducedParams& r);
EnergyEstimate first_excited_physical_small_c(const PhysicalParams& p);
EnergyEstimate first_excited_reduced_large_c(const ReducedParams& r);
EnergyEstimate first_excited_physical_large_c(const PhysicalParams& p);

// Evaluates any formula; physical formulas need the physical parameters.
EnergyEstimate evaluate_formula(FormulaId f, const ReducedParams& r,
                                const std::optional<PhysicalParams>& p = std::nullopt);

// Linearized positive root of the first excited state, valid for c^2 < delta.
double lambda_linear(const ReducedParams& r);

Regime regime(const ReducedParams& r, std::optional<double> guard = std::nullopt);

}  // namespace bhd
