#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bhdimer/approx.hpp"
#include "bhdimer/model.hpp"

namespace bhd {

enum class SweepAxis { C, C2, N, U, DELTA };

const char* to_string(SweepAxis a);
std::optional<SweepAxis> axis_from_string(const std::string& s);

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    std::optional<double> step;
    std::optional<int> count;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::C;
    SweepRange range;
    ParamSet fixed = PhysicalParams{};
    std::vector<FormulaId> formulas;
    std::string output;
    int workers = 1;
};

struct ErrorRecord {
    double axis_value = 0.0;
    PhysicalParams physical;
    double c = 0.0, delta = 0.0;
    int N = 0;
    FormulaId formula_id = FormulaId::G_RED;
    double approx_value = 0.0;
    double exact_value = 0.0;
    std::optional<double> xi;
    bool in_regime = false;
    std::string status;  // "ok", "missing_xi" or an error kind
};

std::vector<double> grid_values(const SweepSpec& spec);

// Parameters at one grid value. Reduced fixed sets are carried alongside the
// physical set with J = -1, V = 0, U = -c^2, epsilon = -delta/2, which reduces to them.
PhysicalParams point_params(const SweepSpec& spec, double value);

std::vector<ErrorRecord> run_sweep(const SweepSpec& spec);

SweepSpec sweep_spec_from_json(const nlohmann::json& j);

void write_records_csv(std::ostream& os, const std::vector<ErrorRecord>& rows);

struct AlphaFit {
    double alpha = 0.0;
    double residual = 0.0;   // rms deviation of log|xi| from the fitted line
    int used = 0;
    int excluded_sign_change = 0;
    int excluded_missing = 0;
};

// Least squares of log|xi| against log N; alpha is the negated slope. Rows whose xi
// sign differs from the majority are treated as zero-crossing artifacts and dropped.
AlphaFit fit_alpha(const std::vector<std::pair<int, std::optional<double>>>& points);
AlphaFit fit_alpha(const std::vector<ErrorRecord>& records);

}  // namespace bhd
