#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bhd {

// Coefficients of the two-mode Hamiltonian
//   eps (a+a - b+b) - J (a+b + ab+) + U/2 (a+a+aa + b+b+bb) + V a+a b+b
struct PhysicalParams {
    double epsilon = 0.0;
    double J = -1.0;
    double U = 0.0;
    double V = 0.0;
    int N = 1;
};

// Parameters of a+b + ab+ + delta b+b + c^2 a+a b+b.
// Any finite delta is representable (the shift transform produces delta < 0);
// the root solvers and initializers require delta >= 0.
class ReducedParams {
public:
    ReducedParams(double c, double delta, int N);

    double c() const { return c_; }
    double c2() const { return c_ * c_; }
    double delta() const { return delta_; }
    int N() const { return N_; }

    bool operator==(const ReducedParams&) const = default;

private:
    double c_;
    double delta_;
    int N_;
};

ReducedParams reduce(const PhysicalParams& p);

// Energy of the two-mode Hamiltonian from an eigenvalue E of the reduced one.
double map_energy_to_physical(double E, const PhysicalParams& p);

struct SymmetryImage {
    PhysicalParams params;
    int sign;  // +1: same sorted spectrum, -1: negated and reversed
};

std::vector<SymmetryImage> symmetry_images(const PhysicalParams& p);

void validate(const PhysicalParams& p);

using ParamSet = std::variant<PhysicalParams, ReducedParams>;

// Accepts {"epsilon","J","U","V","N"} or {"c","delta","N"}, never a mix.
ParamSet params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ParamSet& p);

}  // namespace bhd
