#include "bhdimer/model.hpp"

#include <cmath>

#include "bhdimer/errors.hpp"

namespace bhd {

ReducedParams::ReducedParams(double c, double delta, int N) : c_(c), delta_(delta), N_(N) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw Error(ErrorKind::InvalidParams, "c must be positive and finite");
    if (!std::isfinite(delta))
        throw Error(ErrorKind::InvalidParams, "delta must be finite");
    if (N < 1)
        throw Error(ErrorKind::InvalidParams, "N must be >= 1");
}

void validate(const PhysicalParams& p) {
    if (p.N < 1)
        throw Error(ErrorKind::InvalidParams, "N must be >= 1");
    if (!std::isfinite(p.epsilon) || !std::isfinite(p.J) || !std::isfinite(p.U) ||
        !std::isfinite(p.V))
        throw Error(ErrorKind::InvalidParams, "parameters must be finite");
}

ReducedParams reduce(const PhysicalParams& p) {
    validate(p);
    if (p.J == 0.0)
        throw Error(ErrorKind::ZeroTunneling, "J = 0 has no reduced form");
    double c2 = (p.U - p.V) / p.J;
    if (!(c2 > 0.0))
        throw Error(ErrorKind::NonAttractive, "(U - V)/J must be positive");
    return ReducedParams(std::sqrt(c2), 2.0 * p.epsilon / p.J, p.N);
}

double map_energy_to_physical(double E, const PhysicalParams& p) {
    double n = p.N;
    return -p.J * E + 0.5 * p.U * n * (n - 1.0) + p.epsilon * n;
}

std::vector<SymmetryImage> symmetry_images(const PhysicalParams& p) {
    PhysicalParams a = p, b = p, c = p;
    a.epsilon = -p.epsilon;
    b.J = -p.J;
    c.U = -p.U;
    c.V = -p.V;
    return {{a, +1}, {b, +1}, {c, -1}};
}

ParamSet params_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw Error(ErrorKind::InvalidParams, "parameter file must hold a JSON object");
    static const char* phys[] = {"epsilon", "J", "U", "V"};
    static const char* red[] = {"c", "delta"};
    int nphys = 0, nred = 0;
    for (auto k : phys) nphys += j.contains(k);
    for (auto k : red) nred += j.contains(k);
    if (!j.contains("N"))
        throw Error(ErrorKind::InvalidParams, "missing key N");
    if (nphys > 0 && nred > 0)
        throw Error(ErrorKind::InvalidParams, "physical and reduced keys are mutually exclusive");
    try {
        int N = j.at("N").get<int>();
        if (nred == 2 && nphys == 0)
            return ReducedParams(j.at("c").get<double>(), j.at("delta").get<double>(), N);
        if (nphys == 4 && nred == 0) {
            PhysicalParams p{j.at("epsilon").get<double>(), j.at("J").get<double>(),
                             j.at("U").get<double>(), j.at("V").get<double>(), N};
            validate(p);
            return p;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidParams, e.what());
    }
    throw Error(ErrorKind::InvalidParams,
                "expected exactly {epsilon,J,U,V,N} or {c,delta,N}");
}

nlohmann::json params_to_json(const ParamSet& p) {
    if (auto* r = std::get_if<ReducedParams>(&p))
        return {{"c", r->c()}, {"delta", r->delta()}, {"N", r->N()}};
    const auto& q = std::get<PhysicalParams>(p);
    return {{"epsilon", q.epsilon}, {"J", q.J}, {"U", q.U}, {"V", q.V}, {"N", q.N}};
}

}  // namespace bhd
