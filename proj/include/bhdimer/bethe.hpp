#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bhdimer/model.hpp"

namespace bhd {

using cplx = std::complex<double>;

struct SolverOptions {
    double tol = 1e-10;          // on the log-ratio residual, see relative_residual
    int max_iter = 200;
    int max_halvings = 20;
    double max_step = 100.0;     // cap on |du|_inf per Newton step
    double seed_gap = 0.5;       // initial gap excess as a fraction of c
    double boundary_guard = 1e-6;
    bool continuation = true;
    double continuation_floor = 1e-4;  // minimal continuation step, relative to target c
    bool cross_validate = false;
    double energy_check_tol = 1e-8;
};

// Log-magnitude description of a real root set sorted in descending order.
// Keeps the tiny quantities (gap excesses beyond c, distances to 0 and to -delta/c)
// that plain root coordinates cannot resolve.
struct RootChain {
    std::vector<double> log_excess;    // N-1 entries: log(l_k - l_{k+1} - c)
    std::vector<double> log_abs_root;  // log|l_k|
    std::vector<double> log_abs_pole;  // log|l_k + delta/c|
    std::vector<int> root_sign;
    std::vector<int> pole_sign;
};

struct ContinuationStep {
    double c;
    bool converged;
    int iterations;
    double residual_norm;
};

struct BetheState {
    std::vector<cplx> roots;
    int sigma = 0;
    ReducedParams params{1.0, 0.0, 1};
    double residual_norm = 0.0;
    int iterations = 0;
    int continuation_steps = 0;
    std::optional<std::vector<cplx>> pole_offsets;  // roots + delta/c
    std::optional<RootChain> chain;
    std::vector<ContinuationStep> trace;
};

// Cleared form F_n = c l_n (c l_n + delta) prod(l_n - l_j + c) - prod(l_n - l_j - c).
std::vector<cplx> residual(const std::vector<cplx>& roots, const ReducedParams& r);

// jac[n][k] = dF_n / dl_k.
std::vector<std::vector<cplx>> jacobian(const std::vector<cplx>& roots, const ReducedParams& r);

// max_n |log(lhs_n / rhs_n)|, phase reduced to (-pi, pi]; infinite if a factor vanishes.
double relative_residual(const std::vector<cplx>& roots, const ReducedParams& r);

// Log-ratio residual evaluated from the precise chain data, one entry per root.
std::vector<double> chain_residual(const RootChain& ch, const ReducedParams& r);

// True when lhs and rhs of every equation agree in sign for the chain.
bool chain_sign_consistent(const RootChain& ch);

std::vector<double> equidistant_init(const ReducedParams& r);

BetheState solve_ground(const ReducedParams& r, const SolverOptions& opts = {});
BetheState solve_first_excited(const ReducedParams& r, const SolverOptions& opts = {});

BetheState make_state(const std::vector<cplx>& roots, const ReducedParams& r, int sigma);

// Stored chain data is auxiliary; it is used only while it still describes the roots.
bool chain_agrees(const BetheState& s);

double energy_from_roots(const BetheState& s);
double energy_from_roots(const std::vector<cplx>& roots, const ReducedParams& r);

struct DiagnosticsReport {
    bool distinct = true;
    bool conjugate_closed = true;
    bool residual_ok = true;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    bool ground_checked = false;
    bool real_negative = true;
    double head_offset = 0.0;      // largest root + delta/c
    bool head_near_pole = true;
    double min_gap_ratio = 0.0;    // min consecutive gap / c
    bool gap_ok = true;
    std::vector<std::string> notes;

    bool ok() const;  // ignores head_near_pole and gap_ok
};

DiagnosticsReport validate_state(const BetheState& s, double tol = 1e-10);

// Maps a solution for (c, delta) to one for (c, -delta): l -> l + delta/c.
std::pair<std::vector<cplx>, ReducedParams> shift_transform(const BetheState& s);
BetheState shift_state(const BetheState& s);

nlohmann::json state_to_json(const BetheState& s);
BetheState state_from_json(const nlohmann::json& j);

}  // namespace bhd
