#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bhdimer/approx.hpp"
#include "bhdimer/bethe.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"
#include "bhdimer/fock.hpp"
#include "bhdimer/model.hpp"
#include "bhdimer/sweep.hpp"

using namespace bhd;
using nlohmann::json;

namespace {

struct Common {
    std::optional<double> c, delta, epsilon, J, U, V;
    std::optional<int> n;
    std::string params_file;
    double tol = 1e-10;
    int max_iter = 200;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* app, Common& o, const std::string& default_format) {
    o.format = default_format;
    app->add_option("--c", o.c, "interaction c = sqrt((U-V)/J)");
    app->add_option("--delta", o.delta, "detuning 2 epsilon / J");
    app->add_option("--n", o.n, "particle number N");
    app->add_option("--epsilon", o.epsilon, "bias");
    app->add_option("--j", o.J, "tunneling");
    app->add_option("--u", o.U, "on-site interaction");
    app->add_option("--v", o.V, "inter-site interaction");
    app->add_option("--params", o.params_file, "JSON parameter file");
    app->add_option("--tol", o.tol, "solver tolerance");
    app->add_option("--max-iter", o.max_iter, "solver iteration cap");
    app->add_option("--out", o.out, "output path (default stdout)");
    app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

ParamSet gather_params(const Common& o) {
    bool red = o.c || o.delta;
    bool phys = o.epsilon || o.J || o.U || o.V;
    if (!o.params_file.empty()) {
        if (red || phys || o.n)
            throw Error(ErrorKind::InvalidParams, "--params excludes parameter flags");
        std::ifstream in(o.params_file);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + o.params_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidParams, e.what());
        }
        return params_from_json(j);
    }
    if (red && phys) throw Error(ErrorKind::InvalidParams, "reduced and physical flags are mutually exclusive");
    if (!o.n) throw Error(ErrorKind::InvalidParams, "--n is required");
    if (red) {
        if (!o.c || !o.delta) throw Error(ErrorKind::InvalidParams, "--c and --delta are both required");
        return ReducedParams(*o.c, *o.delta, *o.n);
    }
    if (!o.epsilon || !o.J || !o.U || !o.V)
        throw Error(ErrorKind::InvalidParams, "--epsilon, --j, --u and --v are all required");
    PhysicalParams p{*o.epsilon, *o.J, *o.U, *o.V, *o.n};
    validate(p);
    return p;
}

ReducedParams as_reduced(const ParamSet& ps) {
    if (auto* r = std::get_if<ReducedParams>(&ps)) return *r;
    return reduce(std::get<PhysicalParams>(ps));
}

std::optional<PhysicalParams> as_physical(const ParamSet& ps) {
    if (auto* p = std::get_if<PhysicalParams>(&ps)) return *p;
    return std::nullopt;
}

SolverOptions solver_options(const Common& o) {
    SolverOptions s;
    s.tol = o.tol;
    s.max_iter = o.max_iter;
    return s;
}

void emit(const Common& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + o.out);
    f << text;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::NoConvergence:
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::StructureViolation:
        case ErrorKind::ZeroRoot:
        case ErrorKind::NonRealEnergy:
        case ErrorKind::NumericalOverflow:
        case ErrorKind::ZeroNorm:
            return 3;
        case ErrorKind::RegimeBoundary:
        case ErrorKind::RegimeViolation:
        case ErrorKind::SizeGuard:
            return 4;
        default:
            return 2;
    }
}

int cmd_spectrum(const Common& o) {
    ParamSet ps = gather_params(o);
    ReducedParams r = as_reduced(ps);
    auto phys = as_physical(ps);
    Spectrum s = reduced_spectrum(r);
    double sum = 0.0;
    for (double e : s.energies) sum += e;
    std::ostringstream os;
    if (o.format == "json") {
        json j = {{"params", params_to_json(ps)}, {"energies", s.energies}};
        if (phys) {
            std::vector<double> mapped;
            for (double e : s.energies) mapped.push_back(map_energy_to_physical(e, *phys));
            j["physical_energies"] = mapped;
        }
        j["trace"] = sum;
        j["expected_trace"] = reduced_trace(r);
        os << j.dump(2) << "\n";
    } else {
        os << (phys ? "sigma,energy,physical_energy\n" : "sigma,energy\n");
        // with J < 0 the mapping preserves order; otherwise physical rows follow reduced order
        for (std::size_t i = 0; i < s.energies.size(); ++i) {
            os << i << "," << fmt(s.energies[i]);
            if (phys) os << "," << fmt(map_energy_to_physical(s.energies[i], *phys));
            os << "\n";
        }
        os << "# trace " << fmt(sum) << " expected " << fmt(reduced_trace(r)) << "\n";
    }
    emit(o, os.str());
    return 0;
}

json report_json(const DiagnosticsReport& rep) {
    json j = {{"ok", rep.ok()},
              {"distinct", rep.distinct},
              {"conjugate_closed", rep.conjugate_closed},
              {"residual_ok", rep.residual_ok},
              {"residual_norm", rep.residual_norm},
              {"tolerance", rep.tolerance},
              {"notes", rep.notes}};
    if (rep.ground_checked) {
        j["ground"] = {{"real_negative", rep.real_negative},
                       {"head_offset", rep.head_offset},
                       {"head_near_pole", rep.head_near_pole},
                       {"min_gap_ratio", rep.min_gap_ratio},
                       {"gap_ok", rep.gap_ok}};
    }
    return j;
}

int cmd_bethe(const Common& o, int sigma) {
    ParamSet ps = gather_params(o);
    ReducedParams r = as_reduced(ps);
    if (sigma != 0 && sigma != 1) throw Error(ErrorKind::InvalidParams, "--sigma must be 0 or 1");
    SolverOptions so = solver_options(o);
    BetheState s;
    try {
        s = sigma == 0 ? solve_ground(r, so) : solve_first_excited(r, so);
    } catch (const Error& e) {
        json j = {{"error", to_string(e.kind())}, {"message", e.what()}};
        emit(o, j.dump(2) + "\n");
        throw;
    }
    double E = energy_from_roots(s);
    double Ex = reduced_spectrum(r).energies.at(sigma);
    json j = state_to_json(s);
    j["energy"] = E;
    j["exact_energy"] = Ex;
    j["relative_deviation"] = Ex != 0.0 ? (E - Ex) / Ex : E - Ex;
    if (auto p = as_physical(ps)) j["physical_energy"] = map_energy_to_physical(E, *p);
    j["diagnostics"] = report_json(validate_state(s, so.tol));
    json tr = json::array();
    for (const auto& st : s.trace)
        tr.push_back({{"c", st.c}, {"converged", st.converged}, {"iterations", st.iterations},
                      {"residual_norm", st.residual_norm}});
    j["continuation_trace"] = tr;
    emit(o, j.dump(2) + "\n");
    return 0;
}

int cmd_approx(const Common& o) {
    ParamSet ps = gather_params(o);
    ReducedParams r = as_reduced(ps);
    auto phys = as_physical(ps);
    Spectrum red = reduced_spectrum(r);
    std::optional<Spectrum> ph;
    if (phys) ph = physical_spectrum(*phys);
    std::ostringstream os;
    json arr = json::array();
    if (o.format == "csv") os << "formula,value,in_regime,exact,xi\n";
    for (FormulaId f : all_formulas()) {
        if (is_physical(f) && !phys) continue;
        EnergyEstimate e = evaluate_formula(f, r, phys);
        int sg = target_sigma(f);
        double ex = is_physical(f) ? ph->energies[sg] : red.energies[sg];
        std::optional<double> xi;
        if (std::fabs(ex) >= 1e-12) xi = (e.value - ex) / ex;
        if (o.format == "csv") {
            os << to_string(f) << "," << fmt(e.value) << "," << (e.in_validity_regime ? 1 : 0) << ","
               << fmt(ex) << "," << (xi ? fmt(*xi) : "") << "\n";
        } else {
            arr.push_back({{"formula", to_string(f)}, {"value", e.value},
                           {"in_regime", e.in_validity_regime}, {"exact", ex},
                           {"xi", xi ? json(*xi) : json(nullptr)}});
        }
    }
    if (o.format == "json") {
        json j = {{"params", params_to_json(ps)}, {"regime", to_string(regime(r))}, {"estimates", arr}};
        if (r.c2() < r.delta()) j["lambda_linear"] = lambda_linear(r);
        os << j.dump(2) << "\n";
    }
    emit(o, os.str());
    return 0;
}

struct SweepFlags {
    std::string spec_file, axis, formulas = "G_RED";
    std::optional<double> start, stop, step;
    std::optional<int> count;
    int workers = 1;
};

SweepSpec build_sweep(const Common& o, const SweepFlags& f) {
    if (!f.spec_file.empty()) {
        std::ifstream in(f.spec_file);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + f.spec_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidParams, e.what());
        }
        SweepSpec s = sweep_spec_from_json(j);
        if (f.workers > 1) s.workers = f.workers;
        return s;
    }
    auto axis = axis_from_string(f.axis);
    if (!axis) throw Error(ErrorKind::InvalidParams, "--axis must be one of c, c2, N, U, delta");
    if (!f.start || !f.stop || (!f.step && !f.count))
        throw Error(ErrorKind::InvalidParams, "--start, --stop and --step or --count are required");
    Common fixed = o;
    // the swept quantity is filled with a placeholder; point_params overrides it
    bool physical = o.epsilon || o.J || o.U || o.V;
    auto occupied = [](const auto& opt, const char* name) {
        if (opt) throw Error(ErrorKind::InvalidParams, std::string("swept axis also given as --") + name);
    };
    switch (*axis) {
        case SweepAxis::N: occupied(o.n, "n"); fixed.n = static_cast<int>(std::lround(*f.start)); break;
        case SweepAxis::U: occupied(o.U, "u"); fixed.U = *f.start; break;
        case SweepAxis::C:
        case SweepAxis::C2:
            if (physical) { occupied(o.U, "u"); fixed.U = 0.0; }
            else { occupied(o.c, "c"); fixed.c = 1.0; }
            break;
        case SweepAxis::DELTA:
            if (physical) { occupied(o.epsilon, "epsilon"); fixed.epsilon = 0.0; }
            else { occupied(o.delta, "delta"); fixed.delta = 0.0; }
            break;
    }
    SweepSpec s;
    s.axis = *axis;
    s.range = {*f.start, *f.stop, f.step, f.count};
    s.fixed = gather_params(fixed);
    std::stringstream ss(f.formulas);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto id = formula_from_string(item);
        if (!id) throw Error(ErrorKind::InvalidParams, "unknown formula " + item);
        s.formulas.push_back(*id);
    }
    s.workers = f.workers;
    return s;
}

int cmd_sweep(const Common& o, const SweepFlags& f) {
    SweepSpec s = build_sweep(o, f);
    auto rows = run_sweep(s);
    std::ostringstream os;
    write_records_csv(os, rows);
    Common out = o;
    if (out.out.empty()) out.out = s.output;
    emit(out, os.str());
    return 0;
}

// Reads the sweep CSV layout written by write_records_csv.
std::map<std::string, std::vector<std::pair<int, std::optional<double>>>> read_sweep_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream hs(line);
        std::string h;
        while (std::getline(hs, h, ',')) header.push_back(h);
    }
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error(ErrorKind::InvalidParams, "column " + name + " missing in " + path);
    };
    std::size_t cN = col("N"), cF = col("formula"), cX = col("xi");
    std::map<std::string, std::vector<std::pair<int, std::optional<double>>>> out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string x;
        while (std::getline(ls, x, ',')) f.push_back(x);
        while (f.size() < header.size()) f.emplace_back();
        std::optional<double> xi;
        if (!f[cX].empty()) xi = std::stod(f[cX]);
        out[f[cF]].emplace_back(std::stoi(f[cN]), xi);
    }
    return out;
}

int cmd_fit_alpha(const Common& o, const std::string& in_path, const SweepFlags& f) {
    std::map<std::string, std::vector<std::pair<int, std::optional<double>>>> groups;
    if (!in_path.empty()) {
        groups = read_sweep_csv(in_path);
    } else {
        SweepSpec s = build_sweep(o, f);
        if (s.axis != SweepAxis::N) throw Error(ErrorKind::InvalidParams, "fit-alpha sweeps over N");
        for (const auto& e : run_sweep(s)) groups[to_string(e.formula_id)].emplace_back(e.N, e.xi);
    }
    std::ostringstream os;
    json arr = json::array();
    if (o.format == "csv") os << "formula,alpha,fit_residual,used,excluded_sign_change,excluded_missing\n";
    for (const auto& [name, pts] : groups) {
        AlphaFit fit = fit_alpha(pts);
        if (o.format == "csv")
            os << name << "," << fmt(fit.alpha) << "," << fmt(fit.residual) << "," << fit.used << ","
               << fit.excluded_sign_change << "," << fit.excluded_missing << "\n";
        else
            arr.push_back({{"formula", name}, {"alpha", fit.alpha}, {"fit_residual", fit.residual},
                           {"used", fit.used}, {"excluded_sign_change", fit.excluded_sign_change},
                           {"excluded_missing", fit.excluded_missing}});
    }
    if (o.format == "json") os << arr.dump(2) << "\n";
    emit(o, os.str());
    return 0;
}

std::optional<ObservableKind> observable_from_string(const std::string& s) {
    for (ObservableKind k : {ObservableKind::NumberA, ObservableKind::NumberB, ObservableKind::ABdag,
                             ObservableKind::AdagB, ObservableKind::NaNb, ObservableKind::Total,
                             ObservableKind::Hamiltonian})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

int cmd_fock_expect(const Common& o, const std::string& obs_name, int sigma) {
    ParamSet ps = gather_params(o);
    ReducedParams r = as_reduced(ps);
    auto kind = observable_from_string(obs_name);
    if (!kind) throw Error(ErrorKind::InvalidParams, "unknown observable " + obs_name);
    Observable obs{*kind, {}};
    FockOptions fo;
    if (r.N() > fo.max_n) throw Error(ErrorKind::SizeGuard, "N exceeds the expansion bound");
    SolverOptions so = solver_options(o);
    double exact = exact_expectation(r, sigma, obs);
    BetheState s = sigma == 0 ? solve_ground(r, so) : solve_first_excited(r, so);
    double solved = expectation(s, obs, fo);
    json j = {{"params", params_to_json(ps)}, {"observable", obs_name}, {"sigma", sigma},
              {"exact_diagonalization", exact}, {"bethe_roots", solved}};
    if (sigma == 0) {
        auto [approx, unused] = expectation_with_approx_roots(r, obs, so, fo);
        (void)unused;
        j["equidistant_roots"] = approx;
    } else {
        j["equidistant_roots"] = nullptr;
    }
    emit(o, j.dump(2) + "\n");
    return 0;
}

int cmd_validate(const Common& o, const std::string& state_path) {
    std::ifstream in(state_path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + state_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidParams, e.what());
    }
    BetheState s = state_from_json(j);
    DiagnosticsReport rep = validate_state(s, o.tol);
    json out = report_json(rep);
    try {
        out["energy"] = energy_from_roots(s);
    } catch (const Error& e) {
        out["energy_error"] = to_string(e.kind());
    }
    emit(o, out.dump(2) + "\n");
    return rep.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-site Bose-Hubbard toolkit: exact spectra, Bethe roots, closed-form estimates"};
    app.require_subcommand(1);

    Common o_spec, o_bethe, o_approx, o_sweep, o_fit, o_fock, o_val;
    auto* spectrum = app.add_subcommand("spectrum", "exact spectrum by tridiagonal diagonalization");
    add_common(spectrum, o_spec, "csv");

    auto* bethe = app.add_subcommand("bethe", "solve the Bethe equations for sigma = 0 or 1");
    add_common(bethe, o_bethe, "json");
    int sigma = 0;
    bethe->add_option("--sigma", sigma, "0 ground, 1 first excited");

    auto* approx = app.add_subcommand("approx", "closed-form energy estimates");
    add_common(approx, o_approx, "csv");

    SweepFlags sf;
    auto add_sweep_flags = [&](CLI::App* a) {
        a->add_option("--spec", sf.spec_file, "sweep specification JSON");
        a->add_option("--axis", sf.axis, "c, c2, N, U or delta");
        a->add_option("--start", sf.start);
        a->add_option("--stop", sf.stop);
        a->add_option("--step", sf.step);
        a->add_option("--count", sf.count);
        a->add_option("--formulas", sf.formulas, "comma-separated formula ids");
        a->add_option("--workers", sf.workers, "parallel grid workers");
    };
    auto* sweep = app.add_subcommand("sweep", "relative errors of formulas over a parameter grid");
    add_common(sweep, o_sweep, "csv");
    add_sweep_flags(sweep);

    std::string fit_in;
    auto* fit = app.add_subcommand("fit-alpha", "power-law exponents of relative errors in N");
    add_common(fit, o_fit, "csv");
    add_sweep_flags(fit);
    fit->add_option("--in", fit_in, "sweep CSV to fit instead of running a sweep");

    std::string obs = "abdag";
    int fsigma = 0;
    auto* fock = app.add_subcommand("fock-expect", "expectation values from Bethe vectors");
    add_common(fock, o_fock, "json");
    fock->add_option("--observable", obs, "na, nb, abdag, adagb, nanb, total, hamiltonian");
    fock->add_option("--sigma", fsigma, "0 ground, 1 first excited");

    std::string state_path;
    auto* val = app.add_subcommand("validate", "check a BetheState JSON file");
    add_common(val, o_val, "json");
    val->add_option("--state", state_path, "BetheState JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*spectrum) return cmd_spectrum(o_spec);
        if (*bethe) return cmd_bethe(o_bethe, sigma);
        if (*approx) return cmd_approx(o_approx);
        if (*sweep) return cmd_sweep(o_sweep, sf);
        if (*fit) return cmd_fit_alpha(o_fit, fit_in, sf);
        if (*fock) return cmd_fock_expect(o_fock, obs, fsigma);
        if (*val) return cmd_validate(o_val, state_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
