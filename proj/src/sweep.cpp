#include "bhdimer/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <thread>

#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"

namespace bhd {

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::C: return "c";
        case SweepAxis::C2: return "c2";
        case SweepAxis::N: return "N";
        case SweepAxis::U: return "U";
        case SweepAxis::DELTA: return "delta";
    }
    return "?";
}

std::optional<SweepAxis> axis_from_string(const std::string& s) {
    for (SweepAxis a : {SweepAxis::C, SweepAxis::C2, SweepAxis::N, SweepAxis::U, SweepAxis::DELTA})
        if (s == to_string(a)) return a;
    if (s == "n") return SweepAxis::N;
    return std::nullopt;
}

std::vector<double> grid_values(const SweepSpec& spec) {
    const auto& r = spec.range;
    std::vector<double> out;
    if (r.count) {
        int n = *r.count;
        if (n < 1) throw Error(ErrorKind::InvalidParams, "count must be >= 1");
        for (int i = 0; i < n; ++i)
            out.push_back(n == 1 ? r.start : r.start + (r.stop - r.start) * i / double(n - 1));
    } else if (r.step) {
        double h = *r.step;
        if (!(h > 0.0)) throw Error(ErrorKind::InvalidParams, "step must be positive");
        if (r.stop < r.start) throw Error(ErrorKind::InvalidParams, "empty range");
        long n = static_cast<long>(std::floor((r.stop - r.start) / h + 1e-9)) + 1;
        for (long i = 0; i < n; ++i) out.push_back(r.start + i * h);
    } else {
        throw Error(ErrorKind::InvalidParams, "range needs step or count");
    }
    if (spec.axis == SweepAxis::N)
        for (double& v : out) v = std::round(v);
    return out;
}

PhysicalParams point_params(const SweepSpec& spec, double value) {
    PhysicalParams p;
    if (auto* r = std::get_if<ReducedParams>(&spec.fixed)) {
        double c2 = r->c2(), delta = r->delta();
        int N = r->N();
        switch (spec.axis) {
            case SweepAxis::C: c2 = value * value; break;
            case SweepAxis::C2: c2 = value; break;
            case SweepAxis::N: N = static_cast<int>(value); break;
            case SweepAxis::DELTA: delta = value; break;
            case SweepAxis::U:
                throw Error(ErrorKind::InvalidParams, "axis U needs physical fixed parameters");
        }
        p = {-0.5 * delta, -1.0, -c2, 0.0, N};
    } else {
        p = std::get<PhysicalParams>(spec.fixed);
        switch (spec.axis) {
            case SweepAxis::C: p.U = p.V + value * value * p.J; break;
            case SweepAxis::C2: p.U = p.V + value * p.J; break;
            case SweepAxis::N: p.N = static_cast<int>(value); break;
            case SweepAxis::U: p.U = value; break;
            case SweepAxis::DELTA: p.epsilon = 0.5 * value * p.J; break;
        }
    }
    return p;
}

namespace {

std::vector<ErrorRecord> evaluate_point(const SweepSpec& spec, double value) {
    std::vector<ErrorRecord> rows;
    PhysicalParams p = point_params(spec, value);
    auto base = [&](FormulaId f) {
        ErrorRecord e;
        e.axis_value = value;
        e.physical = p;
        e.N = p.N;
        e.formula_id = f;
        return e;
    };
    std::optional<ReducedParams> r;
    std::optional<std::vector<double>> red_energies, phys_energies;
    std::string point_error;
    try {
        r = reduce(p);
        red_energies = reduced_spectrum(*r).energies;
        phys_energies = physical_spectrum(p).energies;
    } catch (const Error& err) {
        point_error = to_string(err.kind());
    }
    for (FormulaId f : spec.formulas) {
        ErrorRecord e = base(f);
        if (r) {
            e.c = r->c();
            e.delta = r->delta();
        }
        if (!point_error.empty()) {
            e.status = point_error;
            rows.push_back(e);
            continue;
        }
        try {
            EnergyEstimate est = evaluate_formula(f, *r, p);
            e.approx_value = est.value;
            e.in_regime = est.in_validity_regime;
            int s = target_sigma(f);
            e.exact_value = is_physical(f) ? (*phys_energies)[s] : (*red_energies)[s];
            if (std::fabs(e.exact_value) < 1e-12) {
                e.status = "missing_xi";
            } else {
                e.xi = (e.approx_value - e.exact_value) / e.exact_value;
                e.status = "ok";
            }
        } catch (const Error& err) {
            e.status = to_string(err.kind());
        }
        rows.push_back(e);
    }
    return rows;
}

}  // namespace

std::vector<ErrorRecord> run_sweep(const SweepSpec& spec) {
    if (spec.formulas.empty()) throw Error(ErrorKind::InvalidParams, "no formulas requested");
    std::vector<double> grid = grid_values(spec);
    point_params(spec, grid.front());  // surfaces axis/parameter mismatches before any work
    std::vector<std::vector<ErrorRecord>> per_point(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++)
            per_point[i] = evaluate_point(spec, grid[i]);
    };
    int nw = std::max(1, std::min<int>(spec.workers, static_cast<int>(grid.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::vector<ErrorRecord> rows;
    for (auto& v : per_point)
        for (auto& e : v) rows.push_back(std::move(e));
    return rows;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    try {
        SweepSpec s;
        auto axis = axis_from_string(j.at("axis").get<std::string>());
        if (!axis) throw Error(ErrorKind::InvalidParams, "unknown axis");
        s.axis = *axis;
        const auto& rj = j.contains("range") ? j.at("range") : j;
        s.range.start = rj.at("start").get<double>();
        s.range.stop = rj.at("stop").get<double>();
        if (rj.contains("step")) s.range.step = rj.at("step").get<double>();
        if (rj.contains("count")) s.range.count = rj.at("count").get<int>();
        nlohmann::json fixed = j.at("fixed");
        double start = s.range.start;
        bool physical = fixed.contains("J") || fixed.contains("U") || fixed.contains("epsilon");
        auto place = [&](const char* key, double v) {
            if (fixed.contains(key))
                throw Error(ErrorKind::InvalidParams,
                            std::string("swept quantity '") + key + "' must not appear in fixed");
            fixed[key] = v;
        };
        switch (s.axis) {
            case SweepAxis::N: place("N", std::round(start)); fixed["N"] = int(std::round(start)); break;
            case SweepAxis::U: place("U", start); break;
            case SweepAxis::C: physical ? place("U", 0.0) : place("c", start); break;
            case SweepAxis::C2: physical ? place("U", 0.0) : place("c", std::sqrt(start)); break;
            case SweepAxis::DELTA: physical ? place("epsilon", 0.0) : place("delta", start); break;
        }
        s.fixed = params_from_json(fixed);
        for (const auto& f : j.at("formulas")) {
            auto id = formula_from_string(f.get<std::string>());
            if (!id) throw Error(ErrorKind::InvalidParams, "unknown formula " + f.get<std::string>());
            s.formulas.push_back(*id);
        }
        s.output = j.value("output", std::string());
        s.workers = j.value("workers", 1);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidParams, e.what());
    }
}

void write_records_csv(std::ostream& os, const std::vector<ErrorRecord>& rows) {
    os << "index,axis_value,N,c,delta,epsilon,J,U,V,formula,approx,exact,xi,in_regime,status\n";
    char buf[512];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& e = rows[i];
        char xi[40] = "";
        if (e.xi) std::snprintf(xi, sizeof xi, "%.17g", *e.xi);
        std::snprintf(buf, sizeof buf,
                      "%zu,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%s,%d,%s\n", i,
                      e.axis_value, e.N, e.c, e.delta, e.physical.epsilon, e.physical.J, e.physical.U,
                      e.physical.V, to_string(e.formula_id), e.approx_value, e.exact_value, xi,
                      e.in_regime ? 1 : 0, e.status.c_str());
        os << buf;
    }
}

AlphaFit fit_alpha(const std::vector<std::pair<int, std::optional<double>>>& points) {
    AlphaFit fit;
    int pos = 0, neg = 0;
    for (const auto& [n, xi] : points) {
        if (!xi || *xi == 0.0 || !std::isfinite(*xi)) continue;
        (*xi > 0.0 ? pos : neg)++;
    }
    int majority = pos >= neg ? 1 : -1;
    std::vector<double> xs, ys;
    std::map<int, int> distinct;
    for (const auto& [n, xi] : points) {
        if (!xi || *xi == 0.0 || !std::isfinite(*xi) || n < 1) {
            ++fit.excluded_missing;
            continue;
        }
        if ((*xi > 0.0 ? 1 : -1) != majority) {
            ++fit.excluded_sign_change;
            continue;
        }
        xs.push_back(std::log(double(n)));
        ys.push_back(std::log(std::fabs(*xi)));
        distinct[n]++;
    }
    if (distinct.size() < 4)
        throw Error(ErrorKind::InsufficientData, "need at least 4 distinct N values");
    const double m = xs.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / m, my = sy / m, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = ys[i] - (my + slope * (xs[i] - mx));
        ss += d * d;
    }
    fit.alpha = -slope;
    fit.residual = std::sqrt(ss / m);
    fit.used = static_cast<int>(xs.size());
    return fit;
}

AlphaFit fit_alpha(const std::vector<ErrorRecord>& records) {
    std::vector<std::pair<int, std::optional<double>>> pts;
    for (const auto& e : records) pts.emplace_back(e.N, e.xi);
    return fit_alpha(pts);
}

}  // namespace bhd
