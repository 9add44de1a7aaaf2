#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bhdimer/bethe.hpp"

namespace bhd {

enum class Side { KET, BRA };

// Coefficients over |k>_a |N-k>_b, index k = occupation of mode a, for both sides.
struct FockVector {
    Side side;
    std::vector<double> coeffs;
    ReducedParams params;
};

struct SymmetricFunctions {
    std::vector<double> e;       // e[0] = 1
    double imag_residue = 0.0;   // max |Im e_m| / max(1, |e_m|) before truncation
};

struct FockOptions {
    int max_n = 30;
};

SymmetricFunctions elem_sym(const std::vector<cplx>& roots);

// Integer coefficients of (alpha n_a + a+)^M |0> = sum_k D(M,k) alpha^(M-k) (a+)^k |0>.
boost::multiprecision::cpp_int stirling_D(int M, int k);

FockVector ket_expansion(const BetheState& s, const FockOptions& opts = {});
FockVector bra_expansion(const BetheState& s, const FockOptions& opts = {});

// sum_k bra[k] * ket[k]
double pairing(const FockVector& bra, const FockVector& ket);

enum class ObservableKind { NumberA, NumberB, ABdag, AdagB, NaNb, Total, Hamiltonian, Custom };

struct Observable {
    ObservableKind kind = ObservableKind::Total;
    std::vector<std::vector<double>> matrix;  // only for Custom, (N+1)x(N+1) in the a-occupation basis
};

const char* to_string(ObservableKind k);

// Dense operator in the a-occupation basis.
std::vector<std::vector<double>> observable_matrix(const Observable& obs, const ReducedParams& r);

double expectation(const BetheState& s, const Observable& obs, const FockOptions& opts = {});

// (value with equidistant roots, value with solved roots) for the ground state.
std::pair<double, double> expectation_with_approx_roots(const ReducedParams& r, const Observable& obs,
                                                        const SolverOptions& sopts = {},
                                                        const FockOptions& fopts = {});

// <v|A|v> for the exact eigenvector sigma.
double exact_expectation(const ReducedParams& r, int sigma, const Observable& obs);

void write_fock_csv(std::ostream& os, const FockVector& v);

}  // namespace bhd
