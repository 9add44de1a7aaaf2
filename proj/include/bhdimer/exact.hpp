#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "bhdimer/model.hpp"

namespace bhd {

// Rows/columns are indexed by the b-mode occupation n = 0..N.
struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;

    int dim() const { return static_cast<int>(diag.size()); }
    double frobenius_norm() const;
    std::vector<double> apply(const std::vector<double>& x) const;
};

struct Spectrum {
    std::vector<double> energies;  // ascending
    // amplitudes[s][n]: unit eigenvector for energies[s], largest-magnitude entry positive
    std::optional<std::vector<std::vector<double>>> amplitudes;
};

TridiagonalMatrix build_tridiagonal(const ReducedParams& r);

// Same basis, two-mode Hamiltonian with its constant offsets.
TridiagonalMatrix build_physical_tridiagonal(const PhysicalParams& p);

// Implicit-shift QL on the symmetric tridiagonal matrix.
Spectrum eigen_spectrum(const TridiagonalMatrix& m, bool want_vectors = false);

Spectrum reduced_spectrum(const ReducedParams& r, bool want_vectors = false);
Spectrum physical_spectrum(const PhysicalParams& p, bool want_vectors = false);

double free_spectrum(const PhysicalParams& p, int sigma);
double zero_tunneling_spectrum(const ReducedParams& r, int n);

// Sum of the diagonal, i.e. the exact trace of the reduced Hamiltonian.
double reduced_trace(const ReducedParams& r);

// Merge neighbours closer than tol * max|E|.
std::vector<double> dedup_energies(const std::vector<double>& sorted, double rel_tol = 1e-12);

// Max deviation between sorted spectra a and b, with b negated and reversed when sign < 0.
double spectrum_mismatch(const std::vector<double>& a, const std::vector<double>& b, int sign);

void write_spectrum_csv(std::ostream& os, const Spectrum& s);

}  // namespace bhd
