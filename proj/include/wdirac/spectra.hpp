#pragma once

#include "wdirac/dirac.hpp"
#include "wdirac/fit.hpp"

namespace wdirac {

struct EigenSolution {
  Vector eigenvalues;                // ascending
  std::vector<Vector> eigenvectors;  // one column per eigenvalue
  Vector residuals;                  // ||A x - lambda M x|| / problem scale
};

// Dense symmetric eigensolver: Householder tridiagonalization followed by
// implicit-shift QL with accumulated rotations. Eigenvectors orthonormal.
EigenSolution sym_eig(const SymmetricMatrix& a);

// A x = lambda M x with M SPD, via Cholesky congruence to a standard problem.
// Eigenvectors come back M-orthonormal. Dense only; refuses above dim_cap.
EigenSolution generalized_symmetric_eig(const SymmetricMatrix& a, const SymmetricMatrix& m,
                                        int dim_cap = 4000);

// eigenvalues grouped into multiplicity clusters, gap tolerance relative to
// the spectral radius
struct SpectrumLine {
  double value = 0.0;
  int multiplicity = 0;
};
std::vector<SpectrumLine> cluster_spectrum(const Vector& ascending, double rel_tol = 1e-6);

// Closed-form spectrum of the continuous Hodge-Dirac operator with mass term
// on the flat torus, listed per shell |2 pi k / L| up to the cutoff radius:
// values +-sqrt(r^2 + mass^2), multiplicity 2^{n-1} per integer vector per
// sign, and the 2^n-dimensional kernel at r = 0 (split into +-mass when
// mass > 0).
struct OracleSpectrum {
  std::vector<SpectrumLine> lines;  // ascending by value
  double cutoff = 0.0;
};
OracleSpectrum torus_dirac_oracle(int n, std::array<double, 3> lengths, double mass,
                                  double cutoff);
// radius that captures the `shells` lowest distinct nonzero frequency moduli
double oracle_shell_cutoff(int n, std::array<double, 3> lengths, int shells = 3);

// eigenvalue error against oracle targets across a refinement sequence
struct ConvergenceRow {
  int subdivisions = 0;
  double h = 0.0;
  double value = 0.0;  // discrete cluster value nearest the target
  double error = 0.0;  // max error over the multiplicity cluster
};
struct ConvergenceReport {
  double target = 0.0;
  long long oracle_multiplicity = 0;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double r2 = 0.0;
  bool ambiguous = false;  // cluster ran into a neighboring oracle line
};
std::vector<ConvergenceReport> eigenvalue_convergence(const std::vector<Lattice>& lattices,
                                                      const PerturbationSpec& spec,
                                                      const std::vector<double>& targets);

// smallest generalized singular value of the form restricted to the span of
// `basis` columns: min over u of max over v of |u^T F v| / (|u|_R |v|_C)
double infsup_constant(const SymmetricMatrix& form, const SymmetricMatrix& row_norm,
                       const SymmetricMatrix& col_norm, const Matrix& basis);

}  // namespace wdirac
