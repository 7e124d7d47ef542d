#ifndef FRKIT_HERMITIAN_HPP
#define FRKIT_HERMITIAN_HPP

#include <vector>

#include "frkit/matrix.hpp"

namespace frkit {

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    FMatrix vectors;             // columns are the corresponding eigenvectors
};

/// Cyclic Jacobi eigensolver for complex hermitian matrices. Intended for
/// the small dimensions used here (internal states, vectorized blocks).
EigenDecomposition hermitian_eig(FMatrix a);

double min_eigenvalue_hermitian(const FMatrix& a);

/// Spectral norm via the hermitian eigenproblem of A^dag A.
double two_norm(const FMatrix& a);

/// Non-negative definite square root with eigenvalue clamp at 0 for values
/// in [-clamp_tol, 0). More negative spectrum throws.
FMatrix psd_sqrt(const FMatrix& a, double clamp_tol = 1e-12);

double frobenius_norm(const FMatrix& a);

}  // namespace frkit

#endif
