#pragma once

#include <optional>

#include "smica/signal.hpp"

namespace smica {

/// Eigendecomposition of a symmetric matrix, eigenvalues descending,
/// eigenvector signs canonicalized (largest-magnitude entry positive).
struct SymmetricEig {
    Vector eigenvalues;   // descending
    Matrix eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Symmetric square root and inverse square root of a covariance matrix.
struct WhiteningTransform {
    Matrix inv_sqrt;  // C^{-1/2}
    Matrix sqrt;      // C^{1/2}
    double eigenvalue_floor;
};

/// Uncentered sample covariance (1/T) X X^T.
Matrix sample_covariance(const SignalMatrix& x);

/// Symmetrizes the input as (c + c^T)/2 and decomposes it.
/// Throws InvalidInputError when c is asymmetric beyond 1e-9 relative.
SymmetricEig sym_eig(const Matrix& c);

/// Inverse square root of a symmetric PSD matrix. Eigenvalues below the
/// floor are clamped to it; without an explicit floor, 1e-12 * lambda_max
/// is used. Throws DegenerateCovarianceError when lambda_max <= floor.
WhiteningTransform inv_sqrt(const Matrix& c, std::optional<double> floor = std::nullopt);

/// H = C^{-1/2} X.
SignalMatrix whiten(const SignalMatrix& x, const WhiteningTransform& w);

}  // namespace smica
