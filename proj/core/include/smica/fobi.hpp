#pragma once

#include "smica/linalg.hpp"

namespace smica {

/// Output of the offline FOBI pipeline: whiten, norm-weight, eigendecompose
/// the weighted covariance, project the whitened stream onto its eigenvectors.
struct FobiResult {
    WhiteningTransform whitening;
    Matrix rotation;              // rows = eigenvectors of C_z, descending
    Vector weighted_eigenvalues;  // descending
    SignalMatrix sources;         // rotation * whitened stream
    // set when adjacent weighted eigenvalues tie within 1e-6 * lambda_max;
    // separation of the tied channels is unreliable
    bool degenerate_kurtosis = false;
};

/// Scales each column by its own Euclidean norm: z_t = ||h_t|| * h_t.
SignalMatrix norm_weight(const SignalMatrix& h);

/// Full FOBI separation. Channels come out ordered by descending weighted
/// eigenvalue, i.e. descending source kurtosis.
FobiResult fobi_separate(const SignalMatrix& x);

/// Per-channel residual |weighted_eigenvalue_i - (kurt(s_pi(i)) + d + 2)|
/// for the MSE-optimal channel alignment against the true sources.
Vector weighted_eigenvalue_identity_check(const SignalMatrix& s, const FobiResult& result);

}  // namespace smica
