#include "smica/fobi.hpp"

#include <cmath>

#include "smica/metrics.hpp"

namespace smica {

SignalMatrix norm_weight(const SignalMatrix& h) {
    Matrix z = h.data();
    for (Index t = 0; t < z.cols(); ++t)
        z.col(t) *= z.col(t).norm();
    return SignalMatrix(std::move(z));
}

FobiResult fobi_separate(const SignalMatrix& x) {
    if (x.channels() < 2)
        throw InvalidInputError("fobi_separate: need at least 2 channels");
    if (x.samples() < x.channels())
        throw InvalidInputError("fobi_separate: need at least d samples");

    Matrix cx = sample_covariance(x);
    WhiteningTransform wt = inv_sqrt(cx);
    SignalMatrix h = whiten(x, wt);
    SignalMatrix z = norm_weight(h);
    Matrix cz = sample_covariance(z);
    SymmetricEig eig = sym_eig(cz);

    const Index d = x.channels();
    bool degenerate = false;
    const double lmax = eig.eigenvalues(0);
    for (Index i = 0; i + 1 < d; ++i)
        if (std::abs(eig.eigenvalues(i) - eig.eigenvalues(i + 1)) <= 1e-6 * lmax)
            degenerate = true;

    Matrix rotation = eig.eigenvectors.transpose();  // rows = eigenvectors
    SignalMatrix sources(rotation * h.data());
    return FobiResult{std::move(wt), std::move(rotation), std::move(eig.eigenvalues),
                      std::move(sources), degenerate};
}

Vector weighted_eigenvalue_identity_check(const SignalMatrix& s, const FobiResult& result) {
    const Index d = s.channels();
    AlignmentResult a = align(s, result.sources);
    // channel i of the FOBI output pairs with true source j where
    // a.permutation[j] == i
    Vector residuals(d);
    for (Index j = 0; j < d; ++j) {
        const Index i = a.permutation[j];
        // for unit-variance independent sources E[||h||^2 h_i^2] = E[s_i^4] + (d - 1),
        // i.e. excess kurtosis + d + 2
        const double expected = (kurtosis(s.data().row(j).transpose()) - 3.0) +
                                static_cast<double>(d) + 2.0;
        residuals(i) = std::abs(result.weighted_eigenvalues(i) - expected);
    }
    return residuals;
}

}  // namespace smica
