#include "smica/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <vector>

namespace smica {

Matrix sample_covariance(const SignalMatrix& x) {
    const Matrix& m = x.data();
    Matrix c = (m * m.transpose()) / static_cast<double>(x.samples());
    // force exact symmetry against accumulation order differences
    return (c + c.transpose()) / 2.0;
}

SymmetricEig sym_eig(const Matrix& c) {
    if (c.rows() != c.cols())
        throw InvalidInputError("sym_eig: matrix not square");
    if (!c.allFinite())
        throw InvalidInputError("sym_eig: non-finite entries");
    const double scale = c.cwiseAbs().maxCoeff();
    const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0 && asym > 1e-9 * scale)
        throw InvalidInputError("sym_eig: matrix asymmetric beyond tolerance");

    Matrix s = (c + c.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
        throw NumericalError("sym_eig: eigensolver failed");

    const Index d = c.rows();
    // Eigen returns ascending order; flip to descending.
    SymmetricEig out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (Index i = 0; i < d; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(d - 1 - i);
        Vector v = es.eigenvectors().col(d - 1 - i);
        Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
        out.eigenvectors.col(i) = v;
    }
    return out;
}

WhiteningTransform inv_sqrt(const Matrix& c, std::optional<double> floor) {
    SymmetricEig eig = sym_eig(c);
    const double lmax = eig.eigenvalues(0);
    const double lmin = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (lmin < -1e-10 * std::max(lmax, 0.0))
        throw InvalidInputError("inv_sqrt: matrix not positive semi-definite");
    const double f = floor.value_or(1e-12 * std::max(lmax, 0.0));
    if (f <= 0)
        throw InvalidInputError("inv_sqrt: floor must be positive");
    if (lmax <= f)
        throw DegenerateCovarianceError("inv_sqrt: covariance is effectively rank-0");

    Vector lam = eig.eigenvalues.cwiseMax(f);
    Vector sqrt_l = lam.cwiseSqrt();
    Vector inv_l = sqrt_l.cwiseInverse();

    WhiteningTransform w;
    const Matrix& q = eig.eigenvectors;
    w.sqrt = q * sqrt_l.asDiagonal() * q.transpose();
    w.inv_sqrt = q * inv_l.asDiagonal() * q.transpose();
    w.sqrt = (w.sqrt + w.sqrt.transpose()) / 2.0;
    w.inv_sqrt = (w.inv_sqrt + w.inv_sqrt.transpose()) / 2.0;
    w.eigenvalue_floor = f;
    return w;
}

SignalMatrix whiten(const SignalMatrix& x, const WhiteningTransform& w) {
    if (w.inv_sqrt.cols() != x.channels())
        throw InvalidInputError("whiten: dimension mismatch");
    return SignalMatrix(w.inv_sqrt * x.data());
}

}  // namespace smica
