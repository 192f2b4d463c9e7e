#include "smica/offline.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "smica/metrics.hpp"

namespace smica {

Vector default_lambda(Index d) {
    Vector lam(d);
    for (Index i = 0; i < d; ++i)
        lam(i) = 1.0 + 0.5 * static_cast<double>(i);
    return lam;
}

SmicaState SmicaState::init(Index d, Vector lambda, double eta, double tau,
                            std::uint64_t seed) {
    SmicaState s;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    s.W.resize(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            s.W(i, j) = normal(rng);
    s.M = Matrix::Identity(d, d);
    s.lambda_sq = lambda.cwiseAbs2();
    s.eta = eta;
    s.tau = tau;
    s.rng_seed = seed;
    s.validate();
    return s;
}

void SmicaState::validate() const {
    const Index d = W.rows();
    if (W.cols() != d || M.rows() != d || M.cols() != d || lambda_sq.size() != d)
        throw InvalidInputError("SmicaState: inconsistent dimensions");
    if (!W.allFinite() || !M.allFinite() || !lambda_sq.allFinite())
        throw InvalidInputError("SmicaState: non-finite entries");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidInputError("SmicaState: M not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (es.eigenvalues().minCoeff() <= 0)
        throw InvalidInputError("SmicaState: M not positive definite");
    for (Index i = 0; i < d; ++i) {
        if (lambda_sq(i) <= 0)
            throw InvalidInputError("SmicaState: lambda_sq entries must be positive");
        for (Index j = i + 1; j < d; ++j) {
            const double gap = std::abs(lambda_sq(i) - lambda_sq(j));
            if (gap < 1e-6 * std::max(lambda_sq(i), lambda_sq(j)))
                throw InvalidInputError("SmicaState: lambda_sq entries must be distinct");
        }
    }
    if (!(eta > 0 && eta < tau))
        throw InvalidInputError("SmicaState: need 0 < eta < tau");
}

Matrix gamma_inv(const SignalMatrix& x, const SignalMatrix& y) {
    if (x.samples() != y.samples())
        throw InvalidInputError("gamma_inv: sample counts differ");
    const Matrix& xm = x.data();
    Vector norms = y.data().colwise().squaredNorm();  // diag(Y^T Y)
    Matrix g = (xm * norms.asDiagonal() * xm.transpose()) / static_cast<double>(x.samples());
    return (g + g.transpose()) / 2.0;
}

double loss(const SmicaState& state, const SignalMatrix& x, const SignalMatrix& y) {
    if (x.samples() != y.samples() || x.channels() != state.W.cols() ||
        y.channels() != state.W.rows())
        throw InvalidInputError("loss: dimension mismatch");
    const double t = static_cast<double>(x.samples());
    const Matrix& xm = x.data();
    const Matrix& ym = y.data();
    const double data_term =
        (-2.0 * (xm.transpose() * state.W.transpose() * ym).trace() +
         (ym.transpose() * state.M * ym).trace()) / t;
    Matrix g = gamma_inv(x, y);
    Vector inv_lambda_sq = state.lambda_sq.cwiseInverse();
    const double reg_term =
        (state.W * g * state.W.transpose() * inv_lambda_sq.asDiagonal()).trace() -
        state.M.trace();
    return data_term + reg_term;
}

namespace {

Eigen::LDLT<Matrix> checked_ldlt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0 || lmax / lmin > 1e12)
        throw IllConditionedError("optimal_y: M is numerically singular");
    return Eigen::LDLT<Matrix>(m);
}

}  // namespace

SignalMatrix optimal_y(const SmicaState& state, const SignalMatrix& x) {
    if (state.W.cols() != x.channels())
        throw InvalidInputError("optimal_y: dimension mismatch");
    auto ldlt = checked_ldlt(state.M);
    Matrix y = ldlt.solve(state.W * x.data());
    return SignalMatrix(std::move(y));
}

SmicaState offline_step(const SmicaState& state, const SignalMatrix& x) {
    SignalMatrix y = optimal_y(state, x);
    const double t = static_cast<double>(x.samples());
    const Matrix& xm = x.data();
    const Matrix& ym = y.data();

    Vector norms = ym.colwise().squaredNorm();
    Vector inv_lambda_sq = state.lambda_sq.cwiseInverse();

    SmicaState next = state;
    next.W += (2.0 * state.eta / t) *
              (ym * xm.transpose() -
               inv_lambda_sq.asDiagonal() * state.W * xm * norms.asDiagonal() * xm.transpose());
    next.M += (state.eta / state.tau) *
              ((ym * ym.transpose()) / t - Matrix::Identity(ym.rows(), ym.rows()));
    next.M = (next.M + next.M.transpose()) / 2.0;
    return next;
}

OfflineFitReport fit_offline(const SignalMatrix& x, long epochs, SmicaState state,
                             const SignalMatrix* truth) {
    if (epochs < 1)
        throw ConfigError("fit_offline: epochs must be >= 1");
    state.validate();

    OfflineFitReport report;
    const Index d = state.W.rows();
    const double t = static_cast<double>(x.samples());
    for (long epoch = 0; epoch < epochs; ++epoch) {
        state = offline_step(state, x);
        if (state.W.norm() > 1e6)
            throw DivergenceError("fit_offline: ||W||_F exceeded 1e6", epoch);
        SignalMatrix y = optimal_y(state, x);
        report.objective.push_back(loss(state, x, y));
        report.whiteness.push_back(
            ((y.data() * y.data().transpose()) / t - Matrix::Identity(d, d)).norm());
        if (truth != nullptr)
            report.eps_mse.push_back(eps_mse(*truth, y));
        if (epoch + 1 == epochs)
            report.final_y = y.data();
    }
    return report;
}

}  // namespace smica
