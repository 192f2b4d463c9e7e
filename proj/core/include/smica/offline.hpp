#pragma once

#include <optional>
#include <vector>

#include "smica/signal.hpp"

namespace smica {

/// Learnable state of the similarity-matching ICA network: feedforward
/// weights W, lateral weights M (symmetric positive definite) and the
/// symmetry-breaking diagonal Lambda^2, plus the two learning rates.
struct SmicaState {
    Matrix W;
    Matrix M;
    Vector lambda_sq;  // strictly positive, pairwise distinct
    double eta = 0.0;  // learning rate for W, 0 < eta < tau
    double tau = 0.0;  // ratio between the W and M learning rates
    std::uint64_t rng_seed = 0;

    /// W drawn i.i.d. standard normal from rng_seed, M = I.
    static SmicaState init(Index d, Vector lambda, double eta, double tau,
                           std::uint64_t seed);

    /// Checks all structural invariants; throws InvalidInputError.
    void validate() const;
};

/// Default symmetry-breaking diagonal: lambda_i = 1 + 0.5 * (i - 1).
Vector default_lambda(Index d);

struct OfflineFitReport {
    std::vector<double> objective;   // loss per epoch
    std::vector<double> whiteness;   // ||(1/T) Y Y^T - I||_F per epoch
    std::vector<double> eps_mse;     // empty when no ground truth given
    Matrix final_y;
};

/// (1/T) sum_t ||y_t||^2 x_t x_t^T, the data-driven regularizer kernel.
Matrix gamma_inv(const SignalMatrix& x, const SignalMatrix& y);

/// Min-max objective value
///   (1/T) Tr(-2 X^T W^T Y + Y^T M Y) + Tr(W Gamma^-1 W^T Lambda^-2 - M)
/// with Gamma^-1 built from the same (x, y).
double loss(const SmicaState& state, const SignalMatrix& x, const SignalMatrix& y);

/// Solves M Y = W X. Throws IllConditionedError when cond(M) > 1e12.
SignalMatrix optimal_y(const SmicaState& state, const SignalMatrix& x);

/// One alternating descent-ascent step on (W, M) at Y = optimal_y.
SmicaState offline_step(const SmicaState& state, const SignalMatrix& x);

/// Repeated offline steps with per-epoch diagnostics. Throws
/// DivergenceError (naming the epoch) when ||W||_F exceeds 1e6.
OfflineFitReport fit_offline(const SignalMatrix& x, long epochs, SmicaState state,
                             const SignalMatrix* truth = nullptr);

}  // namespace smica
