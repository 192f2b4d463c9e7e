#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "smica/offline.hpp"

namespace smica {

/// Outcome of one sample's recurrent settling.
struct NeuralStep {
    Vector c;            // dendritic projection W x_t
    Vector y;            // converged somatic output
    double alpha = 0.0;  // ||y||^2, the total-activity modulator
    int iterations = 0;
    double residual = 0.0;  // ||c - M y||_2
    bool converged = true;
};

struct DynamicsConfig {
    enum class Mode { ExactSolve, EulerIterate };
    Mode mode = Mode::ExactSolve;
    // Euler step size; when unset, 0.5 / trace(M) is used per sample.
    std::optional<double> gamma;
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// c_t = W x_t.
Vector project(const SmicaState& state, const Vector& x_t);

/// Settles the recurrent dynamics y <- y + gamma (c - M y) to its fixed
/// point y = M^{-1} c, either by direct solve or by Euler iteration from
/// y = 0. Euler non-convergence is flagged, not thrown.
NeuralStep neural_dynamics(const SmicaState& state, const Vector& c,
                           const DynamicsConfig& cfg);

/// Elementwise local updates:
///   dW_ij = 2 eta (y_i x_j - ||y||^2 (c_i / lambda_i^2) x_j)
///   dM_ij = (eta/tau) (y_i y_j - delta_ij)
SmicaState synaptic_update(const SmicaState& state, const Vector& x_t,
                           const NeuralStep& step);

/// project -> neural_dynamics -> synaptic_update; emits y_t computed with
/// the pre-update weights.
std::pair<SmicaState, NeuralStep> step_online(const SmicaState& state, const Vector& x_t,
                                              const DynamicsConfig& cfg);

struct StreamFitResult {
    SmicaState state;
    Matrix outputs;           // on-the-fly y_t of the final epoch
    long samples_seen = 0;
    int unconverged_steps = 0;
};

/// Streams the columns of xs through step_online for the given number of
/// epochs (in-order replay; optional per-epoch shuffle). The learner holds
/// only W and M between samples.
StreamFitResult fit_stream(const SignalMatrix& xs, SmicaState state,
                           const DynamicsConfig& cfg, long epochs,
                           bool shuffle = false);

/// Inference-only pass with frozen weights.
SignalMatrix infer(const SmicaState& state, const SignalMatrix& xs,
                   const DynamicsConfig& cfg);

}  // namespace smica
