#include "smica/online.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <numeric>
#include <random>

namespace smica {

Vector project(const SmicaState& state, const Vector& x_t) {
    if (x_t.size() != state.W.cols())
        throw InvalidInputError("project: dimension mismatch");
    if (!x_t.allFinite())
        throw InvalidInputError("project: non-finite input");
    return state.W * x_t;
}

NeuralStep neural_dynamics(const SmicaState& state, const Vector& c,
                           const DynamicsConfig& cfg) {
    NeuralStep step;
    step.c = c;
    if (cfg.mode == DynamicsConfig::Mode::ExactSolve) {
        step.y = Eigen::LDLT<Matrix>(state.M).solve(c);
        step.iterations = 1;
    } else {
        const double gamma = cfg.gamma.value_or(0.5 / state.M.trace());
        step.y = Vector::Zero(c.size());
        Vector r = c;  // c - M y at y = 0
        int it = 0;
        while (it < cfg.max_iterations && r.norm() > cfg.tolerance) {
            step.y += gamma * r;
            r = c - state.M * step.y;
            ++it;
        }
        step.iterations = it;
    }
    step.residual = (c - state.M * step.y).norm();
    step.converged = step.residual <= cfg.tolerance ||
                     cfg.mode == DynamicsConfig::Mode::ExactSolve;
    step.alpha = step.y.squaredNorm();
    return step;
}

SmicaState synaptic_update(const SmicaState& state, const Vector& x_t,
                           const NeuralStep& step) {
    SmicaState next = state;
    const double alpha = step.alpha;
    Vector modulated = step.y - alpha * step.c.cwiseQuotient(state.lambda_sq);
    next.W += 2.0 * state.eta * modulated * x_t.transpose();
    const Index d = step.y.size();
    next.M += (state.eta / state.tau) *
              (step.y * step.y.transpose() - Matrix::Identity(d, d));
    return next;
}

std::pair<SmicaState, NeuralStep> step_online(const SmicaState& state, const Vector& x_t,
                                              const DynamicsConfig& cfg) {
    Vector c = project(state, x_t);
    NeuralStep step = neural_dynamics(state, c, cfg);
    SmicaState next = synaptic_update(state, x_t, step);
    return {std::move(next), std::move(step)};
}

StreamFitResult fit_stream(const SignalMatrix& xs, SmicaState state,
                           const DynamicsConfig& cfg, long epochs, bool shuffle) {
    if (epochs < 1)
        throw ConfigError("fit_stream: epochs must be >= 1");
    if (xs.samples() < 1)
        throw ConfigError("fit_stream: empty stream");
    state.validate();

    const long t_max = xs.samples();
    StreamFitResult result{std::move(state), Matrix(xs.channels(), t_max), 0, 0};

    std::vector<long> order(t_max);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(result.state.rng_seed ^ 0x9e3779b97f4a7c15ull);

    for (long epoch = 0; epoch < epochs; ++epoch) {
        if (shuffle)
            std::shuffle(order.begin(), order.end(), rng);
        for (long k = 0; k < t_max; ++k) {
            auto [next, step] = step_online(result.state, xs.column(order[k]), cfg);
            result.state = std::move(next);
            if (!step.converged)
                ++result.unconverged_steps;
            result.outputs.col(order[k]) = step.y;
            ++result.samples_seen;
        }
        if (result.state.W.norm() > 1e6)
            throw DivergenceError("fit_stream: ||W||_F exceeded 1e6", epoch);
    }
    return result;
}

SignalMatrix infer(const SmicaState& state, const SignalMatrix& xs,
                   const DynamicsConfig& cfg) {
    Matrix y(xs.channels(), xs.samples());
    for (Index t = 0; t < xs.samples(); ++t)
        y.col(t) = neural_dynamics(state, project(state, xs.column(t)), cfg).y;
    return SignalMatrix(std::move(y));
}

}  // namespace smica
