#include "smica/baselines.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

namespace smica {

std::string to_string(BaselineAlgorithm a) {
    switch (a) {
        case BaselineAlgorithm::HeraultJutten: return "herault-jutten";
        case BaselineAlgorithm::Easi: return "easi";
        case BaselineAlgorithm::Infomax: return "infomax";
        case BaselineAlgorithm::Amari: return "amari";
        case BaselineAlgorithm::NonlinearOja: return "nonlinear-oja";
    }
    return "?";
}

std::string to_string(Nonlinearity g) {
    switch (g) {
        case Nonlinearity::Cubic: return "cubic";
        case Nonlinearity::TanhScaled: return "tanh-scaled";
        case Nonlinearity::Identity: return "identity";
    }
    return "?";
}

namespace {

Vector apply_g(const Vector& y, Nonlinearity g) {
    switch (g) {
        case Nonlinearity::Cubic: return y.array().cube();
        case Nonlinearity::TanhScaled: return y.array() - y.array().tanh();
        case Nonlinearity::Identity: return y;
    }
    return y;
}

void guard(const Matrix& w) {
    if (!w.allFinite() || w.norm() > 1e6)
        throw DivergenceError("baseline: weights diverged", 0);
}

}  // namespace

BaselineState baseline_init(BaselineAlgorithm algorithm, Index d) {
    BaselineState s;
    s.algorithm = algorithm;
    // HJ learns the off-diagonal mixing estimate, starting from zero;
    // the others start from the identity separating matrix.
    if (algorithm == BaselineAlgorithm::HeraultJutten)
        s.W = Matrix::Zero(d, d);
    else
        s.W = Matrix::Identity(d, d);
    return s;
}

std::pair<BaselineState, Vector> nonlinear_oja_step(const BaselineState& state,
                                                    const Vector& x_t,
                                                    const BaselineConfig& cfg) {
    Vector y = state.W * x_t;
    Vector gy = apply_g(y, cfg.nonlinearity);
    BaselineState next = state;
    next.W += cfg.eta * (gy * x_t.transpose() - gy * gy.transpose() * state.W);
    guard(next.W);
    return {std::move(next), std::move(y)};
}

std::pair<BaselineState, Vector> easi_step(const BaselineState& state, const Vector& x_t,
                                           const BaselineConfig& cfg) {
    Vector y = state.W * x_t;
    Vector gy = apply_g(y, cfg.nonlinearity);
    const Index d = y.size();
    Matrix relative = (y * y.transpose() - Matrix::Identity(d, d)) +
                      gy * y.transpose() - y * gy.transpose();
    BaselineState next = state;
    next.W -= cfg.eta * relative * state.W;
    guard(next.W);
    return {std::move(next), std::move(y)};
}

std::pair<BaselineState, Vector> herault_jutten_step(const BaselineState& state,
                                                     const Vector& x_t,
                                                     const BaselineConfig& cfg) {
    const Index d = x_t.size();
    Matrix mix = Matrix::Identity(d, d) + state.W;
    Eigen::PartialPivLU<Matrix> lu(mix);
    if (std::abs(lu.determinant()) < 1e-12)
        throw IllConditionedError("herault_jutten_step: I + C is singular");
    Vector y = lu.solve(x_t);
    BaselineState next = state;
    // off-diagonal only: dC_ij = eta * y_i^3 * y_j
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (i != j)
                next.W(i, j) += cfg.eta * y(i) * y(i) * y(i) * y(j);
    guard(next.W);
    return {std::move(next), std::move(y)};
}

std::pair<BaselineState, Vector> infomax_step(const BaselineState& state, const Vector& x_t,
                                              const BaselineConfig& cfg) {
    Vector y = state.W * x_t;
    // 1 - 2*sigmoid(y)
    Vector u = (1.0 - 2.0 / (1.0 + (-y.array()).exp())).matrix();
    BaselineState next = state;
    next.W += cfg.eta * (state.W.inverse().transpose() + u * x_t.transpose());
    guard(next.W);
    return {std::move(next), std::move(y)};
}

std::pair<BaselineState, Vector> amari_step(const BaselineState& state, const Vector& x_t,
                                            const BaselineConfig& cfg) {
    Vector y = state.W * x_t;
    // the plain rule keeps the canonical super-Gaussian score; the extended
    // variant switches per channel on the running kurtosis-sign estimate
    Vector phi = y.array().tanh();
    const Index d = y.size();
    BaselineState next = state;
    next.W += cfg.eta * (Matrix::Identity(d, d) - phi * y.transpose()) * state.W;
    guard(next.W);
    return {std::move(next), std::move(y)};
}

// ---- learners -------------------------------------------------------------

Vector SmicaLearner::step(const Vector& x_t) {
    auto [next, neural] = step_online(state_, x_t, cfg_);
    if (!next.W.allFinite() || !next.M.allFinite() || next.W.norm() > 1e6)
        throw DivergenceError("smica: weights diverged", 0);
    state_ = std::move(next);
    return neural.y;
}

Vector SmicaLearner::infer(const Vector& x_t) const {
    return neural_dynamics(state_, project(state_, x_t), cfg_).y;
}

namespace {

constexpr long kKurtosisWindow = 1000;

// extended infomax: sub-Gaussian channels swap the logistic score for the
// cubic anti-Hebbian one
std::pair<BaselineState, Vector> infomax_step_ext(const BaselineState& state,
                                                  const Vector& x_t,
                                                  const BaselineConfig& cfg,
                                                  const std::vector<bool>& super) {
    Vector y = state.W * x_t;
    Vector u(y.size());
    for (Index i = 0; i < y.size(); ++i)
        u(i) = super[i] ? 1.0 - 2.0 / (1.0 + std::exp(-y(i))) : -y(i) * y(i) * y(i);
    BaselineState next = state;
    next.W += cfg.eta * (state.W.inverse().transpose() + u * x_t.transpose());
    guard(next.W);
    return {std::move(next), std::move(y)};
}

std::pair<BaselineState, Vector> amari_step_ext(const BaselineState& state,
                                                const Vector& x_t,
                                                const BaselineConfig& cfg,
                                                const std::vector<bool>& super) {
    Vector y = state.W * x_t;
    Vector phi(y.size());
    for (Index i = 0; i < y.size(); ++i)
        phi(i) = super[i] ? std::tanh(y(i)) : y(i) * y(i) * y(i);
    const Index d = y.size();
    BaselineState next = state;
    next.W += cfg.eta * (Matrix::Identity(d, d) - phi * y.transpose()) * state.W;
    guard(next.W);
    return {std::move(next), std::move(y)};
}

}  // namespace

std::vector<bool> BaselineLearner::super_gaussian_estimate() const {
    const Index d = state_.W.rows();
    std::vector<bool> super(d, true);  // default matches the plain rules' bias
    const long n = std::min(window_count_, kKurtosisWindow);
    if (n < 100)
        return super;
    for (Index i = 0; i < d; ++i) {
        Eigen::ArrayXd row = window_.row(i).head(n).transpose().array();
        row -= row.mean();
        const double m2 = row.square().mean();
        if (m2 <= 1e-12) continue;
        const double m4 = row.pow(4).mean();
        super[i] = m4 / (m2 * m2) > 3.0;
    }
    return super;
}

Vector BaselineLearner::step(const Vector& x_t) {
    const bool extended = cfg_.extended && (cfg_.algorithm == BaselineAlgorithm::Infomax ||
                                            cfg_.algorithm == BaselineAlgorithm::Amari);
    std::pair<BaselineState, Vector> r = [&] {
        if (extended) {
            std::vector<bool> super = super_gaussian_estimate();
            return cfg_.algorithm == BaselineAlgorithm::Infomax
                       ? infomax_step_ext(state_, x_t, cfg_, super)
                       : amari_step_ext(state_, x_t, cfg_, super);
        }
        switch (cfg_.algorithm) {
            case BaselineAlgorithm::HeraultJutten: return herault_jutten_step(state_, x_t, cfg_);
            case BaselineAlgorithm::Easi: return easi_step(state_, x_t, cfg_);
            case BaselineAlgorithm::Infomax: return infomax_step(state_, x_t, cfg_);
            case BaselineAlgorithm::Amari: return amari_step(state_, x_t, cfg_);
            case BaselineAlgorithm::NonlinearOja: return nonlinear_oja_step(state_, x_t, cfg_);
        }
        throw ConfigError("BaselineLearner: unknown algorithm");
    }();
    state_ = std::move(r.first);
    if (extended) {
        if (window_.rows() == 0)
            window_ = Matrix::Zero(state_.W.rows(), kKurtosisWindow);
        window_.col(window_count_ % kKurtosisWindow) = r.second;
        ++window_count_;
    }
    return std::move(r.second);
}

Vector BaselineLearner::infer(const Vector& x_t) const {
    if (cfg_.algorithm == BaselineAlgorithm::HeraultJutten) {
        const Index d = x_t.size();
        return (Matrix::Identity(d, d) + state_.W).partialPivLu().solve(x_t);
    }
    return state_.W * x_t;
}

HarnessReport run_stream(StreamingLearner& learner, const SignalMatrix& xs, long epochs,
                         const SignalMatrix* truth, long checkpoint_stride,
                         Matrix* outputs) {
    if (epochs < 1)
        throw ConfigError("run_stream: epochs must be >= 1");
    const long t_max = xs.samples();
    const Index d = learner.dim();

    HarnessReport report;
    MseAccumulator acc(d);
    if (outputs != nullptr)
        outputs->resize(d, t_max);

    for (long epoch = 0; epoch < epochs && !report.diverged; ++epoch) {
        for (long t = 0; t < t_max; ++t) {
            Vector y;
            try {
                y = learner.step(xs.column(t));
            } catch (const DivergenceError&) {
                report.diverged = true;
                break;
            }
            ++report.samples_seen;
            if (outputs != nullptr && epoch + 1 == epochs)
                outputs->col(t) = y;
            if (truth != nullptr) {
                acc.add(truth->column(t), y);
                if (acc.count() % checkpoint_stride == 0 ||
                    (epoch + 1 == epochs && t + 1 == t_max)) {
                    report.curve.times.push_back(acc.count());
                    report.curve.values.push_back(acc.current());
                }
            }
        }
        if (!(learner.weight_norm() <= 1e6))  // also catches NaN
            report.diverged = true;
    }

    if (truth != nullptr && !report.diverged) {
        MseAccumulator frozen(d);
        for (long t = 0; t < t_max; ++t)
            frozen.add(truth->column(t), learner.infer(xs.column(t)));
        report.final_eps_mse = frozen.current();
    } else if (truth != nullptr) {
        report.final_eps_mse = report.curve.values.empty()
                                   ? std::numeric_limits<double>::infinity()
                                   : report.curve.values.back();
    }
    return report;
}

}  // namespace smica
