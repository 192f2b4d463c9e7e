#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smica/metrics.hpp"
#include "smica/online.hpp"

namespace smica {

enum class BaselineAlgorithm { HeraultJutten, Easi, Infomax, Amari, NonlinearOja };

// y^3, y - tanh(y), or plain y (the linear special case of the Oja rule)
enum class Nonlinearity { Cubic, TanhScaled, Identity };

std::string to_string(BaselineAlgorithm a);
std::string to_string(Nonlinearity g);

struct BaselineConfig {
    BaselineAlgorithm algorithm = BaselineAlgorithm::Easi;
    double eta = 1e-4;
    Nonlinearity nonlinearity = Nonlinearity::Cubic;
    std::uint64_t seed = 0;
    // running kurtosis-sign estimate (trailing 1000 samples) switching the
    // infomax/amari nonlinearity per channel; off by default
    bool extended = false;
};

struct BaselineState {
    Matrix W;  // separating matrix; off-diagonal mixing estimate for HJ
    BaselineAlgorithm algorithm;
};

BaselineState baseline_init(BaselineAlgorithm algorithm, Index d);

std::pair<BaselineState, Vector> nonlinear_oja_step(const BaselineState& state,
                                                    const Vector& x_t,
                                                    const BaselineConfig& cfg);
std::pair<BaselineState, Vector> easi_step(const BaselineState& state, const Vector& x_t,
                                           const BaselineConfig& cfg);
std::pair<BaselineState, Vector> herault_jutten_step(const BaselineState& state,
                                                     const Vector& x_t,
                                                     const BaselineConfig& cfg);
std::pair<BaselineState, Vector> infomax_step(const BaselineState& state, const Vector& x_t,
                                              const BaselineConfig& cfg);
std::pair<BaselineState, Vector> amari_step(const BaselineState& state, const Vector& x_t,
                                            const BaselineConfig& cfg);

/// Common per-sample interface shared by the SM-ICA network and every
/// baseline; the benchmark harness only sees this surface.
class StreamingLearner {
public:
    virtual ~StreamingLearner() = default;
    virtual Index dim() const = 0;
    virtual std::string name() const = 0;
    /// learn from one sample and emit the on-the-fly output
    virtual Vector step(const Vector& x_t) = 0;
    /// frozen-weights output for one sample
    virtual Vector infer(const Vector& x_t) const = 0;
    /// Frobenius norm of the learned weights, for divergence guards
    virtual double weight_norm() const = 0;
};

class SmicaLearner final : public StreamingLearner {
public:
    SmicaLearner(SmicaState state, DynamicsConfig cfg)
        : state_(std::move(state)), cfg_(cfg) {
        state_.validate();
    }
    Index dim() const override { return state_.W.rows(); }
    std::string name() const override { return "smica-online"; }
    Vector step(const Vector& x_t) override;
    Vector infer(const Vector& x_t) const override;
    double weight_norm() const override { return state_.W.norm(); }
    const SmicaState& state() const { return state_; }

private:
    SmicaState state_;
    DynamicsConfig cfg_;
};

class BaselineLearner final : public StreamingLearner {
public:
    BaselineLearner(BaselineConfig cfg, Index d)
        : cfg_(cfg), state_(baseline_init(cfg.algorithm, d)) {}
    Index dim() const override { return state_.W.rows(); }
    std::string name() const override { return to_string(cfg_.algorithm); }
    Vector step(const Vector& x_t) override;
    Vector infer(const Vector& x_t) const override;
    double weight_norm() const override { return state_.W.norm(); }
    const BaselineState& state() const { return state_; }

private:
    std::vector<bool> super_gaussian_estimate() const;

    BaselineConfig cfg_;
    BaselineState state_;
    // trailing window of outputs feeding the extended kurtosis-sign switch
    Matrix window_;
    long window_count_ = 0;
};

struct HarnessReport {
    MseCurve curve;        // empty when no truth supplied
    double final_eps_mse = -1.0;  // frozen-weights pass; -1 without truth
    long samples_seen = 0;
    bool diverged = false;
};

/// Streams xs through any learner for `epochs` in-order passes, records an
/// eps_MSE curve against truth (when given) on the on-the-fly outputs and a
/// final frozen-weights eps_MSE. Divergence (||W|| > 1e6) is reported, not
/// thrown, so benchmark cells can record baseline failures.
HarnessReport run_stream(StreamingLearner& learner, const SignalMatrix& xs, long epochs,
                         const SignalMatrix* truth, long checkpoint_stride,
                         Matrix* outputs = nullptr);

}  // namespace smica
