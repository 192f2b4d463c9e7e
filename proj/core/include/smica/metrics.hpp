#pragma once

#include <vector>

#include "smica/signal.hpp"

namespace smica {

/// Sign/permutation alignment minimizing the mean squared error between
/// true sources and recovered channels.
struct AlignmentResult {
    enum class Method { BruteForce, Assignment };

    // aligned output channel i is signs[i] * outputs.row(permutation[i])
    std::vector<int> permutation;
    std::vector<int> signs;  // each +1 or -1
    double aligned_mse = 0.0;
    Method method = Method::BruteForce;
};

struct MseCurve {
    std::vector<long> times;     // prefix lengths t
    std::vector<double> values;  // eps_MSE(t), alignment re-optimized per t
};

/// Sample kurtosis with 1/T moment normalization (population formula).
/// Throws DegenerateChannelError when the channel variance is below 1e-12.
double kurtosis(const Vector& channel);

/// Exhaustive search over signs and permutations for d <= 8; optimal
/// bipartite assignment above that.
AlignmentResult align(const SignalMatrix& truth, const SignalMatrix& outputs);

/// Prefix mean squared error eps_MSE(t) at every stride-th sample (and at
/// the final sample), with the sign/permutation minimum re-taken per prefix.
MseCurve mse_curve(const SignalMatrix& truth, const SignalMatrix& outputs, long stride);

/// Final eps_MSE over the whole stream (alignment included).
double eps_mse(const SignalMatrix& truth, const SignalMatrix& outputs);

/// Incremental prefix eps_MSE for streaming runs; holds only the d x d
/// cross-product sums, so memory is independent of the stream length.
class MseAccumulator {
public:
    explicit MseAccumulator(Index d);
    void add(const Vector& truth_t, const Vector& output_t);
    long count() const { return t_; }
    /// eps_MSE of the samples seen so far, alignment re-optimized.
    double current() const;

private:
    Vector ps_, py_;
    Matrix g_;
    long t_ = 0;
};

}  // namespace smica
