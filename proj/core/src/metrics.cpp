#include "smica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smica/errors.hpp"

namespace smica {

double kurtosis(const Vector& channel) {
    const Index t = channel.size();
    if (t < 4)
        throw InvalidInputError("kurtosis: need at least 4 samples");
    const double mean = channel.mean();
    Vector centered = channel.array() - mean;
    const double m2 = centered.squaredNorm() / static_cast<double>(t);
    if (m2 <= 1e-12)
        throw DegenerateChannelError("kurtosis: channel variance is near zero");
    const double m4 = centered.array().pow(4).mean();
    return m4 / (m2 * m2);
}

namespace {

// Pairwise alignment statistics over a prefix of length t:
//   cost(i, j, xi) = ps(i) + py(j) - 2 * xi * g(i, j)
// where ps, py are per-channel energy sums and g the cross products.
struct PairStats {
    Vector ps;  // sum_t s_i^2
    Vector py;  // sum_t y_j^2
    Matrix g;   // sum_t s_i y_j
    long t = 0;
};

AlignmentResult brute_force_align(const PairStats& st) {
    const Index d = st.ps.size();
    std::vector<int> perm(d), best_perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0;
        for (Index i = 0; i < d; ++i)
            total += st.ps(i) + st.py(perm[i]) - 2.0 * std::abs(st.g(i, perm[i]));
        if (total < best) {
            best = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    AlignmentResult out;
    out.permutation = best_perm;
    out.signs.resize(d);
    for (Index i = 0; i < d; ++i)
        out.signs[i] = st.g(i, best_perm[i]) >= 0 ? 1 : -1;
    out.aligned_mse = std::max(best, 0.0) / (static_cast<double>(st.t) * d);
    out.method = AlignmentResult::Method::BruteForce;
    return out;
}

// O(n^3) Hungarian algorithm, minimizing; returns row -> column map.
std::vector<int> hungarian(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

AlignmentResult assignment_align(const PairStats& st) {
    const Index d = st.ps.size();
    Matrix cost(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            cost(i, j) = st.ps(i) + st.py(j) - 2.0 * std::abs(st.g(i, j));

    AlignmentResult out;
    out.permutation = hungarian(cost);
    out.signs.resize(d);
    double total = 0;
    for (Index i = 0; i < d; ++i) {
        out.signs[i] = st.g(i, out.permutation[i]) >= 0 ? 1 : -1;
        total += cost(i, out.permutation[i]);
    }
    out.aligned_mse = std::max(total, 0.0) / (static_cast<double>(st.t) * d);
    out.method = AlignmentResult::Method::Assignment;
    return out;
}

AlignmentResult align_stats(const PairStats& st) {
    return st.ps.size() <= 8 ? brute_force_align(st) : assignment_align(st);
}

PairStats full_stats(const SignalMatrix& truth, const SignalMatrix& outputs) {
    if (truth.channels() != outputs.channels() || truth.samples() != outputs.samples())
        throw InvalidInputError("align: shape mismatch between truth and outputs");
    PairStats st;
    st.ps = truth.data().rowwise().squaredNorm();
    st.py = outputs.data().rowwise().squaredNorm();
    st.g = truth.data() * outputs.data().transpose();
    st.t = truth.samples();
    return st;
}

}  // namespace

AlignmentResult align(const SignalMatrix& truth, const SignalMatrix& outputs) {
    return align_stats(full_stats(truth, outputs));
}

double eps_mse(const SignalMatrix& truth, const SignalMatrix& outputs) {
    return align(truth, outputs).aligned_mse;
}

MseAccumulator::MseAccumulator(Index d)
    : ps_(Vector::Zero(d)), py_(Vector::Zero(d)), g_(Matrix::Zero(d, d)) {}

void MseAccumulator::add(const Vector& truth_t, const Vector& output_t) {
    ps_ += truth_t.cwiseAbs2();
    py_ += output_t.cwiseAbs2();
    g_ += truth_t * output_t.transpose();
    ++t_;
}

double MseAccumulator::current() const {
    if (t_ == 0)
        throw InvalidInputError("MseAccumulator: no samples yet");
    PairStats st{ps_, py_, g_, t_};
    return align_stats(st).aligned_mse;
}

MseCurve mse_curve(const SignalMatrix& truth, const SignalMatrix& outputs, long stride) {
    if (stride < 1)
        throw InvalidInputError("mse_curve: stride must be >= 1");
    if (truth.channels() != outputs.channels() || truth.samples() != outputs.samples())
        throw InvalidInputError("mse_curve: shape mismatch");

    const Index d = truth.channels();
    const long t_max = truth.samples();
    PairStats st;
    st.ps = Vector::Zero(d);
    st.py = Vector::Zero(d);
    st.g = Matrix::Zero(d, d);

    MseCurve curve;
    for (long t = 0; t < t_max; ++t) {
        Vector s = truth.column(t);
        Vector y = outputs.column(t);
        st.ps += s.cwiseAbs2();
        st.py += y.cwiseAbs2();
        st.g += s * y.transpose();
        st.t = t + 1;
        if ((t + 1) % stride == 0 || t + 1 == t_max) {
            AlignmentResult a = align_stats(st);
            curve.times.push_back(t + 1);
            curve.values.push_back(a.aligned_mse);
        }
    }
    return curve;
}

}  // namespace smica
