// End-to-end acceptance suite: one pass/fail line per numbered criterion,
// nonzero exit when any gated criterion fails. Thresholds are pinned; the
// `info:` lines record non-gated observations (alternative diagonal
// readings, the image demonstration).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smica/baselines.hpp"
#include "smica/data.hpp"
#include "smica/fobi.hpp"
#include "smica/metrics.hpp"

using namespace smica;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_gaussian(Index d, long t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(d, t);
    for (Index i = 0; i < d; ++i)
        for (long j = 0; j < t; ++j) m(i, j) = n(rng);
    return m;
}

Matrix random_spd(Index d, std::uint64_t seed) {
    Matrix a = random_gaussian(d, d, seed);
    return a * a.transpose() + Matrix::Identity(d, d);
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    return es.eigenvalues().minCoeff();
}

// exhaustive signed-permutation reference; the optimal sign per (truth,
// output) pair decouples, so only permutations need enumeration
double perm_oracle(const Matrix& s, const Matrix& y) {
    const Index d = s.rows();
    const double t = static_cast<double>(s.cols());
    Matrix cost(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            cost(i, j) = s.row(i).squaredNorm() + y.row(j).squaredNorm() -
                         2.0 * std::abs(s.row(i).dot(y.row(j)));
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
        double e = 0;
        for (Index i = 0; i < d; ++i)
            e += cost(i, perm[static_cast<std::size_t>(i)]);
        best = std::min(best, e);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / (t * static_cast<double>(d));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

DatasetBundle four_source_bundle(long samples, std::uint64_t seed) {
    std::vector<SourceSpec> specs = {{SourceKind::Square, {}},
                                     {SourceKind::Sine, {}},
                                     {SourceKind::Sawtooth, {}},
                                     {SourceKind::Laplace, {}}};
    Matrix a = random_mixing(4, seed);
    return make_bundle(gen_sources(specs, samples, seed), a,
                       MixingModel{a, specs, seed}, "synthetic", true);
}

double stream_eps(StreamingLearner& learner, const DatasetBundle& b, long epochs) {
    HarnessReport r = run_stream(learner, b.stream, epochs, &b.sources, 50000);
    if (r.diverged || r.final_eps_mse < 0) return kInf;
    return r.final_eps_mse;
}

double smica_scenario_eps(const DatasetBundle& b, const Vector& lambda,
                          std::uint64_t seed, long epochs) {
    SmicaLearner learner(SmicaState::init(3, lambda, 2e-5, 0.1, seed),
                         DynamicsConfig{});
    return stream_eps(learner, b, epochs);
}

double baseline_scenario_eps(BaselineAlgorithm algo, double eta,
                             const DatasetBundle& b, std::uint64_t seed,
                             long epochs) {
    BaselineConfig bc;
    bc.algorithm = algo;
    bc.eta = eta;
    bc.seed = seed;
    BaselineLearner learner(bc, 3);
    return stream_eps(learner, b, epochs);
}

// ---- criterion bodies -----------------------------------------------------

Outcome criterion_fobi_separation() {
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<SourceSpec> specs = {{SourceKind::Sine, {}},
                                         {SourceKind::Laplace, {}}};
        SignalMatrix s = gen_sources(specs, 50000, seed);
        SignalMatrix x = mix(s, random_mixing(2, seed + 100));
        FobiResult r = fobi_separate(x);
        worst = std::max(worst, eps_mse(s, r.sources));
    }
    return {worst <= 0.01, "20 seeds, worst eps " + fmt(worst) + " (<= 0.01)"};
}

Outcome criterion_weighted_eigenvalues() {
    double worst = 0;
    for (std::uint64_t seed : {2, 5, 8}) {
        std::vector<SourceSpec> specs = {{SourceKind::Sine, {}},
                                         {SourceKind::Sawtooth, {}},
                                         {SourceKind::Laplace, {}}};
        SignalMatrix s = gen_sources(specs, 50000, seed);
        SignalMatrix x = mix(s, random_mixing(3, seed + 50));
        FobiResult r = fobi_separate(x);
        worst = std::max(worst, weighted_eigenvalue_identity_check(s, r).maxCoeff());
    }
    return {worst <= 0.5,
            "eigenvalue-vs-kurtosis residual, worst " + fmt(worst) + " (<= 0.5)"};
}

Outcome criterion_offline_matches_fobi() {
    std::vector<SourceSpec> specs = {{SourceKind::Sine, {}},
                                     {SourceKind::Laplace, {}}};
    Matrix a = reference_mixing_2x2();
    DatasetBundle b = make_bundle(gen_sources(specs, 20000, 42), a,
                                  MixingModel{a, specs, 42}, "synthetic", true);
    FobiResult oracle = fobi_separate(b.mixture);
    SmicaState s = SmicaState::init(2, default_lambda(2), 5e-3, 0.75, 7);
    OfflineFitReport r = fit_offline(b.stream, 4000, s);
    const double eps = eps_mse(oracle.sources, SignalMatrix(r.final_y));
    return {eps <= 0.02, "offline solver vs fourth-order oracle, eps " + fmt(eps) +
                             " (<= 0.02)"};
}

Outcome criterion_gradient_fidelity() {
    const double h = 1e-6;
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const Index d = 1 + k % 3;
        const long t = 2 + k % 7;
        SignalMatrix x(random_gaussian(d, t, 1000 + static_cast<std::uint64_t>(k)));
        SmicaState s = SmicaState::init(d, default_lambda(d), 1e-3, 0.8,
                                        2000 + static_cast<std::uint64_t>(k));
        s.M = random_spd(d, 3000 + static_cast<std::uint64_t>(k));

        SignalMatrix y = optimal_y(s, x);  // held fixed under the perturbations
        SmicaState next = offline_step(s, x);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                SmicaState plus = s, minus = s;
                plus.W(i, j) += h;
                minus.W(i, j) -= h;
                double grad = (loss(plus, x, y) - loss(minus, x, y)) / (2 * h);
                double predicted = -s.eta * grad;
                double rel = std::abs(next.W(i, j) - s.W(i, j) - predicted) /
                             std::max(std::abs(predicted), 1e-9);
                worst = std::max(worst, rel);

                plus = s, minus = s;
                plus.M(i, j) += h;
                minus.M(i, j) -= h;
                grad = (loss(plus, x, y) - loss(minus, x, y)) / (2 * h);
                predicted = (s.eta / s.tau) * grad;
                rel = std::abs(next.M(i, j) - s.M(i, j) - predicted) /
                      std::max(std::abs(predicted), 1e-9);
                worst = std::max(worst, rel);
            }
    }
    return {worst <= 1e-4, "50 finite-difference instances, worst relative error " +
                               fmt(worst) + " (<= 1e-4)"};
}

Outcome criterion_online_equals_batch() {
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        const Index d = 2 + k % 3;
        const long t = 3 + k % 10;
        SignalMatrix x(random_gaussian(d, t, 4000 + static_cast<std::uint64_t>(k)));
        SmicaState s = SmicaState::init(d, default_lambda(d), 1e-3, 0.7,
                                        5000 + static_cast<std::uint64_t>(k));
        s.M = random_spd(d, 6000 + static_cast<std::uint64_t>(k));

        SmicaState batch = offline_step(s, x);
        Matrix dw_sum = Matrix::Zero(d, d), dm_sum = Matrix::Zero(d, d);
        for (long c = 0; c < t; ++c) {
            auto [next, step] = step_online(s, x.column(c), DynamicsConfig{});
            dw_sum += next.W - s.W;
            dm_sum += next.M - s.M;
        }
        const double dt = static_cast<double>(t);
        worst = std::max(worst, (dw_sum / dt - (batch.W - s.W)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (dm_sum / dt - (batch.M - s.M)).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10, "50 instances, sample-averaged stream update vs batch, "
                            "worst gap " + fmt(worst) + " (<= 1e-10)"};
}

Outcome criterion_online_separation() {
    Vector lam(4);
    lam << 1.0, 1.5, 1.8, 6.07;
    int passed = 0;
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        DatasetBundle b = four_source_bundle(200000, seed);
        SmicaLearner learner(SmicaState::init(4, lam, 2e-5, 1.5, seed),
                             DynamicsConfig{});
        const double eps = stream_eps(learner, b, 60);
        worst = std::max(worst, eps);
        if (eps <= 0.1) ++passed;
    }
    std::ostringstream os;
    os << "4-source stream, " << passed << "/20 seeds eps <= 0.1 (need >= 18), "
       << "worst " << fmt(worst);
    return {passed >= 18, os.str()};
}

Outcome criterion_scenario_table() {
    const long epochs = 60;
    const std::vector<std::uint64_t> seeds = {0, 1, 2};
    Vector lam_sub(3), lam_mixed(3), lam_wide(3), lam_wide_inv(3);
    lam_sub << 1.0, 1.5, 1.8;
    lam_mixed << 1.0, 1.5, 2.0;
    lam_wide << 1.0, 1.5, 6.07;
    lam_wide_inv << 1.0, 1.0 / 1.5, 1.0 / 6.07;

    struct Baseline {
        const char* name;
        BaselineAlgorithm algo;
        double eta;
    };
    const std::vector<Baseline> baselines = {
        {"herault-jutten", BaselineAlgorithm::HeraultJutten, 1e-4},
        {"easi", BaselineAlgorithm::Easi, 1e-4},
        {"infomax", BaselineAlgorithm::Infomax, 5e-4},
        {"amari", BaselineAlgorithm::Amari, 5e-4},
        {"nonlinear-oja", BaselineAlgorithm::NonlinearOja, 1e-3},
    };

    // medians[algo][scenario-1]
    std::vector<std::vector<double>> med(6, std::vector<double>(4, kInf));
    for (int sc = 1; sc <= 4; ++sc) {
        std::vector<std::vector<double>> runs(6);
        for (std::uint64_t seed : seeds) {
            DatasetBundle b = scenario(sc, 200000, seed);
            const Vector& lam = sc <= 2 ? lam_sub : lam_mixed;
            runs[0].push_back(smica_scenario_eps(b, lam, seed, epochs));
            for (std::size_t a = 0; a < baselines.size(); ++a)
                runs[a + 1].push_back(baseline_scenario_eps(
                    baselines[a].algo, baselines[a].eta, b, seed, epochs));
        }
        for (std::size_t a = 0; a < 6; ++a) med[a][sc - 1] = median(runs[a]);
    }

    auto row = [&](std::size_t a, const char* name) {
        std::printf("info: %-16s scenario eps medians: %s %s %s %s\n", name,
                    fmt(med[a][0]).c_str(), fmt(med[a][1]).c_str(),
                    fmt(med[a][2]).c_str(), fmt(med[a][3]).c_str());
    };
    row(0, "smica-online");
    for (std::size_t a = 0; a < baselines.size(); ++a) row(a + 1, baselines[a].name);

    // alternative diagonal readings on the heavy-tailed colored-free scenario
    {
        DatasetBundle b = scenario(3, 200000, 0);
        const double wide = smica_scenario_eps(b, lam_wide, 0, 20);
        const double inv = smica_scenario_eps(b, lam_wide_inv, 0, 20);
        std::printf("info: scenario 3 with diagonal [1,1.5,6.07]: eps %s; "
                    "inverse reading: eps %s (non-gated)\n",
                    fmt(wide).c_str(), fmt(inv).c_str());
    }

    bool pass = true;
    for (int sc = 0; sc < 4; ++sc) pass &= med[0][sc] <= 0.1;       // smica all
    pass &= med[2][0] <= 0.1 && med[2][1] <= 0.1;                   // easi 1-2
    pass &= med[2][2] > 0.1 && med[2][3] > 0.1;                     // easi 3-4
    for (std::size_t a : {std::size_t{1}, std::size_t{3}, std::size_t{4},
                          std::size_t{5}})
        pass &= med[a][1] > 0.1 && med[a][3] > 0.1;  // hj/infomax/amari/oja on 2,4

    return {pass, "per-scenario medians over 3 seeds match the expected "
                  "success/failure pattern (see info rows)"};
}

Outcome criterion_structural_invariants() {
    double worst_white = 0, worst_orth = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        // lateral weights stay positive definite while eta < tau
        SmicaState s = SmicaState::init(3, default_lambda(3),
                                        5e-4 * (1 + k % 5), 0.3 + 0.15 * (k % 4),
                                        300 + k);
        SignalMatrix x(random_gaussian(3, 400, 600 + k));
        for (long t = 0; t < 400; ++t) {
            s = step_online(s, x.column(t), DynamicsConfig{}).first;
            if (t % 80 == 79 && min_eigenvalue(s.M) <= 0.0)
                return {false, "lateral matrix lost positive definiteness"};
        }

        // whitening really whitens
        SignalMatrix colored(random_mixing(3, k + 1) * random_gaussian(3, 2000, 900 + k));
        SignalMatrix h = whiten(colored, inv_sqrt(sample_covariance(colored)));
        worst_white = std::max(
            worst_white,
            (sample_covariance(h) - Matrix::Identity(3, 3)).norm());

        // the fourth-order rotation is orthogonal
        std::vector<SourceSpec> specs = {{SourceKind::Sine, {}},
                                         {SourceKind::Sawtooth, {}},
                                         {SourceKind::Laplace, {}}};
        SignalMatrix src = gen_sources(specs, 2000, 1200 + k);
        FobiResult r = fobi_separate(mix(src, random_mixing(3, 1500 + k)));
        worst_orth = std::max(
            worst_orth,
            (r.rotation * r.rotation.transpose() - Matrix::Identity(3, 3)).norm());

        // the feedforward update switches from Hebbian to anti-Hebbian
        // exactly where the total activity crosses the channel threshold
        SmicaState p = SmicaState::init(3, default_lambda(3), 1e-3, 0.5, 1800 + k);
        Vector xv = random_gaussian(3, 1, 2100 + k);
        Vector yv = random_gaussian(3, 1, 2400 + k);
        const Index i = static_cast<Index>(k % 3);
        for (double side : {0.999, 1.001}) {
            NeuralStep step;
            step.c = yv;
            step.y = yv;
            step.alpha = p.lambda_sq(i) * side;
            Matrix dw = synaptic_update(p, xv, step).W - p.W;
            for (Index j = 0; j < 3; ++j) {
                const double hebbian = yv(i) * xv(j);
                const bool up = side < 1.0;
                if ((dw(i, j) > 0) != ((hebbian > 0) == up))
                    return {false, "plasticity sign did not switch at the "
                                   "activity threshold"};
            }
        }

        // locality: row i of the update ignores every other neuron's state
        NeuralStep a;
        a.c = random_gaussian(3, 1, 2700 + k);
        a.y = random_gaussian(3, 1, 3000 + k);
        a.alpha = a.y.squaredNorm();
        NeuralStep bstep = a;
        bstep.c(2) += 5.0;
        bstep.y(2) -= 3.0;
        Matrix dwa = synaptic_update(p, xv, a).W - p.W;
        Matrix dwb = synaptic_update(p, xv, bstep).W - p.W;
        Matrix dma = synaptic_update(p, xv, a).M - p.M;
        Matrix dmb = synaptic_update(p, xv, bstep).M - p.M;
        if ((dwa.topRows(2) - dwb.topRows(2)).norm() != 0.0 ||
            dma(0, 1) != dmb(0, 1) || dma(0, 0) != dmb(0, 0) ||
            dma(1, 1) != dmb(1, 1))
            return {false, "synaptic update is not local"};
    }
    if (worst_white > 1e-6)
        return {false, "whiteness residual " + fmt(worst_white) + " (> 1e-6)"};
    if (worst_orth > 1e-8)
        return {false, "rotation orthogonality residual " + fmt(worst_orth) +
                           " (> 1e-8)"};
    return {true, "100 seeds: lateral PD, whiteness " + fmt(worst_white) +
                      " (<= 1e-6), rotation orthogonality " + fmt(worst_orth) +
                      " (<= 1e-8), plasticity threshold, locality"};
}

Outcome criterion_metric_oracle() {
    double worst = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        Matrix s = random_gaussian(3, 300, 7000 + k);
        Matrix y = random_gaussian(3, 300, 7100 + k);
        AlignmentResult a = align(SignalMatrix(s), SignalMatrix(y));
        worst = std::max(worst, std::abs(a.aligned_mse - perm_oracle(s, y)));
        // the reported permutation/signs must reproduce the reported error
        Matrix aligned(3, 300);
        for (Index i = 0; i < 3; ++i)
            aligned.row(i) = a.signs[static_cast<std::size_t>(i)] *
                             y.row(a.permutation[static_cast<std::size_t>(i)]);
        const double replay = (s - aligned).squaredNorm() / (300.0 * 3.0);
        worst = std::max(worst, std::abs(a.aligned_mse - replay));
    }
    // the assignment branch (d > 8) against the same exhaustive reference
    for (std::uint64_t k = 0; k < 20; ++k) {
        Matrix s = random_gaussian(9, 120, 7300 + k);
        Matrix y = random_gaussian(9, 120, 7400 + k);
        AlignmentResult a = align(SignalMatrix(s), SignalMatrix(y));
        if (a.method != AlignmentResult::Method::Assignment)
            return {false, "assignment branch was not exercised"};
        worst = std::max(worst, std::abs(a.aligned_mse - perm_oracle(s, y)));
    }
    if (worst > 1e-12)
        return {false, "alignment vs exhaustive reference, worst gap " +
                           fmt(worst) + " (> 1e-12)"};

    // prefix error curve against the quadratic-time reference
    double worst_curve = 0;
    Matrix s = random_gaussian(3, 500, 7600);
    Matrix y = 0.8 * s + 0.3 * random_gaussian(3, 500, 7601);
    MseCurve curve = mse_curve(SignalMatrix(s), SignalMatrix(y), 100);
    if (curve.times.size() != 5) return {false, "curve checkpoint count"};
    for (std::size_t c = 0; c < curve.times.size(); ++c) {
        const long t = curve.times[c];
        const double ref = perm_oracle(s.leftCols(t), y.leftCols(t));
        worst_curve = std::max(worst_curve, std::abs(curve.values[c] - ref) /
                                                std::max(1.0, std::abs(ref)));
    }
    if (worst_curve > 1e-12)
        return {false, "curve vs reference, worst gap " + fmt(worst_curve)};
    return {true, "alignment gap " + fmt(worst) + ", 5-checkpoint curve gap " +
                      fmt(worst_curve) + " (both <= 1e-12)"};
}

Outcome criterion_dynamics_agreement() {
    double worst = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const Index d = 2 + static_cast<Index>(k % 5);
        SmicaState s = SmicaState::init(d, default_lambda(d), 1e-3, 0.5, 8000 + k);
        s.M = random_spd(d, 8200 + k);
        Vector c = s.W * random_gaussian(d, 1, 8400 + k);

        DynamicsConfig exact;
        NeuralStep ye = neural_dynamics(s, c, exact);

        DynamicsConfig euler;
        euler.mode = DynamicsConfig::Mode::EulerIterate;
        euler.max_iterations = 200000;
        NeuralStep yi = neural_dynamics(s, c, euler);
        if (!yi.converged) return {false, "euler iteration failed to settle"};
        worst = std::max(worst, (ye.y - yi.y).norm());
    }
    const double bound = 10.0 * DynamicsConfig{}.tolerance;
    return {worst <= bound, "100 random SPD systems, worst euler-vs-solve gap " +
                                fmt(worst) + " (<= " + fmt(bound) + ")"};
}

// three 256x512 grayscale patterns, mixed and recovered; reported, not gated
void image_demo() {
    const int rows = 256, cols = 512;
    const long t = static_cast<long>(rows) * cols;
    Matrix src(3, t);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x) {
            const long idx = static_cast<long>(y) * cols + x;
            src(0, idx) = ((x / 32) % 2) ? 1.0 : -1.0;
            src(1, idx) = std::sin(2 * M_PI * (x / 50.0 + y / 36.0));
            src(2, idx) = std::fmod(static_cast<double>(x + 2 * y), 77.0) / 77.0;
        }
    std::vector<SourceSpec> specs(3);
    Matrix a = rotation_mixing(3, 5);
    DatasetBundle b = make_bundle(SignalMatrix(src), a, MixingModel{a, specs, 5},
                                  "images", true);

    auto min_corr = [&](const Matrix& out) {
        AlignmentResult al = align(b.sources, SignalMatrix(out));
        double lo = 1.0;
        for (Index i = 0; i < 3; ++i) {
            Vector u = b.sources.data().row(i).transpose();
            Vector v = out.row(al.permutation[static_cast<std::size_t>(i)]).transpose();
            u.array() -= u.mean();
            v.array() -= v.mean();
            lo = std::min(lo, std::abs(u.dot(v)) / (u.norm() * v.norm()));
        }
        return lo;
    };

    FobiResult oracle = fobi_separate(b.mixture);
    SmicaState s = SmicaState::init(3, default_lambda(3), 5e-3, 0.75, 9);
    OfflineFitReport r = fit_offline(b.stream, 2000, s);
    std::printf("info: image demo (3 x 256x512): per-channel |corr| >= %s "
                "(target 0.95; fourth-order oracle %s; non-gated)\n",
                fmt(min_corr(r.final_y)).c_str(),
                fmt(min_corr(oracle.sources.data())).c_str());
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        std::function<Outcome()> body;
    };
    const std::vector<Entry> entries = {
        {"fourth-order separation accuracy", criterion_fobi_separation},
        {"weighted-eigenvalue law", criterion_weighted_eigenvalues},
        {"offline solver matches fourth-order oracle", criterion_offline_matches_fobi},
        {"gradient fidelity", criterion_gradient_fidelity},
        {"stream update averages to the batch update", criterion_online_equals_batch},
        {"streaming separation, 4 sources", criterion_online_separation},
        {"benchmark scenario table", criterion_scenario_table},
        {"structural invariants", criterion_structural_invariants},
        {"metric oracle", criterion_metric_oracle},
        {"euler vs exact dynamics", criterion_dynamics_agreement},
    };

    int failures = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = entries[i].body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("criterion %2zu: %s — %s — %s [%.1f s]\n", i + 1,
                    out.pass ? "PASS" : "FAIL", entries[i].label,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }

    try {
        image_demo();
    } catch (const std::exception& e) {
        std::printf("info: image demo failed: %s\n", e.what());
    }
    return failures == 0 ? 0 : 1;
}
