#pragma once

#include <string>
#include <vector>

#include "smica/signal.hpp"

namespace smica {

enum class SourceKind { Square, Sine, Sawtooth, Laplace, Uniform, File };

struct SourceSpec {
    SourceKind kind = SourceKind::Sine;
    std::string path;  // File sources only
};

SourceSpec parse_source_spec(const std::string& tag);
std::string to_string(SourceKind kind);

/// Ground-truth mixing matrix plus per-channel generator tags.
struct MixingModel {
    Matrix A;
    std::vector<SourceSpec> source_specs;
    std::uint64_t seed = 0;
};

struct DatasetBundle {
    SignalMatrix sources;  // centered, unit variance per channel
    SignalMatrix mixture;  // A * sources
    SignalMatrix stream;   // what the learner sees (whitened for scenarios 1/3)
    MixingModel model;
    std::string provenance;
    bool prewhitened = false;
};

/// Generates, per-channel shuffles (seeded), centers and unit-variance
/// scales the requested sources. File specs are rejected here; the CLI
/// loads those separately.
SignalMatrix gen_sources(const std::vector<SourceSpec>& specs, long samples,
                         std::uint64_t seed, bool shuffle = true);

/// Mixture X = A S. Throws ConfigError for near-singular A.
SignalMatrix mix(const SignalMatrix& sources, const Matrix& a);

/// Entries i.i.d. uniform [0,1), redrawn until the condition number is at
/// most condition_cap. Throws ConfigError after 1000 rejections.
Matrix random_mixing(Index d, std::uint64_t seed, double condition_cap = 100.0);

/// Rotation-diag-rotation mixing with singular values spaced evenly in
/// [1, spread]: unbiased in orientation, mildly but surely colored.
Matrix rotation_mixing(Index d, std::uint64_t seed, double spread = 2.5);

/// The Appendix-style 2x2 mixing matrix used by the 2-source examples.
Matrix reference_mixing_2x2();

/// Benchmark scenarios: 1/2 three sub-Gaussian sources (square, sine,
/// sawtooth); 3/4 swap the sawtooth for Laplace noise; 1/3 feed the learner
/// the whitened mixture, 2/4 the colored one.
DatasetBundle scenario(int id, long samples, std::uint64_t seed);

/// Centers a channel and scales it to unit (population) variance.
Vector normalize_channel(const Vector& channel);

/// Bundle assembly from explicit sources: centers/normalizes, mixes,
/// records provenance.
DatasetBundle make_bundle(const SignalMatrix& sources, const Matrix& a,
                          MixingModel model, const std::string& provenance,
                          bool prewhiten = false);

}  // namespace smica
