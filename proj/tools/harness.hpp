#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "smica/baselines.hpp"
#include "smica/data.hpp"
#include "smica/metrics.hpp"

namespace smica::cli {

using Json = nlohmann::json;

struct RunConfig {
    std::string algo = "smica-online";
    int scenario = 0;  // 0 = none; otherwise 1..4
    std::string input;  // mixture CSV
    std::string truth;  // ground-truth CSV
    std::vector<std::string> sources;  // generator/file tags
    std::string mixing = "random";     // or "appendix-b"
    long samples = 100000;
    long epochs = 0;  // 0 = auto: 60 replays smica stream, 1 pass baselines, 2000 offline
    std::uint64_t seed = 0;
    // negative hyperparameters mean "fill from the built-in defaults"
    double eta = -1.0;
    double tau = -1.0;
    double gamma = -1.0;
    std::vector<double> lambda;
    bool lambda_is_inverse = false;
    std::string dynamics = "exact";  // or "euler"
    bool extended = false;
    bool prewhiten = false;
    long checkpoint_stride = 1000;
    std::string out = ".";
};

/// Dataset handed to a run: the learner's stream plus optional ground truth.
struct RunDataset {
    SignalMatrix stream;
    std::optional<SignalMatrix> truth;
    std::string provenance;
    Json hashes = Json::object();
};

struct RunOutcome {
    Matrix outputs;          // channel x time, final-pass outputs
    MseCurve curve;          // empty without truth
    double final_eps_mse = -1.0;
    bool diverged = false;
    long samples_seen = 0;
    std::optional<AlignmentResult> alignment;
};

/// Fills unset hyperparameters from the per-scenario benchmark table
/// (falling back to the synthetic-experiment row when no scenario is set).
void apply_table_defaults(RunConfig& cfg, Index d);

/// Resolves the lambda vector for dimension d, honoring --lambda-is-inverse.
Vector effective_lambda(const RunConfig& cfg, Index d);

/// Synthesizes a bundle from a scenario id or source tags (gen and run paths).
DatasetBundle generated_bundle(const RunConfig& cfg);

/// Builds the dataset from scenario id, CSV inputs, or source tags.
RunDataset assemble_dataset(const RunConfig& cfg);

/// Loads one channel from a generator tag or a file (wav/pgm/png/csv path).
Vector load_channel(const std::string& tag, long samples, std::uint64_t seed, Index k);

/// Runs the configured algorithm on the dataset.
RunOutcome execute_run(const RunConfig& cfg, const RunDataset& data);

Json config_json(const RunConfig& cfg);
Json report_json(const RunConfig& cfg, const RunDataset& data, const RunOutcome& out,
                 double wall_clock_seconds);

/// All six streaming algorithm tags, benchmark order.
const std::vector<std::string>& all_algorithms();

void write_curve_csv(const std::string& path, const MseCurve& curve);

}  // namespace smica::cli
