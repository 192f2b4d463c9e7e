#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "harness.hpp"
#include "smica/io.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace smica;
using namespace smica::cli;

namespace {

// exit codes: 0 ok, 1 usage/config, 2 numerical failure, 3 i/o
int classify(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e))
        return 3;
    if (dynamic_cast<const NumericalError*>(&e))
        return 2;
    if (dynamic_cast<const std::invalid_argument*>(&e))
        return 1;
    return 1;
}

void add_dataset_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--scenario", cfg.scenario, "benchmark scenario id (1-4)");
    cmd->add_option("--sources", cfg.sources,
                    "comma list of channel tags: square, sine, sawtooth, laplace, "
                    "uniform, or file:<path>")
        ->delimiter(',');
    cmd->add_option("--mixing", cfg.mixing, "mixing matrix: random or appendix-b");
    cmd->add_option("--samples", cfg.samples, "samples to generate");
    cmd->add_option("--seed", cfg.seed, "rng seed");
    cmd->add_flag("--prewhiten", cfg.prewhiten, "whiten the stream before training");
}

void add_algo_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--algo", cfg.algo,
                    "fobi, smica-offline, smica-online, herault-jutten, easi, "
                    "infomax, amari, nonlinear-oja");
    cmd->add_option("--eta", cfg.eta, "learning rate");
    cmd->add_option("--tau", cfg.tau, "ratio between feedforward and lateral rates");
    cmd->add_option("--gamma", cfg.gamma, "euler step size for the neural dynamics");
    cmd->add_option("--lambda", cfg.lambda, "symmetry-breaking diagonal (comma list)")
        ->delimiter(',');
    cmd->add_flag("--lambda-is-inverse", cfg.lambda_is_inverse,
                  "interpret --lambda entries as the inverse diagonal");
    cmd->add_option("--epochs", cfg.epochs, "training passes (0 = auto)");
    cmd->add_option("--dynamics", cfg.dynamics, "exact or euler")
        ->check(CLI::IsMember({"exact", "euler"}));
    cmd->add_flag("--extended", cfg.extended,
                  "kurtosis-sign switching for infomax/amari");
    cmd->add_option("--checkpoint-stride", cfg.checkpoint_stride,
                    "samples between eps_MSE checkpoints");
}

Json matrix_json(const Matrix& a) {
    Json rows = Json::array();
    for (Index i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < a.cols(); ++j)
            row.push_back(a(i, j));
        rows.push_back(row);
    }
    return rows;
}

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<std::string> channel_names(Index d, const std::string& prefix) {
    std::vector<std::string> names;
    for (Index i = 0; i < d; ++i)
        names.push_back(prefix + std::to_string(i));
    return names;
}

int cmd_gen(const RunConfig& cfg) {
    DatasetBundle b = generated_bundle(cfg);
    fs::create_directories(cfg.out);
    const fs::path dir(cfg.out);
    write_csv((dir / "sources.csv").string(), b.sources,
              channel_names(b.sources.channels(), "s"));
    write_csv((dir / "mixture.csv").string(), b.mixture,
              channel_names(b.mixture.channels(), "x"));

    Json model;
    model["A"] = matrix_json(b.model.A);
    Json specs = Json::array();
    for (const auto& sp : b.model.source_specs)
        specs.push_back(sp.kind == SourceKind::File ? "file:" + sp.path
                                                    : to_string(sp.kind));
    model["sources"] = specs;
    model["seed"] = b.model.seed;
    model["prewhitened"] = b.prewhitened;
    model["provenance"] = b.provenance;
    write_json(dir / "model.json", model);
    std::cout << "wrote " << (dir / "sources.csv") << ", " << (dir / "mixture.csv")
              << ", " << (dir / "model.json") << '\n';
    return 0;
}

int cmd_run(RunConfig cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunDataset data = assemble_dataset(cfg);
    apply_table_defaults(cfg, data.stream.channels());

    RunOutcome out = execute_run(cfg, data);

    fs::create_directories(cfg.out);
    const fs::path dir(cfg.out);
    if (out.outputs.size() > 0)
        write_csv((dir / "outputs.csv").string(), SignalMatrix(out.outputs),
                  channel_names(out.outputs.rows(), "y"));
    write_curve_csv((dir / "curve.csv").string(), out.curve);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json report = report_json(cfg, data, out, wall);
    write_json(dir / "report.json", report);
    std::cout << report.dump(2) << '\n';
    return out.diverged ? 2 : 0;
}

int cmd_metrics(const std::string& truth_path, const std::string& input_path) {
    SignalMatrix truth = read_csv(truth_path).signal;
    SignalMatrix outputs = read_csv(input_path).signal;
    AlignmentResult a = align(truth, outputs);

    Json j;
    j["eps_mse"] = a.aligned_mse;
    j["alignment"]["permutation"] = a.permutation;
    j["alignment"]["signs"] = a.signs;
    std::vector<double> kt, ko;
    for (Index i = 0; i < truth.channels(); ++i) {
        kt.push_back(kurtosis(truth.data().row(i).transpose()));
        ko.push_back(kurtosis(outputs.data().row(i).transpose()));
    }
    j["kurtosis"]["truth"] = kt;
    j["kurtosis"]["outputs"] = ko;
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct BenchCell {
    std::string algo;
    int scenario = 0;
    std::uint64_t seed = 0;
    double final_eps_mse = std::numeric_limits<double>::infinity();
    bool diverged = false;
    bool errored = false;
    std::string error;
    MseCurve curve;
};

int cmd_bench(RunConfig base, std::vector<std::string> algos, std::vector<int> scenarios,
              int seeds, int jobs) {
    if (algos.empty()) algos = all_algorithms();
    if (scenarios.empty()) scenarios = {1, 2, 3, 4};
    if (seeds < 1)
        throw ConfigError("bench: need at least one seed");

    std::vector<BenchCell> cells;
    for (const auto& algo : algos)
        for (int sc : scenarios)
            for (int k = 0; k < seeds; ++k)
                cells.push_back(BenchCell{algo, sc, base.seed + static_cast<std::uint64_t>(k)});

    fs::create_directories(base.out);
    const fs::path dir(base.out);

    // independent cells; each owns its learner, so plain index-sharding is safe
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            BenchCell& cell = cells[i];
            try {
                RunConfig cfg = base;
                cfg.algo = cell.algo;
                cfg.scenario = cell.scenario;
                cfg.seed = cell.seed;
                RunDataset data = assemble_dataset(cfg);
                apply_table_defaults(cfg, data.stream.channels());
                RunOutcome out = execute_run(cfg, data);
                cell.final_eps_mse = out.final_eps_mse;
                cell.diverged = out.diverged;
                cell.curve = std::move(out.curve);
            } catch (const std::exception& e) {
                cell.errored = true;
                cell.error = e.what();
            }
        }
    };
    const int n_threads = jobs > 0
                              ? jobs
                              : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();

    std::ofstream bench_csv(dir / "bench.csv");
    bench_csv << "algo,scenario,seed,final_eps_mse,separated,diverged,error\n"
              << std::setprecision(12);
    bool any_failed = false;
    for (const auto& cell : cells) {
        const bool separated = !cell.diverged && !cell.errored &&
                               cell.final_eps_mse >= 0 && cell.final_eps_mse <= 0.1;
        bench_csv << cell.algo << ',' << cell.scenario << ',' << cell.seed << ','
                  << cell.final_eps_mse << ',' << (separated ? 1 : 0) << ','
                  << (cell.diverged ? 1 : 0) << ',' << cell.error << '\n';
        // a diverged learner is a recorded outcome, not a harness failure
        if (cell.errored)
            any_failed = true;
        std::ostringstream name;
        name << "curve_" << cell.algo << "_sc" << cell.scenario << "_seed" << cell.seed
             << ".csv";
        write_curve_csv((dir / name.str()).string(), cell.curve);
    }

    // mean +- stddev per (algo, scenario) and one chart per scenario
    std::ofstream summary(dir / "summary.csv");
    summary << "algo,scenario,cells,mean_eps_mse,stddev_eps_mse,failures\n"
            << std::setprecision(12);
    for (int sc : scenarios) {
        std::vector<PlotSeries> series;
        for (const auto& algo : algos) {
            std::vector<const BenchCell*> group;
            for (const auto& cell : cells)
                if (cell.algo == algo && cell.scenario == sc)
                    group.push_back(&cell);

            double mean = 0, var = 0;
            int ok = 0, failures = 0;
            for (const BenchCell* c : group) {
                if (c->diverged || c->errored || !(c->final_eps_mse >= 0)) {
                    ++failures;
                    continue;
                }
                mean += c->final_eps_mse;
                ++ok;
            }
            if (ok > 0) mean /= ok;
            for (const BenchCell* c : group)
                if (!c->diverged && !c->errored && c->final_eps_mse >= 0)
                    var += (c->final_eps_mse - mean) * (c->final_eps_mse - mean);
            const double stddev = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
            summary << algo << ',' << sc << ',' << group.size() << ','
                    << (ok ? mean : std::numeric_limits<double>::infinity()) << ','
                    << stddev << ',' << failures << '\n';

            // aggregate curves checkpoint-by-checkpoint across seeds
            std::map<long, std::pair<double, std::vector<double>>> buckets;
            for (const BenchCell* c : group)
                for (std::size_t k = 0; k < c->curve.times.size(); ++k)
                    buckets[c->curve.times[k]].second.push_back(c->curve.values[k]);
            PlotSeries ps;
            ps.label = algo;
            for (auto& [t, bucket] : buckets) {
                const auto& vals = bucket.second;
                double m = 0;
                for (double v : vals) m += v;
                m /= static_cast<double>(vals.size());
                double s2 = 0;
                for (double v : vals) s2 += (v - m) * (v - m);
                ps.t.push_back(static_cast<double>(t));
                ps.mean.push_back(m);
                ps.stddev.push_back(vals.size() > 1
                                        ? std::sqrt(s2 / static_cast<double>(vals.size() - 1))
                                        : 0.0);
            }
            if (!ps.t.empty())
                series.push_back(std::move(ps));
        }
        if (!series.empty()) {
            std::ostringstream name;
            name << "scenario_" << sc << ".svg";
            write_convergence_svg((dir / name.str()).string(),
                                  "convergence, scenario " + std::to_string(sc), series);
        }
    }

    std::cout << "bench: " << cells.size() << " cells, "
              << (any_failed ? "some failed" : "all ok") << "; results in " << dir << '\n';
    return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"similarity-matching ICA toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> bench_algos;
    std::vector<int> bench_scenarios;
    int bench_seeds = 10;
    int bench_jobs = 0;
    std::string metrics_truth, metrics_input;

    CLI::App* gen = app.add_subcommand("gen", "synthesize a dataset bundle");
    add_dataset_flags(gen, cfg);
    gen->add_option("--out", cfg.out, "output directory");

    CLI::App* run = app.add_subcommand("run", "train one algorithm and report");
    add_dataset_flags(run, cfg);
    add_algo_flags(run, cfg);
    run->add_option("--input", cfg.input, "mixture CSV (instead of --scenario/--sources)");
    run->add_option("--truth", cfg.truth, "ground-truth CSV for scoring");
    run->add_option("--out", cfg.out, "output directory");

    CLI::App* bench = app.add_subcommand("bench", "algorithm x scenario x seed grid");
    bench->add_option("--algos", bench_algos, "algorithms (default: all six)")
        ->delimiter(',');
    bench->add_option("--scenarios", bench_scenarios, "scenario ids (default: 1-4)")
        ->delimiter(',');
    bench->add_option("--seeds", bench_seeds, "seeds per cell");
    bench->add_option("--samples", cfg.samples, "stream length");
    bench->add_option("--epochs", cfg.epochs, "training passes per cell");
    bench->add_option("--seed", cfg.seed, "base seed");
    bench->add_option("--checkpoint-stride", cfg.checkpoint_stride,
                      "samples between eps_MSE checkpoints");
    bench->add_option("--jobs", bench_jobs, "parallel cells (0 = hardware)");
    bench->add_option("--out", cfg.out, "output directory");

    CLI::App* metrics = app.add_subcommand("metrics", "score outputs against truth");
    metrics->add_option("--truth", metrics_truth, "ground-truth CSV")->required();
    metrics->add_option("--input", metrics_input, "outputs CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // collapse CLI11's per-error exit codes onto the documented usage code
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            return cmd_gen(cfg);
        if (run->parsed())
            return cmd_run(cfg);
        if (bench->parsed()) {
            cfg.checkpoint_stride = std::max<long>(cfg.checkpoint_stride, 1);
            return cmd_bench(cfg, bench_algos, bench_scenarios, bench_seeds, bench_jobs);
        }
        if (metrics->parsed())
            return cmd_metrics(metrics_truth, metrics_input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
    return 1;
}
