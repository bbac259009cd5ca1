#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbsent/corpus.hpp"
#include "nbsent/feature_select.hpp"
#include "nbsent/model_store.hpp"
#include "nbsent/nb_core.hpp"

namespace nbsent {

/// Everything a command needs; filled from CLI flags.
struct RunConfig {
    std::filesystem::path data_root;
    std::filesystem::path model_path;
    /// CSV / JSON-lines destination; empty means stdout only.
    std::filesystem::path out_path;

    TrainConfig train;
    SmoothingConfig smoothing;
    DenominatorPolicy denominator_policy = DenominatorPolicy::FixedAtTraining;
    SelectionConfig selection;
    bool selection_enabled = true;

    std::size_t validation_size = 1000;
    /// Retrain on the whole training split after the holdout report.
    bool retrain_full = true;
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

/// Counts, prune, select, build. Reports the sizes seen along the way.
struct TrainOutcome {
    Model model;
    std::size_t features_counted = 0;
    std::size_t features_after_prune = 0;
    std::size_t features_selected = 0;
    double count_seconds = 0.0;
    double select_seconds = 0.0;
};

TrainOutcome train_model(std::span<const LabeledDoc> docs, const RunConfig& cfg);

/// One row of the cumulative ablation.
struct AblationStage {
    std::string name;
    RunConfig config;
};

/// The five cumulative configurations, in order: multinomial unigram baseline,
/// + negation handling with bootstrapping, + Bernoulli counting,
/// + bigrams and trigrams, + singleton pruning and top-k MI selection.
std::vector<AblationStage> ablation_stages(const RunConfig& base);

struct AblationRow {
    std::string stage;
    double accuracy = 0.0;
    std::size_t features = 0;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
};

struct BenchReport {
    std::vector<std::pair<double, double>> train_seconds_by_fraction;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    std::size_t test_docs = 0;
    double docs_per_second = 0.0;
    std::array<std::size_t, 2> scaling_lengths{0, 0};
    std::array<double, 2> scaling_us_per_doc{0.0, 0.0};
    std::uint64_t peak_memory_bytes = 0;
};

int cmd_train(const RunConfig& cfg, std::ostream& out);
EvalReport cmd_evaluate(const RunConfig& cfg, Split split, std::ostream& out);
/// One output line per input line: label TAB log-score-positive TAB log-score-negative.
void cmd_predict(const Model& model, std::istream& in, std::ostream& out);
std::vector<SweepPoint> cmd_sweep(const RunConfig& cfg, std::span<const std::size_t> ks, std::ostream& out);
std::vector<AblationRow> cmd_ablate(const RunConfig& cfg, std::ostream& out);
BenchReport cmd_bench(const RunConfig& cfg, std::ostream& out);

/// "k,accuracy" with a header row.
std::string sweep_csv(std::span<const SweepPoint> points);
std::string ablation_csv(std::span<const AblationRow> rows);
/// gnuplot script plotting a sweep CSV written to `csv_name`.
std::string sweep_gnuplot(const std::string& csv_name);

}  // namespace nbsent
