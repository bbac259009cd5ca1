// nbsent: train, evaluate and inspect Naive Bayes sentiment models.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nbsent/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Flags {
    std::string data;
    std::string model;
    std::string out;
    std::size_t k = 32000;
    std::uint32_t min_df = 2;
    int nmax = 3;
    bool no_ngrams = false;
    bool no_negation = false;
    bool no_bootstrap = false;
    bool bootstrap_ngrams = false;
    bool multinomial = false;
    bool no_selection = false;
    bool no_retrain = false;
    std::vector<std::string> negators;
    double smoothing_k = 1.0;
    std::string denominator_policy = "fixed_at_training";
    std::size_t validation_size = 1000;
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--data", f.data, "aclImdb root (contains train/ and test/)");
    cmd->add_option("--model", f.model, "NBSENT model file");
    cmd->add_option("--out", f.out, "output file (CSV, JSON lines)");
    cmd->add_option("--seed", f.seed, "seed for validation split and subsampling");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
}

void add_training(CLI::App* cmd, Flags& f) {
    cmd->add_option("--k", f.k, "number of features kept by MI selection")->check(CLI::PositiveNumber);
    cmd->add_option("--min-df", f.min_df, "drop features seen in fewer documents")->check(CLI::PositiveNumber);
    cmd->add_option("--nmax", f.nmax, "longest n-gram")->check(CLI::Range(1, 3));
    cmd->add_flag("--no-ngrams", f.no_ngrams, "unigrams only (same as --nmax 1)");
    cmd->add_flag("--no-negation", f.no_negation, "disable negation handling and bootstrapping");
    cmd->add_flag("--no-bootstrap", f.no_bootstrap, "do not credit negated forms to the opposite class");
    cmd->add_flag("--bootstrap-ngrams", f.bootstrap_ngrams, "also bootstrap bigrams and trigrams");
    cmd->add_flag("--multinomial", f.multinomial, "count term frequencies instead of presence");
    cmd->add_flag("--no-selection", f.no_selection, "keep every feature (no pruning, no MI selection)");
    cmd->add_option("--negators", f.negators, "negation words")->delimiter(',');
    cmd->add_option("--smoothing-k", f.smoothing_k, "add-k smoothing constant")->check(CLI::PositiveNumber);
    cmd->add_option("--denominator-policy", f.denominator_policy, "fixed_at_training | recomputed_over_selected")
        ->check(CLI::IsMember({"fixed_at_training", "recomputed_over_selected"}));
    cmd->add_option("--validation-size", f.validation_size, "held-out documents (class balanced)");
}

nbsent::RunConfig to_run_config(const Flags& f) {
    nbsent::RunConfig c;
    c.data_root = f.data;
    c.model_path = f.model;
    c.out_path = f.out;
    c.train.pipeline.n_max = f.no_ngrams ? 1 : f.nmax;
    if (!f.negators.empty()) c.train.pipeline.negator_words = f.negators;
    if (f.no_negation) c.train.pipeline.negator_words.clear();
    c.train.bootstrap = !(f.no_bootstrap || f.no_negation);
    c.train.bootstrap_ngrams = f.bootstrap_ngrams;
    c.train.mode = f.multinomial ? nbsent::CountMode::Multinomial : nbsent::CountMode::Bernoulli;
    c.smoothing.k = f.smoothing_k;
    c.denominator_policy = nbsent::parse_denominator_policy(f.denominator_policy);
    c.selection.top_k = f.k;
    c.selection.min_doc_freq = f.min_df;
    c.selection_enabled = !f.no_selection;
    c.validation_size = f.validation_size;
    c.retrain_full = !f.no_retrain;
    c.seed = f.seed;
    c.threads = f.threads;
    if (c.selection_enabled && c.train.mode == nbsent::CountMode::Multinomial) {
        throw std::invalid_argument("feature selection needs bernoulli counts; add --no-selection");
    }
    return c;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw std::invalid_argument(std::string(flag) + " is required");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Naive Bayes sentiment classifier with negation handling, n-grams and MI feature selection"};
    app.require_subcommand(1);
    Flags f;

    auto* train = app.add_subcommand("train", "train a model and save it");
    add_common(train, f);
    add_training(train, f);
    train->add_flag("--no-retrain", f.no_retrain, "keep the holdout-trained model instead of retraining on all");

    std::string split = "test";
    auto* evaluate = app.add_subcommand("evaluate", "score a saved model on a dataset split");
    add_common(evaluate, f);
    evaluate->add_option("--split", split, "train | test")->check(CLI::IsMember({"train", "test"}));

    std::string text;
    auto* predict = app.add_subcommand("predict", "classify --text or each stdin line");
    add_common(predict, f);
    predict->add_option("--text", text, "single input; otherwise lines are read from stdin");

    std::vector<std::size_t> ks;
    auto* sweep = app.add_subcommand("sweep", "validation accuracy against the number of selected features");
    add_common(sweep, f);
    add_training(sweep, f);
    sweep->add_option("--ks", ks, "comma separated k values")->delimiter(',');

    auto* ablate = app.add_subcommand("ablate", "run the five cumulative feature stages on the test split");
    add_common(ablate, f);
    add_training(ablate, f);

    auto* bench = app.add_subcommand("bench", "training/classification timing and memory");
    add_common(bench, f);
    add_training(bench, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        const auto cfg = to_run_config(f);
        if (train->parsed()) {
            require(f.data, "--data");
            return nbsent::cmd_train(cfg, std::cout);
        }
        if (evaluate->parsed()) {
            require(f.data, "--data");
            nbsent::cmd_evaluate(cfg, nbsent::parse_split(split), std::cout);
        } else if (predict->parsed()) {
            require(f.model, "--model");
            const auto model = nbsent::load(cfg.model_path);
            if (!text.empty()) {
                std::istringstream in(text);
                nbsent::cmd_predict(model, in, std::cout);
            } else {
                nbsent::cmd_predict(model, std::cin, std::cout);
            }
        } else if (sweep->parsed()) {
            require(f.data, "--data");
            if (ks.empty()) ks = nbsent::kDefaultSweepGrid;
            nbsent::cmd_sweep(cfg, ks, std::cout);
        } else if (ablate->parsed()) {
            require(f.data, "--data");
            nbsent::cmd_ablate(cfg, std::cout);
        } else if (bench->parsed()) {
            require(f.data, "--data");
            nbsent::cmd_bench(cfg, std::cout);
        }
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const nbsent::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
