#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nbsent/commands.hpp"

using namespace nbsent;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(NBSENT_FIXTURES) / "mini_imdb";

struct Workdir {
    fs::path path = fs::temp_directory_path() / ("nbsent_cmd_" + std::to_string(::getpid()));
    Workdir() { fs::create_directories(path); }
    ~Workdir() { fs::remove_all(path); }
};

RunConfig fixture_config() {
    RunConfig cfg;
    cfg.data_root = kFixture;
    cfg.validation_size = 2;
    cfg.threads = 2;
    return cfg;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("train, evaluate and predict on the fixture corpus") {
    Workdir wd;
    auto cfg = fixture_config();
    cfg.model_path = wd.path / "model.nbsent";
    std::ostringstream log;
    CHECK(cmd_train(cfg, log) == 0);
    CHECK(log.str().find("holdout: trained on 6") != std::string::npos);
    CHECK(log.str().find("features counted:") != std::string::npos);
    const Model model = load(cfg.model_path);
    CHECK(model.docs(ClassLabel::Positive) == 4);
    CHECK(model.docs(ClassLabel::Negative) == 4);

    cfg.out_path = wd.path / "eval.jsonl";
    std::ostringstream eval_out;
    const auto report = cmd_evaluate(cfg, Split::Test, eval_out);
    CHECK(report.n_docs == 8);
    CHECK(report.accuracy >= 0.75);
    cmd_evaluate(cfg, Split::Train, eval_out);
    const auto records = lines_of(slurp(cfg.out_path));
    REQUIRE(records.size() == 2);
    CHECK(records[0].front() == '{');
    CHECK(records[0].find("\"n_docs\":8") != std::string::npos);

    std::istringstream in("A wonderful, clever film\n\nterrible and awful\r\n");
    std::ostringstream out;
    cmd_predict(model, in, out);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].starts_with("positive\t"));
    CHECK(rows[2].starts_with("negative\t"));
    // An empty line scores the priors alone; equal priors tie towards positive.
    const auto tab = rows[1].find('\t');
    CHECK(rows[1].substr(0, tab) == "positive");
    const double s = std::stod(rows[1].substr(tab + 1));
    CHECK(s == std::log(0.5));

    SUBCASE("training without a model path is a usage error") {
        RunConfig bad = fixture_config();
        std::ostringstream sink;
        CHECK_THROWS_AS(cmd_train(bad, sink), std::invalid_argument);
        bad.model_path = wd.path / "x.nbsent";
        bad.data_root = wd.path / "missing";
        CHECK_THROWS_AS(cmd_train(bad, sink), DataError);
    }
}

TEST_CASE("retraining on the full split differs from the holdout model") {
    Workdir wd;
    auto cfg = fixture_config();
    cfg.model_path = wd.path / "full.nbsent";
    std::ostringstream sink;
    cmd_train(cfg, sink);
    CHECK(load(cfg.model_path).docs(ClassLabel::Positive) == 4);
    cfg.retrain_full = false;
    cfg.model_path = wd.path / "holdout.nbsent";
    cmd_train(cfg, sink);
    CHECK(load(cfg.model_path).docs(ClassLabel::Positive) == 3);
}

TEST_CASE("sweep") {
    Workdir wd;
    auto cfg = fixture_config();
    cfg.out_path = wd.path / "sweep.csv";
    const std::vector<std::size_t> ks{1, 2, 4};
    std::ostringstream a, b;
    const auto points = cmd_sweep(cfg, ks, a);
    cmd_sweep(cfg, ks, b);
    CHECK(a.str() == b.str());
    const auto rows = lines_of(a.str());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "k,accuracy");
    CHECK(rows[1].starts_with("1,"));
    CHECK(rows[3].starts_with("4,"));
    for (const auto& p : points) CHECK((p.accuracy >= 0.0 && p.accuracy <= 1.0));
    CHECK(slurp(cfg.out_path) == a.str());
    CHECK(slurp(wd.path / "sweep.gp").find("'sweep.csv'") != std::string::npos);
}

TEST_CASE("ablation stages are cumulative") {
    const auto stages = ablation_stages(RunConfig{});
    REQUIRE(stages.size() == 5);
    CHECK(stages[0].name == "Original Naive Bayes algorithm with Laplacian Smoothing");
    CHECK(stages[4].name == "Feature Selection");

    const auto& s1 = stages[0].config;
    CHECK(s1.train.mode == CountMode::Multinomial);
    CHECK(s1.train.pipeline.negator_words.empty());
    CHECK_FALSE(s1.train.bootstrap);
    CHECK(s1.train.pipeline.n_max == 1);
    CHECK_FALSE(s1.selection_enabled);

    const auto& s2 = stages[1].config;
    CHECK(s2.train.pipeline.negator_words == std::vector<std::string>{"not", "n't"});
    CHECK(s2.train.bootstrap);
    CHECK(s2.train.mode == CountMode::Multinomial);

    CHECK(stages[2].config.train.mode == CountMode::Bernoulli);
    CHECK(stages[2].config.train.pipeline.n_max == 1);
    CHECK(stages[3].config.train.pipeline.n_max == 3);
    CHECK_FALSE(stages[3].config.selection_enabled);
    CHECK(stages[4].config.selection_enabled);
    CHECK(stages[4].config.train.pipeline.negator_words == s2.train.pipeline.negator_words);
    CHECK(stages[4].config.selection.top_k == 32000);
    CHECK(stages[4].config.selection.min_doc_freq == 2);
}

TEST_CASE("ablate") {
    Workdir wd;
    auto cfg = fixture_config();
    cfg.out_path = wd.path / "ablation.csv";
    std::ostringstream out;
    const auto rows = cmd_ablate(cfg, out);
    REQUIRE(rows.size() == 5);
    const auto stages = ablation_stages(cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].stage == stages[i].name);
    const auto csv = lines_of(slurp(cfg.out_path));
    REQUIRE(csv.size() == 6);
    CHECK(csv[0] == "stage,name,accuracy,features,train_seconds,test_seconds");
    CHECK(csv[1].starts_with("1,\"Original Naive Bayes"));
    CHECK(rows[3].features > rows[2].features);
}

TEST_CASE("bench") {
    auto cfg = fixture_config();
    std::ostringstream out;
    const auto start = std::chrono::steady_clock::now();
    const auto r = cmd_bench(cfg, out);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 5.0);
    REQUIRE(r.train_seconds_by_fraction.size() == 3);
    CHECK(r.train_seconds_by_fraction[0].first == 0.25);
    CHECK(r.test_docs == 8);
    CHECK(r.scaling_lengths == std::array<std::size_t, 2>{200, 1600});
    CHECK(out.str().find("peak memory") != std::string::npos);
}

TEST_CASE("csv helpers") {
    const std::vector<SweepPoint> pts{{1000, 0.5}, {2000, 0.875}};
    CHECK(sweep_csv(pts) == "k,accuracy\n1000,0.5\n2000,0.875\n");
    CHECK(sweep_gnuplot("x.csv").find("plot 'x.csv'") != std::string::npos);
}
