#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nbsent/nb_core.hpp"
#include "oracles/nb_oracle.hpp"

using namespace nbsent;

namespace {

constexpr auto Pos = ClassLabel::Positive;
constexpr auto Neg = ClassLabel::Negative;

TrainConfig plain_unigrams(CountMode mode = CountMode::Bernoulli) {
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.bootstrap = false;
    cfg.pipeline.n_max = 1;
    cfg.pipeline.negator_words.clear();
    return cfg;
}

TrainConfig negation_unigrams(CountMode mode = CountMode::Bernoulli) {
    TrainConfig cfg = plain_unigrams(mode);
    cfg.pipeline.negator_words = {"not"};
    cfg.bootstrap = true;
    return cfg;
}

const std::vector<LabeledDoc> kToy{
    {"p1", "good", Pos}, {"p2", "great", Pos}, {"n1", "bad", Neg}, {"n2", "awful", Neg}};

std::vector<oracle::Doc> to_oracle(const std::vector<LabeledDoc>& docs) {
    std::vector<oracle::Doc> out;
    for (const auto& d : docs) out.push_back({d.text, d.label == Pos ? 0 : 1});
    return out;
}

oracle::Options oracle_options(const TrainConfig& cfg) {
    return {cfg.mode == CountMode::Bernoulli, !cfg.pipeline.negator_words.empty(), cfg.bootstrap, 1};
}

}  // namespace

TEST_CASE("train counting") {
    SUBCASE("bootstrapping credits the negated form to the other class") {
        const std::vector<LabeledDoc> docs{{"a", "good", Pos}, {"b", "meh", Neg}};
        const auto t = train(docs, negation_unigrams());
        CHECK(t.count("good", Pos) == 1);
        CHECK(t.count("not_good", Neg) == 1);
        CHECK(t.count("not_good", Pos) == 0);
        CHECK(t.mass(Pos) == 2);  // good + not_meh
        CHECK(t.mass(Neg) == 2);  // meh + not_good
    }
    SUBCASE("symmetric corpus") {
        const std::vector<LabeledDoc> docs{{"a", "x", Pos}, {"b", "x", Neg}};
        const auto t = train(docs, plain_unigrams());
        CHECK(t.count("x", Pos) == 1);
        CHECK(t.count("x", Neg) == 1);
        CHECK(t.docs(Pos) == 1);
        CHECK(t.docs(Neg) == 1);
    }
    SUBCASE("bernoulli counts presence, multinomial counts occurrences") {
        const std::vector<LabeledDoc> docs{{"a", "good good", Pos}, {"b", "bad", Neg}};
        CHECK(train(docs, plain_unigrams()).count("good", Pos) == 1);
        CHECK(train(docs, plain_unigrams()).mass(Pos) == 1);
        CHECK(train(docs, plain_unigrams(CountMode::Multinomial)).count("good", Pos) == 2);
        CHECK(train(docs, plain_unigrams(CountMode::Multinomial)).mass(Pos) == 2);
    }
    SUBCASE("n-gram bootstrapping is opt-in") {
        TrainConfig cfg = negation_unigrams();
        cfg.pipeline.n_max = 2;
        const std::vector<LabeledDoc> docs{{"a", "very good", Pos}, {"b", "bad", Neg}};
        CHECK(train(docs, cfg).count("not_very not_good", Neg) == 0);
        cfg.bootstrap_ngrams = true;
        CHECK(train(docs, cfg).count("not_very not_good", Neg) == 1);
    }
    SUBCASE("errors") {
        CHECK_THROWS_WITH_AS(train({}, plain_unigrams()), "empty training set", DataError);
        const std::vector<LabeledDoc> one_class{{"a", "x", Pos}, {"b", "y", Pos}};
        CHECK_THROWS_WITH_AS(train(one_class, plain_unigrams()), "degenerate class distribution", DataError);
    }
}

TEST_CASE("bootstrap symmetry property") {
    std::mt19937 rng(3);
    const std::vector<std::string> words{"good", "bad", "not", "plot", "fun"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LabeledDoc> docs;
        for (int d = 0; d < 6; ++d) {
            std::string text;
            for (int w = 0; w < 1 + static_cast<int>(rng() % 5); ++w) text += words[rng() % words.size()] + " ";
            docs.push_back({std::to_string(d), text, d % 2 ? Neg : Pos});
        }
        TrainConfig with = negation_unigrams();
        TrainConfig without = with;
        without.bootstrap = false;
        const auto a = train(docs, with);
        const auto b = train(docs, without);
        for (const auto& [f, c] : a.features()) {
            for (ClassLabel cls : kClasses) {
                REQUIRE(c[cls] == b.count(f, cls) + b.count(toggle_negation(f), opposite(cls)));
            }
        }
        REQUIRE(a.mass(Pos) == b.mass(Pos) + b.mass(Neg));
    }
}

TEST_CASE("partitioned counting merges to the same table") {
    std::vector<LabeledDoc> docs;
    for (int i = 0; i < 40; ++i) {
        docs.push_back({std::to_string(i), "doc " + std::to_string(i % 7) + " not good, very " + std::to_string(i % 3),
                        i % 2 ? Neg : Pos});
    }
    TrainConfig cfg;
    const auto serial = train(docs, cfg, 1);
    CHECK(train(docs, cfg, 1) == serial);
    CHECK(train(docs, cfg, 3) == serial);
    CHECK(train(docs, cfg, 8) == serial);

    CountTable a(cfg), b(cfg), c(cfg);
    a.add_document(docs[0].text, docs[0].label);
    b.add_document(docs[1].text, docs[1].label);
    c.add_document(docs[2].text, docs[2].label);
    CountTable ab_c = a;
    ab_c.merge(b);
    ab_c.merge(c);
    CountTable c_ba = c;
    c_ba.merge(b);
    c_ba.merge(a);
    CHECK(ab_c == c_ba);

    CountTable other(plain_unigrams());
    CHECK_THROWS_AS(a.merge(other), std::invalid_argument);
}

TEST_CASE("smoothed_prob") {
    const SmoothingConfig k1;
    CHECK(smoothed_prob(0, 100, k1) == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(smoothed_prob(9, 100, k1) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(smoothed_prob(0, 1, k1) == 0.5);
    CHECK_THROWS_WITH_AS(smoothed_prob(3, 0, k1), "empty class", DataError);

    SUBCASE("strictly positive and increasing in count") {
        for (double k : {0.1, 0.5, 1.0, 2.0}) {
            double prev = 0.0;
            for (std::uint64_t c = 0; c < 50; ++c) {
                const double p = smoothed_prob(c, 1000, SmoothingConfig{k});
                CHECK(p > 0.0);
                CHECK(p > prev);
                prev = p;
            }
        }
    }
    SUBCASE("from a table") {
        const auto t = train(kToy, plain_unigrams());
        CHECK(smoothed_prob(t, "good", Pos, k1) == 0.5);
        CHECK(smoothed_prob(t, "good", Neg, k1) == 0.25);
    }
    CHECK_THROWS_AS(SmoothingConfig{0.0}.validate(), std::invalid_argument);
}

TEST_CASE("log_posterior and predict on the toy corpus") {
    const auto table = train(kToy, plain_unigrams());
    const auto model = Model::build(table, SmoothingConfig{});

    CHECK(std::exp(model.log_prior(Pos)) + std::exp(model.log_prior(Neg)) == doctest::Approx(1.0).epsilon(1e-12));

    const auto empty = model.log_posterior(FeatureSet{});
    CHECK(empty[Pos] == model.log_prior(Pos));
    CHECK(empty[Neg] == model.log_prior(Neg));

    const auto unseen = model.log_posterior(FeatureSet{"zzz", "qqq"});
    CHECK(unseen[Pos] == unseen[Neg]);

    // P(pos)=1/2, P(good|pos)=(1+1)/(2*2); P(good|neg)=(0+1)/(2*2).
    const auto s = model.score("good");
    CHECK(s[Pos] == doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(s[Neg] == doctest::Approx(std::log(0.125)).epsilon(1e-14));
    const auto counts = oracle::count(to_oracle(kToy), oracle_options(plain_unigrams()));
    const auto exact = oracle::joint(counts, "good", oracle_options(plain_unigrams()));
    CHECK(std::abs(s[Pos] - oracle::log_of(exact[0])) < 1e-12);
    CHECK(std::abs(s[Neg] - oracle::log_of(exact[1])) < 1e-12);

    CHECK(model.predict("good movie") == Pos);
    CHECK(model.predict("") == Pos);

    SUBCASE("negated query with bootstrapping") {
        const auto boot = Model::build(train(kToy, negation_unigrams()), SmoothingConfig{});
        CHECK(boot.vocabulary().at("not_good").counts[Neg] == 1);
        CHECK(boot.predict("not good") == Neg);
        const auto opts = oracle_options(negation_unigrams());
        CHECK(oracle::predict(oracle::count(to_oracle(kToy), opts), "not good", opts) == 1);
    }
}

TEST_CASE("argmax") {
    ClassScores s;
    s.log = {-3.0, -3.0};
    CHECK(argmax(s) == Pos);
    s.log = {-3.0, -2.0};
    CHECK(argmax(s) == Neg);
    // Shifting both scores by a constant never changes the winner.
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-50.0, 0.0);
    for (int i = 0; i < 1000; ++i) {
        ClassScores a;
        a.log = {u(rng), u(rng)};
        ClassScores b = a;
        const double shift = u(rng);
        b.log[0] += shift;
        b.log[1] += shift;
        REQUIRE(argmax(a) == argmax(b));
    }
}

TEST_CASE("oracle equivalence on small random corpora") {
    std::mt19937 rng(2024);
    const std::vector<std::string> words{"good", "bad", "fun", "dull", "plot", "not"};
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto mode = rng() % 2 ? CountMode::Bernoulli : CountMode::Multinomial;
        TrainConfig cfg = rng() % 2 ? negation_unigrams(mode) : plain_unigrams(mode);
        if (!cfg.pipeline.negator_words.empty()) cfg.bootstrap = rng() % 2;

        std::vector<LabeledDoc> docs;
        const int n_docs = 2 + static_cast<int>(rng() % 7);
        for (int d = 0; d < n_docs; ++d) {
            std::string text;
            const int len = 1 + static_cast<int>(rng() % 5);
            for (int w = 0; w < len; ++w) text += (w ? " " : "") + words[rng() % words.size()];
            docs.push_back({std::to_string(d), text, d < 1 ? Pos : d < 2 ? Neg : (rng() % 2 ? Pos : Neg)});
        }
        const auto table = train(docs, cfg);
        REQUIRE(table.size() <= 12);
        const auto model = Model::build(table, SmoothingConfig{});
        const auto opts = oracle_options(cfg);
        const auto counts = oracle::count(to_oracle(docs), opts);

        for (int q = 0; q < 5; ++q) {
            std::string query;
            const int len = static_cast<int>(rng() % 6);
            for (int w = 0; w < len; ++w) query += (w ? " " : "") + words[rng() % words.size()];
            const auto exact = oracle::joint(counts, query, opts);
            const auto s = model.score(query);
            REQUIRE(std::abs(s[Pos] - oracle::log_of(exact[0])) < 1e-12);
            REQUIRE(std::abs(s[Neg] - oracle::log_of(exact[1])) < 1e-12);
            REQUIRE(index_of(model.predict(query)) == static_cast<std::size_t>(oracle::predict(counts, query, opts)));
            ++checked;
        }
    }
    CHECK(checked == 2000);
}

TEST_CASE("building from a large table stays linear") {
    CountTable t(plain_unigrams());
    for (int i = 0; i < 400000; ++i) t.add("f" + std::to_string(i), i % 2 ? Pos : Neg);
    t.add_doc_count(Pos);
    t.add_doc_count(Neg);
    const auto start = std::chrono::steady_clock::now();
    const auto m = Model::build(std::move(t), SmoothingConfig{});
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 5.0);
    CHECK(m.vocabulary().size() == 400000);
}

TEST_CASE("model building") {
    const auto table = train(kToy, plain_unigrams());
    SUBCASE("restricted vocabulary skips everything else") {
        const std::vector<std::string> vocab{"good", "missing"};
        const auto m = Model::build(table, vocab, SmoothingConfig{});
        CHECK(m.vocabulary().size() == 1);
        const auto s = m.score("bad");
        CHECK(s[Pos] == m.log_prior(Pos));
    }
    SUBCASE("denominator policies") {
        const std::vector<std::string> vocab{"good", "bad"};
        const auto fixed = Model::build(table, vocab, SmoothingConfig{}, DenominatorPolicy::FixedAtTraining);
        const auto recomputed = Model::build(table, vocab, SmoothingConfig{}, DenominatorPolicy::RecomputedOverSelected);
        CHECK(fixed.mass(Pos) == 2);
        CHECK(recomputed.mass(Pos) == 1);
        CHECK(recomputed.mass(Neg) == 1);
        CHECK(recomputed.training_mass(Neg) == 2);
        const std::vector<std::string> one_sided{"good"};
        CHECK_THROWS_WITH_AS(Model::build(table, one_sided, SmoothingConfig{}, DenominatorPolicy::RecomputedOverSelected),
                             "empty class", DataError);
    }
    SUBCASE("moving build equals copying build") {
        const auto copy = Model::build(table, SmoothingConfig{});
        CountTable t2 = table;
        const auto moved = Model::build(std::move(t2), SmoothingConfig{});
        CHECK(copy.vocabulary().size() == moved.vocabulary().size());
        for (const auto& q : {"good", "bad great", "awful awful"}) {
            CHECK(copy.score(q).log == moved.score(q).log);
        }
    }
}

TEST_CASE("training is deterministic") {
    TrainConfig cfg;
    std::vector<LabeledDoc> docs{{"a", "Not a good film. Really not!", Pos}, {"b", "An awful, awful film", Neg}};
    CHECK(train(docs, cfg) == train(docs, cfg));
}
