#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "nbsent/text_pipeline.hpp"
#include "nbsent/types.hpp"

namespace nbsent {

enum class CountMode : std::uint8_t { Multinomial, Bernoulli };

std::string_view to_string(CountMode mode);
CountMode parse_count_mode(std::string_view s);

/// Per-class counts of one feature.
struct ClassCounts {
    std::array<std::uint32_t, 2> n{0, 0};

    std::uint32_t& operator[](ClassLabel c) { return n[index_of(c)]; }
    std::uint32_t operator[](ClassLabel c) const { return n[index_of(c)]; }
    std::uint64_t total() const { return std::uint64_t{n[0]} + n[1]; }

    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct TrainConfig {
    PipelineConfig pipeline;
    CountMode mode = CountMode::Bernoulli;
    /// Credit the negation-toggled form of every counted feature to the opposite class.
    bool bootstrap = true;
    /// Extend bootstrapping to bigrams and trigrams (off: unigrams only).
    bool bootstrap_ngrams = false;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

using FeatureMap = absl::flat_hash_map<std::string, ClassCounts>;

/// Trained statistics: per-class feature counts, word mass W_c and document count N_c.
///
/// W_c is the sum of every increment credited to class c, bootstrapped ones included.
/// In Bernoulli mode a document contributes its unique feature set, so W_c is the sum
/// of those set sizes; in multinomial mode it is the feature occurrence total.
class CountTable {
public:
    CountTable() = default;
    explicit CountTable(TrainConfig config) : config_(std::move(config)) {}

    const TrainConfig& config() const { return config_; }

    std::uint32_t count(std::string_view feature, ClassLabel c) const;
    ClassCounts counts(std::string_view feature) const;
    std::uint64_t mass(ClassLabel c) const { return mass_[index_of(c)]; }
    std::uint64_t docs(ClassLabel c) const { return docs_[index_of(c)]; }
    std::uint64_t total_docs() const { return docs_[0] + docs_[1]; }
    std::size_t size() const { return features_.size(); }
    const FeatureMap& features() const { return features_; }

    /// Featurizes `text` per config() and credits it to `label` (plus bootstrapping).
    void add_document(std::string_view text, ClassLabel label);

    /// Low-level increment; also adds `n` to the class word mass.
    void add(std::string_view feature, ClassLabel c, std::uint32_t n = 1);
    void add_doc_count(ClassLabel c, std::uint64_t n = 1) { docs_[index_of(c)] += n; }

    /// Sums another partial table into this one. Associative and commutative.
    void merge(const CountTable& other);

    /// Drops features matching `pred`; masses and document counts are untouched.
    template <class Pred>
    void erase_features_if(Pred pred) {
        absl::erase_if(features_, [&](const auto& kv) { return pred(kv.first, kv.second); });
    }

    void reserve(std::size_t n) { features_.reserve(n); }

    /// Moves the feature map out, leaving this table without features.
    FeatureMap release_features() { return std::exchange(features_, FeatureMap{}); }

    friend bool operator==(const CountTable& a, const CountTable& b);

private:
    TrainConfig config_;
    FeatureMap features_;
    std::array<std::uint64_t, 2> mass_{0, 0};
    std::array<std::uint64_t, 2> docs_{0, 0};
};

/// Single pass over `docs`. `threads` > 1 counts disjoint partitions and merges them.
/// Throws DataError on an empty corpus or when a class has no documents.
CountTable train(std::span<const LabeledDoc> docs, const TrainConfig& config, unsigned threads = 1);

struct SmoothingConfig {
    /// Add-k constant; must be positive.
    double k = 1.0;

    void validate() const;
    friend bool operator==(const SmoothingConfig&, const SmoothingConfig&) = default;
};

/// (count + k) / ((k + 1) * W_c). Throws DataError("empty class") if W_c == 0.
double smoothed_prob(std::uint64_t count, std::uint64_t class_mass, const SmoothingConfig& cfg);
double smoothed_prob(const CountTable& table, std::string_view feature, ClassLabel c,
                     const SmoothingConfig& cfg);

enum class DenominatorPolicy : std::uint8_t { FixedAtTraining, RecomputedOverSelected };

std::string_view to_string(DenominatorPolicy p);
DenominatorPolicy parse_denominator_policy(std::string_view s);

struct ClassScores {
    std::array<double, 2> log{0.0, 0.0};

    double operator[](ClassLabel c) const { return log[index_of(c)]; }
    double& operator[](ClassLabel c) { return log[index_of(c)]; }
};

/// Scores within this relative distance count as a tie and resolve to Positive.
inline constexpr double kTieTolerance = 1e-12;

ClassLabel argmax(const ClassScores& scores);

struct VocabEntry {
    ClassCounts counts;
    /// log P(f|c) per class, filled when the model is finalized.
    std::array<double, 2> log_prob{0.0, 0.0};
};

using Vocabulary = absl::flat_hash_map<std::string, VocabEntry>;

/// Immutable classifier: a closed vocabulary with per-class counts, the
/// training word mass and document counts, and the configs needed to
/// featurize new text the same way.
class Model {
public:
    Model() = default;

    /// Everything in `table` becomes vocabulary. The rvalue overload moves the keys.
    static Model build(const CountTable& table, const SmoothingConfig& smoothing,
                       DenominatorPolicy policy = DenominatorPolicy::FixedAtTraining);
    static Model build(CountTable&& table, const SmoothingConfig& smoothing,
                       DenominatorPolicy policy = DenominatorPolicy::FixedAtTraining);

    /// Vocabulary restricted to `vocabulary`; features not present in `table` are ignored.
    static Model build(const CountTable& table, std::span<const std::string> vocabulary,
                       const SmoothingConfig& smoothing,
                       DenominatorPolicy policy = DenominatorPolicy::FixedAtTraining);

    /// Assembles a model from stored parts (see model_store).
    Model(TrainConfig config, SmoothingConfig smoothing, DenominatorPolicy policy,
          std::array<std::uint64_t, 2> docs, std::array<std::uint64_t, 2> training_mass,
          FeatureMap vocabulary);

    const TrainConfig& train_config() const { return config_; }
    const PipelineConfig& pipeline() const { return config_.pipeline; }
    const SmoothingConfig& smoothing() const { return smoothing_; }
    DenominatorPolicy denominator_policy() const { return policy_; }
    const Vocabulary& vocabulary() const { return vocabulary_; }
    std::uint64_t docs(ClassLabel c) const { return docs_[index_of(c)]; }
    std::uint64_t training_mass(ClassLabel c) const { return training_mass_[index_of(c)]; }
    /// Denominator mass actually used for scoring (depends on the policy).
    std::uint64_t mass(ClassLabel c) const { return mass_[index_of(c)]; }
    double log_prior(ClassLabel c) const { return log_prior_[index_of(c)]; }

    /// log P(c) + sum over in-vocabulary features of count * log P(f|c).
    ClassScores log_posterior(std::span<const FeatureCount> features) const;
    ClassScores log_posterior(std::span<const std::string> features) const;

    /// Featurizes per the model's mode (set or bag) and scores.
    ClassScores score(std::string_view text) const;
    ClassLabel predict(std::string_view text) const { return argmax(score(text)); }

private:
    void finalize();

    TrainConfig config_;
    SmoothingConfig smoothing_;
    DenominatorPolicy policy_ = DenominatorPolicy::FixedAtTraining;
    std::array<std::uint64_t, 2> docs_{0, 0};
    std::array<std::uint64_t, 2> training_mass_{0, 0};
    std::array<std::uint64_t, 2> mass_{0, 0};
    std::array<double, 2> log_prior_{0.0, 0.0};
    Vocabulary vocabulary_;
};

}  // namespace nbsent
