#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nbsent {

inline constexpr std::string_view kNegationPrefix = "not_";

/// Tokenization and negation settings shared by training and prediction.
struct PipelineConfig {
    /// Longest n-gram emitted; 1..3.
    int n_max = 3;
    /// Tokens that flip the negation state. Empty disables negation handling.
    std::vector<std::string> negator_words{"not", "n't", "no", "never"};
    /// Single characters that are emitted as tokens and reset the negation state.
    std::string reset_punctuation = ".,!?;:";
    bool lowercase = true;

    /// Negators named by the original algorithm: "not" and "n't" only.
    static std::vector<std::string> minimal_negators() { return {"not", "n't"}; }

    bool is_negator(std::string_view token) const;
    bool is_reset(std::string_view token) const;

    /// Throws std::invalid_argument on out-of-range settings.
    void validate() const;

    /// Negators and punctuation compare as sets.
    friend bool operator==(const PipelineConfig& a, const PipelineConfig& b);
};

/// An n-gram; tokens joined by single spaces.
struct Feature {
    std::string text;
    int order = 1;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Output of the negation pass. `breaks` holds the positions in `tokens`
/// where a suppressed punctuation mark used to be; n-grams never cross them.
struct NegatedTokens {
    std::vector<std::string> tokens;
    std::vector<std::size_t> breaks;
};

struct FeatureCount {
    std::string text;
    std::uint32_t count = 0;

    friend bool operator==(const FeatureCount&, const FeatureCount&) = default;
};

/// Unique features of a document, sorted bytewise.
using FeatureSet = std::vector<std::string>;
/// Features with occurrence counts, sorted bytewise by text.
using FeatureBag = std::vector<FeatureCount>;

/// Lowercases, strips `<br />` markup, splits trailing "n't", keeps reset
/// punctuation as single-character tokens and drops every other symbol.
std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& config);

/// Runs the negation state machine: tokens seen while negated get the
/// "not_" prefix, negators toggle the state after being emitted, and reset
/// punctuation clears the state and is removed from the output.
NegatedTokens apply_negation(std::span<const std::string> tokens, const PipelineConfig& config);

/// All contiguous windows of length 1..n_max, grouped by length and in
/// document order within each length. Windows never span a break.
std::vector<Feature> ngrams(const NegatedTokens& tokens, int n_max);
std::vector<Feature> ngrams(std::span<const std::string> tokens, int n_max);

/// Streaming variant of ngrams(); the view is only valid during the callback.
void for_each_ngram(const NegatedTokens& tokens, int n_max,
                    const std::function<void(std::string_view, int)>& visit);

/// tokenize -> apply_negation -> ngrams -> dedup.
FeatureSet featurize(std::string_view text, const PipelineConfig& config);

/// Same pipeline, keeping occurrence counts (multinomial mode).
FeatureBag featurize_counts(std::string_view text, const PipelineConfig& config);

/// Flips the "not_" prefix on every token of the feature. Involution.
std::string toggle_negation(std::string_view feature);
Feature toggle_negation(const Feature& feature);

/// 1 + number of spaces.
int feature_order(std::string_view feature);

}  // namespace nbsent
