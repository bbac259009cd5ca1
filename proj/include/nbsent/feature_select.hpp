#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbsent/nb_core.hpp"

namespace nbsent {

/// Document counts of a feature against the class variable.
/// n11: present & positive, n10: present & negative,
/// n01: absent & positive,  n00: absent & negative.
struct ContingencyTable {
    std::uint64_t n11 = 0;
    std::uint64_t n10 = 0;
    std::uint64_t n01 = 0;
    std::uint64_t n00 = 0;

    std::uint64_t total() const { return n11 + n10 + n01 + n00; }
    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Builds the table from Bernoulli counts. Bootstrapped presence counts like real
/// presence; a count above the class document total is clamped to it.
ContingencyTable contingency(const ClassCounts& counts, std::uint64_t pos_docs, std::uint64_t neg_docs);
ContingencyTable contingency(const CountTable& table, std::string_view feature);

/// Mutual information (nats) between presence and class with ML cell
/// probabilities; empty cells contribute 0. Throws std::invalid_argument if N == 0.
double mutual_information(const ContingencyTable& ct);

struct SelectionConfig {
    std::uint32_t min_doc_freq = 2;
    std::size_t top_k = 32000;

    void validate() const;
};

/// Removes features whose summed document frequency is below `min_doc_freq`.
/// Requires a Bernoulli table.
CountTable prune_singletons(CountTable table, std::uint32_t min_doc_freq);
void prune_singletons_in_place(CountTable& table, std::uint32_t min_doc_freq);

struct RankedFeature {
    std::string text;
    double mi = 0.0;
    std::uint64_t doc_freq = 0;
};

/// The `limit` best features by MI, descending. Ties: higher document frequency,
/// then bytewise smaller text.
std::vector<RankedFeature> rank_features(const CountTable& table, std::size_t limit, unsigned threads = 1);

/// Top-k feature texts in rank order. If k exceeds the vocabulary every feature is
/// returned and a warning is written to stderr.
std::vector<std::string> select_top_k(const CountTable& table, const SelectionConfig& cfg, unsigned threads = 1);

struct SweepPoint {
    std::size_t k = 0;
    double accuracy = 0.0;
};

inline const std::vector<std::size_t> kDefaultSweepGrid{1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000, 256000};

/// Validation accuracy of the model restricted to the top-k features, for each k.
/// `table` should already be pruned. Throws DataError on an empty validation set.
std::vector<SweepPoint> sweep_k(const CountTable& table, std::span<const LabeledDoc> validation,
                                std::span<const std::size_t> ks, const SmoothingConfig& smoothing,
                                DenominatorPolicy policy = DenominatorPolicy::FixedAtTraining,
                                unsigned threads = 1);

}  // namespace nbsent
