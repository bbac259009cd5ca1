#include "nbsent/feature_select.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "parallel.hpp"

namespace nbsent {

namespace {

void require_bernoulli(const CountTable& table, const char* op) {
    if (table.config().mode != CountMode::Bernoulli) {
        throw std::invalid_argument(std::string(op) + " requires a bernoulli count table");
    }
}

// Strict weak order: better features first.
bool ranks_before(const RankedFeature& a, const RankedFeature& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    if (a.doc_freq != b.doc_freq) return a.doc_freq > b.doc_freq;
    return a.text < b.text;
}

}  // namespace

ContingencyTable contingency(const ClassCounts& counts, std::uint64_t pos_docs, std::uint64_t neg_docs) {
    ContingencyTable ct;
    ct.n11 = std::min<std::uint64_t>(counts[ClassLabel::Positive], pos_docs);
    ct.n10 = std::min<std::uint64_t>(counts[ClassLabel::Negative], neg_docs);
    ct.n01 = pos_docs - ct.n11;
    ct.n00 = neg_docs - ct.n10;
    return ct;
}

ContingencyTable contingency(const CountTable& table, std::string_view feature) {
    return contingency(table.counts(feature), table.docs(ClassLabel::Positive), table.docs(ClassLabel::Negative));
}

double mutual_information(const ContingencyTable& ct) {
    const std::uint64_t n = ct.total();
    if (n == 0) throw std::invalid_argument("mutual information of an empty contingency table");
    const double total = static_cast<double>(n);
    const double present = static_cast<double>(ct.n11 + ct.n10);
    const double absent = static_cast<double>(ct.n01 + ct.n00);
    const double pos = static_cast<double>(ct.n11 + ct.n01);
    const double neg = static_cast<double>(ct.n10 + ct.n00);

    const auto term = [&](std::uint64_t cell, double row, double col) {
        if (cell == 0) return 0.0;
        const double c = static_cast<double>(cell);
        return c / total * std::log(c * total / (row * col));
    };
    // Exactly independent tables give exactly zero.
    if (static_cast<unsigned __int128>(ct.n11) * ct.n00 == static_cast<unsigned __int128>(ct.n10) * ct.n01) {
        return 0.0;
    }
    // Summed in sorted order so mirrored tables (class swap, presence swap) give identical bits.
    std::array<double, 4> terms{term(ct.n11, present, pos), term(ct.n10, present, neg), term(ct.n01, absent, pos),
                                term(ct.n00, absent, neg)};
    std::sort(terms.begin(), terms.end());
    const double mi = ((terms[0] + terms[1]) + terms[2]) + terms[3];
    return std::max(0.0, mi);
}

void SelectionConfig::validate() const {
    if (min_doc_freq < 1) throw std::invalid_argument("min_doc_freq must be >= 1");
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

void prune_singletons_in_place(CountTable& table, std::uint32_t min_doc_freq) {
    require_bernoulli(table, "prune_singletons");
    if (min_doc_freq <= 1) return;
    table.erase_features_if([&](const std::string&, const ClassCounts& c) { return c.total() < min_doc_freq; });
}

CountTable prune_singletons(CountTable table, std::uint32_t min_doc_freq) {
    prune_singletons_in_place(table, min_doc_freq);
    return table;
}

std::vector<RankedFeature> rank_features(const CountTable& table, std::size_t limit, unsigned threads) {
    require_bernoulli(table, "rank_features");
    const std::uint64_t pos_docs = table.docs(ClassLabel::Positive);
    const std::uint64_t neg_docs = table.docs(ClassLabel::Negative);

    std::vector<const std::pair<const std::string, ClassCounts>*> entries;
    entries.reserve(table.size());
    for (const auto& kv : table.features()) entries.push_back(&kv);

    std::vector<RankedFeature> ranked(entries.size());
    detail::parallel_chunks(entries.size(), detail::resolve_threads(threads),
                            [&](unsigned, std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i) {
                                    const auto& [text, counts] = *entries[i];
                                    ranked[i].text = text;
                                    ranked[i].mi = mutual_information(contingency(counts, pos_docs, neg_docs));
                                    ranked[i].doc_freq = counts.total();
                                }
                            });

    limit = std::min(limit, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(limit), ranked.end(),
                      ranks_before);
    ranked.resize(limit);
    return ranked;
}

std::vector<std::string> select_top_k(const CountTable& table, const SelectionConfig& cfg, unsigned threads) {
    cfg.validate();
    if (cfg.top_k > table.size()) {
        std::clog << "warning: top_k " << cfg.top_k << " exceeds vocabulary size " << table.size()
                  << "; keeping all features\n";
    }
    auto ranked = rank_features(table, cfg.top_k, threads);
    std::vector<std::string> out;
    out.reserve(ranked.size());
    for (auto& r : ranked) out.push_back(std::move(r.text));
    return out;
}

std::vector<SweepPoint> sweep_k(const CountTable& table, std::span<const LabeledDoc> validation,
                                std::span<const std::size_t> ks, const SmoothingConfig& smoothing,
                                DenominatorPolicy policy, unsigned threads) {
    if (validation.empty()) throw DataError("empty validation set");
    if (ks.empty()) return {};
    const std::size_t widest = *std::max_element(ks.begin(), ks.end());
    const auto ranked = rank_features(table, widest, threads);
    std::vector<std::string> order;
    order.reserve(ranked.size());
    for (const auto& r : ranked) order.push_back(r.text);

    // Featurize once; every k reuses the same feature lists.
    const auto& pipeline = table.config().pipeline;
    std::vector<FeatureSet> features(validation.size());
    const unsigned parts = detail::resolve_threads(threads);
    detail::parallel_chunks(validation.size(), parts, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) features[i] = featurize(validation[i].text, pipeline);
    });

    std::vector<SweepPoint> out;
    out.reserve(ks.size());
    for (const std::size_t k : ks) {
        if (k < 1) throw std::invalid_argument("sweep k must be >= 1");
        const std::size_t take = std::min(k, order.size());
        const Model model = Model::build(table, std::span<const std::string>(order.data(), take), smoothing, policy);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < validation.size(); ++i) {
            if (argmax(model.log_posterior(features[i])) == validation[i].label) ++correct;
        }
        out.push_back(SweepPoint{k, static_cast<double>(correct) / static_cast<double>(validation.size())});
    }
    return out;
}

}  // namespace nbsent
