#include "nbsent/nb_core.hpp"

#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace nbsent {

std::string_view to_string(CountMode mode) {
    return mode == CountMode::Bernoulli ? "bernoulli" : "multinomial";
}

CountMode parse_count_mode(std::string_view s) {
    if (s == "bernoulli") return CountMode::Bernoulli;
    if (s == "multinomial") return CountMode::Multinomial;
    throw std::invalid_argument("unknown count mode: " + std::string(s));
}

std::string_view to_string(DenominatorPolicy p) {
    return p == DenominatorPolicy::FixedAtTraining ? "fixed_at_training" : "recomputed_over_selected";
}

DenominatorPolicy parse_denominator_policy(std::string_view s) {
    if (s == "fixed_at_training") return DenominatorPolicy::FixedAtTraining;
    if (s == "recomputed_over_selected") return DenominatorPolicy::RecomputedOverSelected;
    throw std::invalid_argument("unknown denominator policy: " + std::string(s));
}

// ---------------------------------------------------------------------------
// CountTable

namespace {

// The system abseil may carry its own string_view type.
absl::string_view key(std::string_view s) { return {s.data(), s.size()}; }

}  // namespace

std::uint32_t CountTable::count(std::string_view feature, ClassLabel c) const {
    const auto it = features_.find(key(feature));
    return it == features_.end() ? 0 : it->second[c];
}

ClassCounts CountTable::counts(std::string_view feature) const {
    const auto it = features_.find(key(feature));
    return it == features_.end() ? ClassCounts{} : it->second;
}

void CountTable::add(std::string_view feature, ClassLabel c, std::uint32_t n) {
    auto it = features_.find(key(feature));
    if (it == features_.end()) it = features_.emplace(std::string(feature), ClassCounts{}).first;
    it->second[c] += n;
    mass_[index_of(c)] += n;
}

void CountTable::add_document(std::string_view text, ClassLabel label) {
    const auto& pipeline = config_.pipeline;
    const ClassLabel other = opposite(label);
    const auto credit = [&](const std::string& feature, std::uint32_t n) {
        add(feature, label, n);
        if (config_.bootstrap && (config_.bootstrap_ngrams || feature.find(' ') == std::string::npos)) {
            add(toggle_negation(feature), other, n);
        }
    };
    if (config_.mode == CountMode::Bernoulli) {
        for (const auto& f : featurize(text, pipeline)) credit(f, 1);
    } else {
        for (const auto& f : featurize_counts(text, pipeline)) credit(f.text, f.count);
    }
    add_doc_count(label);
}

void CountTable::merge(const CountTable& other) {
    if (!(config_ == other.config_)) {
        throw std::invalid_argument("cannot merge count tables trained with different configs");
    }
    features_.reserve(features_.size() + other.features_.size() / 2);
    for (const auto& [feature, c] : other.features_) {
        auto& mine = features_[feature];
        mine.n[0] += c.n[0];
        mine.n[1] += c.n[1];
    }
    for (std::size_t i = 0; i < 2; ++i) {
        mass_[i] += other.mass_[i];
        docs_[i] += other.docs_[i];
    }
}

bool operator==(const CountTable& a, const CountTable& b) {
    return a.config_ == b.config_ && a.mass_ == b.mass_ && a.docs_ == b.docs_ && a.features_ == b.features_;
}

CountTable train(std::span<const LabeledDoc> docs, const TrainConfig& config, unsigned threads) {
    config.pipeline.validate();
    if (docs.empty()) throw DataError("empty training set");
    std::array<std::size_t, 2> per_class{0, 0};
    for (const auto& d : docs) ++per_class[index_of(d.label)];
    if (per_class[0] == 0 || per_class[1] == 0) throw DataError("degenerate class distribution");

    const unsigned parts = detail::resolve_threads(threads);
    std::vector<CountTable> partial(parts, CountTable(config));
    detail::parallel_chunks(docs.size(), parts, [&](unsigned p, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) partial[p].add_document(docs[i].text, docs[i].label);
    });
    CountTable table = std::move(partial[0]);
    for (std::size_t p = 1; p < partial.size(); ++p) {
        table.merge(partial[p]);
        partial[p] = CountTable{};
    }
    return table;
}

// ---------------------------------------------------------------------------
// Smoothing

void SmoothingConfig::validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("smoothing k must be positive");
}

double smoothed_prob(std::uint64_t count, std::uint64_t class_mass, const SmoothingConfig& cfg) {
    if (class_mass == 0) throw DataError("empty class");
    return (static_cast<double>(count) + cfg.k) / ((cfg.k + 1.0) * static_cast<double>(class_mass));
}

double smoothed_prob(const CountTable& table, std::string_view feature, ClassLabel c,
                     const SmoothingConfig& cfg) {
    return smoothed_prob(table.count(feature, c), table.mass(c), cfg);
}

// ---------------------------------------------------------------------------
// Model

ClassLabel argmax(const ClassScores& scores) {
    const double pos = scores[ClassLabel::Positive];
    const double neg = scores[ClassLabel::Negative];
    const double scale = std::max({1.0, std::abs(pos), std::abs(neg)});
    return pos >= neg - kTieTolerance * scale ? ClassLabel::Positive : ClassLabel::Negative;
}

Model Model::build(const CountTable& table, const SmoothingConfig& smoothing, DenominatorPolicy policy) {
    return Model(table.config(), smoothing, policy, {table.docs(ClassLabel::Positive), table.docs(ClassLabel::Negative)},
                 {table.mass(ClassLabel::Positive), table.mass(ClassLabel::Negative)}, table.features());
}

Model Model::build(CountTable&& table, const SmoothingConfig& smoothing, DenominatorPolicy policy) {
    const std::array<std::uint64_t, 2> docs{table.docs(ClassLabel::Positive), table.docs(ClassLabel::Negative)};
    const std::array<std::uint64_t, 2> mass{table.mass(ClassLabel::Positive), table.mass(ClassLabel::Negative)};
    TrainConfig config = table.config();
    return Model(std::move(config), smoothing, policy, docs, mass, table.release_features());
}

Model Model::build(const CountTable& table, std::span<const std::string> vocabulary,
                   const SmoothingConfig& smoothing, DenominatorPolicy policy) {
    FeatureMap vocab;
    vocab.reserve(vocabulary.size());
    for (const auto& f : vocabulary) {
        const auto it = table.features().find(f);
        if (it != table.features().end()) vocab.emplace(it->first, it->second);
    }
    return Model(table.config(), smoothing, policy, {table.docs(ClassLabel::Positive), table.docs(ClassLabel::Negative)},
                 {table.mass(ClassLabel::Positive), table.mass(ClassLabel::Negative)}, std::move(vocab));
}

Model::Model(TrainConfig config, SmoothingConfig smoothing, DenominatorPolicy policy,
             std::array<std::uint64_t, 2> docs, std::array<std::uint64_t, 2> training_mass, FeatureMap vocabulary)
    : config_(std::move(config)),
      smoothing_(smoothing),
      policy_(policy),
      docs_(docs),
      training_mass_(training_mass) {
    vocabulary_.reserve(vocabulary.size());
    // Advance the iterator: begin() on a draining flat map rescans emptied slots.
    for (auto it = vocabulary.begin(); it != vocabulary.end();) {
        auto node = vocabulary.extract(it++);
        vocabulary_.emplace(std::move(node.key()), VocabEntry{node.mapped(), {}});
    }
    finalize();
}

void Model::finalize() {
    config_.pipeline.validate();
    smoothing_.validate();
    const std::uint64_t total_docs = docs_[0] + docs_[1];
    if (docs_[0] == 0 || docs_[1] == 0) throw DataError("degenerate class distribution");
    for (std::size_t i = 0; i < 2; ++i) {
        log_prior_[i] = std::log(static_cast<double>(docs_[i]) / static_cast<double>(total_docs));
    }

    if (policy_ == DenominatorPolicy::FixedAtTraining) {
        mass_ = training_mass_;
    } else {
        mass_ = {0, 0};
        for (const auto& [_, e] : vocabulary_) {
            mass_[0] += e.counts.n[0];
            mass_[1] += e.counts.n[1];
        }
    }

    for (auto& [_, e] : vocabulary_) {
        for (ClassLabel cls : kClasses) {
            e.log_prob[index_of(cls)] = std::log(smoothed_prob(e.counts[cls], mass_[index_of(cls)], smoothing_));
        }
    }
}

ClassScores Model::log_posterior(std::span<const FeatureCount> features) const {
    ClassScores s;
    s.log = log_prior_;
    for (const auto& f : features) {
        const auto it = vocabulary_.find(f.text);
        if (it == vocabulary_.end()) continue;
        s.log[0] += f.count * it->second.log_prob[0];
        s.log[1] += f.count * it->second.log_prob[1];
    }
    return s;
}

ClassScores Model::log_posterior(std::span<const std::string> features) const {
    ClassScores s;
    s.log = log_prior_;
    for (const auto& f : features) {
        const auto it = vocabulary_.find(f);
        if (it == vocabulary_.end()) continue;
        s.log[0] += it->second.log_prob[0];
        s.log[1] += it->second.log_prob[1];
    }
    return s;
}

ClassScores Model::score(std::string_view text) const {
    if (config_.mode == CountMode::Bernoulli) return log_posterior(featurize(text, config_.pipeline));
    return log_posterior(featurize_counts(text, config_.pipeline));
}

}  // namespace nbsent
