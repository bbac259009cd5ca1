#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbsent/nb_core.hpp"
#include "nbsent/types.hpp"

namespace nbsent {

enum class Split { Train, Test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

/// Reads <root>/<split>/{pos,neg}/*.txt. Positive documents first, each class
/// sorted by filename; ids are "pos/<name>" / "neg/<name>".
/// Throws DataError on a missing directory, an empty class, or an empty file.
std::vector<LabeledDoc> load_split(const std::filesystem::path& root, Split split);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

struct ValidationSplit {
    std::vector<LabeledDoc> train;
    std::vector<LabeledDoc> validation;
};

/// Moves a class-balanced sample of n documents (n/2 per class) into a
/// validation set. Seeded Fisher-Yates over each class; both outputs keep the
/// input order. Throws std::invalid_argument if n is odd or too large.
ValidationSplit split_validation(std::vector<LabeledDoc> train, std::size_t n, std::uint64_t seed);

/// Class-balanced deterministic subsample keeping `fraction` of each class.
std::vector<LabeledDoc> subsample(std::span<const LabeledDoc> docs, double fraction, std::uint64_t seed);

struct EvalReport {
    double accuracy = 0.0;
    /// confusion[gold][predicted], indexed by index_of(ClassLabel).
    std::array<std::array<std::uint64_t, 2>, 2> confusion{};
    std::uint64_t n_docs = 0;
    double wall_time_seconds = 0.0;
    std::uint64_t peak_memory_bytes = 0;

    /// One JSON object on a single line.
    std::string to_json() const;
};

/// Predicts every document and tallies the confusion matrix.
/// Throws DataError on an empty document list.
EvalReport evaluate(const Model& model, std::span<const LabeledDoc> docs, unsigned threads = 1);

/// High-water resident set size of this process, or 0 if unknown.
std::uint64_t peak_memory_bytes();

}  // namespace nbsent
