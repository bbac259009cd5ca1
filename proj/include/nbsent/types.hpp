#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nbsent {

enum class ClassLabel : std::uint8_t { Positive = 0, Negative = 1 };

inline constexpr std::array<ClassLabel, 2> kClasses{ClassLabel::Positive, ClassLabel::Negative};

constexpr ClassLabel opposite(ClassLabel c) {
    return c == ClassLabel::Positive ? ClassLabel::Negative : ClassLabel::Positive;
}

constexpr std::size_t index_of(ClassLabel c) { return static_cast<std::size_t>(c); }

constexpr std::string_view to_string(ClassLabel c) {
    return c == ClassLabel::Positive ? "positive" : "negative";
}

/// A review with its gold polarity. `id` is the file path relative to the split root.
struct LabeledDoc {
    std::string id;
    std::string text;
    ClassLabel label = ClassLabel::Positive;
};

/// Bad or missing input data: dataset layout, model files, degenerate corpora.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model file that cannot be parsed or has the wrong magic/version.
class ModelFormatError : public DataError {
public:
    using DataError::DataError;
};

/// An internal consistency check failed.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace nbsent
