#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "nbsent/nb_core.hpp"

namespace nbsent {

inline constexpr std::string_view kModelMagic = "NBSENT";
inline constexpr int kModelFormatVersion = 1;

// NBSENT v1 layout (UTF-8, '\n' line endings):
//
//   NBSENT 1
//   mode bernoulli|multinomial
//   n_max <1..3>
//   lowercase 0|1
//   negators <space separated words, sorted>
//   reset_punctuation <characters, no separators>
//   bootstrap 0|1
//   bootstrap_ngrams 0|1
//   smoothing_k <shortest round-trip decimal>
//   denominator_policy fixed_at_training|recomputed_over_selected
//   docs <positive> <negative>
//   mass <positive> <negative>
//   features <count>
//   <feature>\t<positive count>\t<negative count>     (one per feature, sorted bytewise)
//
// Feature text escapes '\\' as "\\\\", tab as "\\t", newline as "\\n".

void write_model(const Model& model, std::ostream& out);
std::string model_to_string(const Model& model);

/// Throws ModelFormatError("unsupported model file") on bad magic or version,
/// and ModelFormatError("line N: ...") on malformed content.
Model read_model(std::istream& in);
Model model_from_string(std::string_view text);

/// Throws DataError when the path cannot be written.
void save(const Model& model, const std::filesystem::path& path);
Model load(const std::filesystem::path& path);

std::string escape_feature(std::string_view feature);
std::string unescape_feature(std::string_view escaped);

}  // namespace nbsent
