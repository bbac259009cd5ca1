#include "nbsent/text_pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace nbsent {

namespace {

constexpr std::string_view kNegContraction = "n't";

enum class CharClass { Word, Apostrophe, Separator };

// Decodes one UTF-8 code point starting at `pos`, advancing `pos`.
// Malformed input yields U+FFFD and consumes one byte.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + extra >= s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (int i = 1; i <= extra; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

CharClass classify(char32_t cp) {
    if (cp < 0x80) {
        const auto c = static_cast<unsigned char>(cp);
        if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            return CharClass::Word;
        }
        return c == '\'' ? CharClass::Apostrophe : CharClass::Separator;
    }
    if (cp == 0x2019) return CharClass::Apostrophe;
    // Latin-1 controls/symbols, x and division signs, general and CJK punctuation.
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return CharClass::Separator;
    if (cp >= 0x2000 && cp <= 0x206F) return CharClass::Separator;
    if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Separator;
    if (cp == 0xFEFF || cp == 0xFFFD) return CharClass::Separator;
    return CharClass::Word;
}

// Length of an HTML line break tag at `pos` ("<br>", "<br/>", "<br />"), or 0.
std::size_t line_break_length(std::string_view s, std::size_t pos) {
    if (pos + 3 > s.size() || s[pos] != '<') return 0;
    if ((s[pos + 1] | 0x20) != 'b' || (s[pos + 2] | 0x20) != 'r') return 0;
    std::size_t i = pos + 3;
    while (i < s.size() && s[i] == ' ') ++i;
    if (i < s.size() && s[i] == '/') ++i;
    if (i < s.size() && s[i] == '>') return i + 1 - pos;
    return 0;
}

void emit_word(std::string& word, std::vector<std::string>& out) {
    if (word.empty()) return;
    if (word.size() > kNegContraction.size() && word.ends_with(kNegContraction)) {
        out.emplace_back(word, 0, word.size() - kNegContraction.size());
        out.emplace_back(kNegContraction);
    } else {
        out.push_back(word);
    }
    word.clear();
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

bool PipelineConfig::is_negator(std::string_view token) const {
    return std::find(negator_words.begin(), negator_words.end(), token) != negator_words.end();
}

bool PipelineConfig::is_reset(std::string_view token) const {
    return token.size() == 1 && reset_punctuation.find(token[0]) != std::string::npos;
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    const auto canonical = [](auto v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    return a.n_max == b.n_max && a.lowercase == b.lowercase &&
           canonical(a.negator_words) == canonical(b.negator_words) &&
           canonical(a.reset_punctuation) == canonical(b.reset_punctuation);
}

void PipelineConfig::validate() const {
    if (n_max < 1 || n_max > 3) {
        throw std::invalid_argument("n_max must be in [1, 3], got " + std::to_string(n_max));
    }
    for (const auto& w : negator_words) {
        if (w.empty()) throw std::invalid_argument("negator words must be non-empty");
        if (w.find_first_of(" \t\n") != std::string::npos) {
            throw std::invalid_argument("negator words must not contain whitespace");
        }
    }
    for (char c : reset_punctuation) {
        if (static_cast<unsigned char>(c) >= 0x80 || c == ' ' || c == '\t' || c == '\n') {
            throw std::invalid_argument("reset punctuation must be printable ASCII");
        }
    }
}

std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& config) {
    std::vector<std::string> out;
    std::string word;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (const auto br = line_break_length(text, pos)) {
            emit_word(word, out);
            pos += br;
            continue;
        }
        const char32_t cp = next_code_point(text, pos);
        switch (classify(cp)) {
            case CharClass::Word:
                if (cp < 0x80) {
                    auto c = static_cast<char>(cp);
                    if (config.lowercase && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
                    word.push_back(c);
                } else {
                    append_utf8(word, cp);
                }
                break;
            case CharClass::Apostrophe: {
                // Kept only between two word characters.
                bool internal = false;
                if (!word.empty() && pos < text.size()) {
                    std::size_t peek = pos;
                    internal = classify(next_code_point(text, peek)) == CharClass::Word;
                }
                if (internal) {
                    word.push_back('\'');
                } else {
                    emit_word(word, out);
                }
                break;
            }
            case CharClass::Separator:
                emit_word(word, out);
                if (cp < 0x80 && config.reset_punctuation.find(static_cast<char>(cp)) != std::string::npos) {
                    out.emplace_back(1, static_cast<char>(cp));
                }
                break;
        }
    }
    emit_word(word, out);
    return out;
}

NegatedTokens apply_negation(std::span<const std::string> tokens, const PipelineConfig& config) {
    NegatedTokens out;
    out.tokens.reserve(tokens.size());
    bool negated = false;
    for (const auto& token : tokens) {
        if (config.is_reset(token)) {
            negated = false;
            if (out.breaks.empty() || out.breaks.back() != out.tokens.size()) {
                out.breaks.push_back(out.tokens.size());
            }
            continue;
        }
        if (negated) {
            std::string t;
            t.reserve(kNegationPrefix.size() + token.size());
            t.append(kNegationPrefix).append(token);
            out.tokens.push_back(std::move(t));
        } else {
            out.tokens.push_back(token);
        }
        if (config.is_negator(token)) negated = !negated;
    }
    return out;
}

void for_each_ngram(const NegatedTokens& tokens, int n_max,
                    const std::function<void(std::string_view, int)>& visit) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    const auto& toks = tokens.tokens;
    // segment_end[i]: one past the last token of the clause containing i.
    std::vector<std::size_t> segment_end(toks.size());
    {
        std::size_t b = 0;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            while (b < tokens.breaks.size() && tokens.breaks[b] <= i) ++b;
            segment_end[i] = b < tokens.breaks.size() ? tokens.breaks[b] : toks.size();
        }
    }
    std::string buf;
    for (int n = 1; n <= n_max; ++n) {
        for (std::size_t i = 0; i + n <= toks.size(); ++i) {
            if (i + n > segment_end[i]) continue;
            if (n == 1) {
                visit(toks[i], 1);
                continue;
            }
            buf.assign(toks[i]);
            for (int j = 1; j < n; ++j) {
                buf.push_back(' ');
                buf.append(toks[i + j]);
            }
            visit(buf, n);
        }
    }
}

std::vector<Feature> ngrams(const NegatedTokens& tokens, int n_max) {
    std::vector<Feature> out;
    for_each_ngram(tokens, n_max, [&](std::string_view f, int order) {
        out.push_back(Feature{std::string(f), order});
    });
    return out;
}

std::vector<Feature> ngrams(std::span<const std::string> tokens, int n_max) {
    NegatedTokens whole;
    whole.tokens.assign(tokens.begin(), tokens.end());
    return ngrams(whole, n_max);
}

FeatureSet featurize(std::string_view text, const PipelineConfig& config) {
    const auto tokens = tokenize(text, config);
    const auto negated = apply_negation(tokens, config);
    FeatureSet out;
    for_each_ngram(negated, config.n_max, [&](std::string_view f, int) { out.emplace_back(f); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

FeatureBag featurize_counts(std::string_view text, const PipelineConfig& config) {
    const auto tokens = tokenize(text, config);
    const auto negated = apply_negation(tokens, config);
    std::vector<std::string> all;
    for_each_ngram(negated, config.n_max, [&](std::string_view f, int) { all.emplace_back(f); });
    std::sort(all.begin(), all.end());
    FeatureBag out;
    for (auto& f : all) {
        if (!out.empty() && out.back().text == f) {
            ++out.back().count;
        } else {
            out.push_back(FeatureCount{std::move(f), 1});
        }
    }
    return out;
}

std::string toggle_negation(std::string_view feature) {
    std::string out;
    out.reserve(feature.size() + 2 * kNegationPrefix.size());
    std::size_t start = 0;
    while (true) {
        const auto end = feature.find(' ', start);
        const auto token = feature.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (token.starts_with(kNegationPrefix)) {
            out.append(token.substr(kNegationPrefix.size()));
        } else {
            out.append(kNegationPrefix).append(token);
        }
        if (end == std::string_view::npos) break;
        out.push_back(' ');
        start = end + 1;
    }
    return out;
}

Feature toggle_negation(const Feature& feature) {
    return Feature{toggle_negation(feature.text), feature.order};
}

int feature_order(std::string_view feature) {
    return 1 + static_cast<int>(std::count(feature.begin(), feature.end(), ' '));
}

}  // namespace nbsent
