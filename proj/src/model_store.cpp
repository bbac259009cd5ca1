#include "nbsent/model_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace nbsent {

namespace {

constexpr std::array<std::string_view, 12> kHeaderKeys{
    "mode",          "n_max",       "lowercase", "negators", "reset_punctuation", "bootstrap",
    "bootstrap_ngrams", "smoothing_k", "denominator_policy", "docs", "mass", "features"};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ModelFormatError("line " + std::to_string(line) + ": " + what);
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

template <class T>
T parse_number(std::string_view s, std::size_t line, std::string_view what) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        fail(line, "invalid " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

bool parse_flag(std::string_view s, std::size_t line, std::string_view key) {
    if (s == "0") return false;
    if (s == "1") return true;
    fail(line, std::string(key) + " must be 0 or 1");
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_pair(std::string_view s, std::size_t line, std::string_view key) {
    const auto parts = split_on(s, ' ');
    if (parts.size() != 2) fail(line, std::string(key) + " needs two values");
    return {parse_number<std::uint64_t>(parts[0], line, key), parse_number<std::uint64_t>(parts[1], line, key)};
}

}  // namespace

std::string escape_feature(std::string_view feature) {
    std::string out;
    out.reserve(feature.size());
    for (char c : feature) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_feature(std::string_view escaped) {
    std::string out;
    out.reserve(escaped.size());
    for (std::size_t i = 0; i < escaped.size(); ++i) {
        if (escaped[i] != '\\') {
            out.push_back(escaped[i]);
            continue;
        }
        if (++i == escaped.size()) throw std::invalid_argument("dangling escape");
        switch (escaped[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            default: throw std::invalid_argument(std::string("unknown escape \\") + escaped[i]);
        }
    }
    return out;
}

void write_model(const Model& model, std::ostream& out) {
    const auto& cfg = model.train_config();
    auto negators = cfg.pipeline.negator_words;
    std::sort(negators.begin(), negators.end());
    negators.erase(std::unique(negators.begin(), negators.end()), negators.end());
    auto punctuation = cfg.pipeline.reset_punctuation;
    std::sort(punctuation.begin(), punctuation.end());
    punctuation.erase(std::unique(punctuation.begin(), punctuation.end()), punctuation.end());

    out << kModelMagic << ' ' << kModelFormatVersion << '\n';
    out << "mode " << to_string(cfg.mode) << '\n';
    out << "n_max " << cfg.pipeline.n_max << '\n';
    out << "lowercase " << (cfg.pipeline.lowercase ? 1 : 0) << '\n';
    out << "negators";
    for (const auto& w : negators) out << ' ' << w;
    out << '\n';
    out << "reset_punctuation " << punctuation << '\n';
    out << "bootstrap " << (cfg.bootstrap ? 1 : 0) << '\n';
    out << "bootstrap_ngrams " << (cfg.bootstrap_ngrams ? 1 : 0) << '\n';
    out << "smoothing_k " << format_double(model.smoothing().k) << '\n';
    out << "denominator_policy " << to_string(model.denominator_policy()) << '\n';
    out << "docs " << model.docs(ClassLabel::Positive) << ' ' << model.docs(ClassLabel::Negative) << '\n';
    out << "mass " << model.training_mass(ClassLabel::Positive) << ' ' << model.training_mass(ClassLabel::Negative)
        << '\n';
    out << "features " << model.vocabulary().size() << '\n';

    std::vector<const std::pair<const std::string, VocabEntry>*> rows;
    rows.reserve(model.vocabulary().size());
    for (const auto& kv : model.vocabulary()) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->first < b->first; });
    for (const auto* kv : rows) {
        out << escape_feature(kv->first) << '\t' << kv->second.counts[ClassLabel::Positive] << '\t'
            << kv->second.counts[ClassLabel::Negative] << '\n';
    }
}

std::string model_to_string(const Model& model) {
    std::ostringstream ss;
    write_model(model, ss);
    return ss.str();
}

Model read_model(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ModelFormatError("unsupported model file: empty input");
    ++line_no;
    if (line != std::string(kModelMagic) + ' ' + std::to_string(kModelFormatVersion)) {
        throw ModelFormatError("unsupported model file: header '" + line.substr(0, 40) + "'");
    }

    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> header;
    while (header.size() < kHeaderKeys.size()) {
        if (!std::getline(in, line)) fail(line_no + 1, "unexpected end of file in header");
        ++line_no;
        const auto sp = line.find(' ');
        std::string key = line.substr(0, sp);
        std::string value = sp == std::string::npos ? std::string{} : line.substr(sp + 1);
        if (std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key) == kHeaderKeys.end()) {
            fail(line_no, "unknown header key '" + key + "'");
        }
        if (header.count(key) != 0) fail(line_no, "duplicate header key '" + key + "'");
        header.emplace(std::move(key), std::make_pair(std::move(value), line_no));
        if (line.starts_with("features") && header.size() < kHeaderKeys.size()) {
            fail(line_no, "'features' must be the last header line");
        }
    }
    const auto get = [&](std::string_view key) -> const std::pair<std::string, std::size_t>& {
        return header.find(key)->second;
    };

    TrainConfig cfg;
    SmoothingConfig smoothing;
    DenominatorPolicy policy{};
    try {
        cfg.mode = parse_count_mode(get("mode").first);
    } catch (const std::invalid_argument& e) {
        fail(get("mode").second, e.what());
    }
    cfg.pipeline.n_max = parse_number<int>(get("n_max").first, get("n_max").second, "n_max");
    cfg.pipeline.lowercase = parse_flag(get("lowercase").first, get("lowercase").second, "lowercase");
    cfg.pipeline.negator_words.clear();
    for (auto w : split_on(get("negators").first, ' ')) {
        if (!w.empty()) cfg.pipeline.negator_words.emplace_back(w);
    }
    cfg.pipeline.reset_punctuation = get("reset_punctuation").first;
    cfg.bootstrap = parse_flag(get("bootstrap").first, get("bootstrap").second, "bootstrap");
    cfg.bootstrap_ngrams = parse_flag(get("bootstrap_ngrams").first, get("bootstrap_ngrams").second, "bootstrap_ngrams");
    smoothing.k = parse_number<double>(get("smoothing_k").first, get("smoothing_k").second, "smoothing_k");
    try {
        policy = parse_denominator_policy(get("denominator_policy").first);
    } catch (const std::invalid_argument& e) {
        fail(get("denominator_policy").second, e.what());
    }
    const auto docs = parse_pair(get("docs").first, get("docs").second, "docs");
    const auto mass = parse_pair(get("mass").first, get("mass").second, "mass");
    const auto n_features = parse_number<std::uint64_t>(get("features").first, get("features").second, "features");

    FeatureMap vocab;
    vocab.reserve(n_features);
    std::string previous;
    for (std::uint64_t i = 0; i < n_features; ++i) {
        if (!std::getline(in, line)) {
            fail(line_no + 1, "truncated file: expected " + std::to_string(n_features) + " feature records, found " +
                                  std::to_string(i));
        }
        ++line_no;
        const auto fields = split_on(line, '\t');
        if (fields.size() != 3) fail(line_no, "feature record needs 3 tab-separated fields");
        std::string feature;
        try {
            feature = unescape_feature(fields[0]);
        } catch (const std::invalid_argument& e) {
            fail(line_no, e.what());
        }
        if (feature.empty()) fail(line_no, "empty feature text");
        if (i > 0 && !(previous < feature)) fail(line_no, "feature records not in sorted order");
        ClassCounts c;
        c[ClassLabel::Positive] = parse_number<std::uint32_t>(fields[1], line_no, "count");
        c[ClassLabel::Negative] = parse_number<std::uint32_t>(fields[2], line_no, "count");
        previous = feature;
        vocab.emplace(std::move(feature), c);
    }
    if (std::getline(in, line)) fail(line_no + 1, "trailing content after feature records");

    try {
        return Model(std::move(cfg), smoothing, policy, {docs.first, docs.second}, {mass.first, mass.second},
                     std::move(vocab));
    } catch (const std::exception& e) {
        throw ModelFormatError(std::string("invalid model: ") + e.what());
    }
}

Model model_from_string(std::string_view text) {
    std::istringstream ss{std::string(text)};
    return read_model(ss);
}

void save(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write model file " + path.string());
    write_model(model, out);
    out.flush();
    if (!out) throw DataError("I/O error writing " + path.string());
}

Model load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file " + path.string());
    return read_model(in);
}

}  // namespace nbsent
