#include "nbsent/corpus.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace nbsent {

namespace fs = std::filesystem;

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split parse_split(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + std::string(s));
}

std::string sanitize_utf8(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::size_t i = 0;
    while (i < in.size()) {
        const auto b0 = static_cast<unsigned char>(in[i]);
        std::size_t len = 0;
        char32_t min_cp = 0;
        if (b0 < 0x80) {
            out.push_back(static_cast<char>(b0));
            ++i;
            continue;
        } else if (b0 >= 0xC2 && b0 <= 0xDF) {
            len = 2;
            min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            min_cp = 0x800;
        } else if (b0 >= 0xF0 && b0 <= 0xF4) {
            len = 4;
            min_cp = 0x10000;
        }
        bool ok = len != 0 && i + len <= in.size();
        char32_t cp = 0;
        if (ok) {
            cp = b0 & (len == 2 ? 0x1F : len == 3 ? 0x0F : 0x07);
            for (std::size_t j = 1; j < len; ++j) {
                const auto b = static_cast<unsigned char>(in[i + j]);
                if ((b & 0xC0) != 0x80) {
                    ok = false;
                    break;
                }
                cp = (cp << 6) | (b & 0x3F);
            }
            ok = ok && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
        }
        if (ok) {
            out.append(in.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void load_class(const fs::path& dir, std::string_view tag, ClassLabel label, std::vector<LabeledDoc>& out) {
    if (!fs::is_directory(dir)) throw DataError("missing directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    if (files.empty()) throw DataError("no .txt files in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    for (const auto& f : files) {
        auto text = sanitize_utf8(read_file(f));
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("empty document: " + f.string());
        out.push_back(LabeledDoc{std::string(tag) + "/" + f.filename().string(), std::move(text), label});
    }
}

// Portable across standard libraries: only relies on mt19937_64's specified output.
template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(v[i - 1], v[j]);
    }
}

std::array<std::vector<std::size_t>, 2> indices_by_class(std::span<const LabeledDoc> docs) {
    std::array<std::vector<std::size_t>, 2> idx;
    for (std::size_t i = 0; i < docs.size(); ++i) idx[index_of(docs[i].label)].push_back(i);
    return idx;
}

}  // namespace

std::vector<LabeledDoc> load_split(const fs::path& root, Split split) {
    const fs::path base = root / std::string(to_string(split));
    if (!fs::is_directory(base)) throw DataError("missing directory: " + base.string());
    std::vector<LabeledDoc> docs;
    load_class(base / "pos", "pos", ClassLabel::Positive, docs);
    load_class(base / "neg", "neg", ClassLabel::Negative, docs);
    return docs;
}

ValidationSplit split_validation(std::vector<LabeledDoc> train, std::size_t n, std::uint64_t seed) {
    if (n % 2 != 0) throw std::invalid_argument("validation size must be even");
    if (n > train.size()) throw std::invalid_argument("validation size exceeds training set");
    ValidationSplit out;
    if (n == 0) {
        out.train = std::move(train);
        return out;
    }
    auto idx = indices_by_class(train);
    std::vector<bool> held(train.size(), false);
    std::mt19937_64 rng(seed);
    for (auto& cls : idx) {
        if (cls.size() < n / 2) throw std::invalid_argument("validation size exceeds a class's document count");
        seeded_shuffle(cls, rng);
        for (std::size_t i = 0; i < n / 2; ++i) held[cls[i]] = true;
    }
    out.train.reserve(train.size() - n);
    out.validation.reserve(n);
    for (std::size_t i = 0; i < train.size(); ++i) {
        (held[i] ? out.validation : out.train).push_back(std::move(train[i]));
    }
    return out;
}

std::vector<LabeledDoc> subsample(std::span<const LabeledDoc> docs, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must be in (0, 1]");
    auto idx = indices_by_class(docs);
    std::vector<bool> keep(docs.size(), false);
    std::mt19937_64 rng(seed);
    for (auto& cls : idx) {
        seeded_shuffle(cls, rng);
        const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * cls.size() + 0.5));
        for (std::size_t i = 0; i < std::min(take, cls.size()); ++i) keep[cls[i]] = true;
    }
    std::vector<LabeledDoc> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (keep[i]) out.push_back(docs[i]);
    }
    return out;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["accuracy"] = accuracy;
    j["n_docs"] = n_docs;
    j["confusion"] = {{"gold_positive", {{"positive", confusion[0][0]}, {"negative", confusion[0][1]}}},
                      {"gold_negative", {{"positive", confusion[1][0]}, {"negative", confusion[1][1]}}}};
    j["wall_time_seconds"] = wall_time_seconds;
    j["peak_memory_bytes"] = peak_memory_bytes;
    return j.dump();
}

EvalReport evaluate(const Model& model, std::span<const LabeledDoc> docs, unsigned threads) {
    if (docs.empty()) throw DataError("empty evaluation set");
    const auto start = std::chrono::steady_clock::now();
    const unsigned parts = detail::resolve_threads(threads);
    std::vector<std::array<std::array<std::uint64_t, 2>, 2>> partial(parts);
    detail::parallel_chunks(docs.size(), parts, [&](unsigned p, std::size_t begin, std::size_t end) {
        auto& cm = partial[p];
        for (std::size_t i = begin; i < end; ++i) {
            ++cm[index_of(docs[i].label)][index_of(model.predict(docs[i].text))];
        }
    });
    EvalReport r;
    for (const auto& cm : partial) {
        for (std::size_t g = 0; g < 2; ++g) {
            for (std::size_t p = 0; p < 2; ++p) r.confusion[g][p] += cm[g][p];
        }
    }
    r.n_docs = docs.size();
    r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / static_cast<double>(r.n_docs);
    r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.peak_memory_bytes = peak_memory_bytes();
    return r;
}

std::uint64_t peak_memory_bytes() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
    return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // Linux reports KiB
}

}  // namespace nbsent
