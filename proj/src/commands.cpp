#include "nbsent/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace nbsent {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_score(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
    if (!f) throw DataError("I/O error writing " + path.string());
}

void append_line(const std::filesystem::path& path, const std::string& line) {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw DataError("cannot write " + path.string());
    f << line << '\n';
}

double mib(std::uint64_t bytes) { return static_cast<double>(bytes) / (1024.0 * 1024.0); }

}  // namespace

TrainOutcome train_model(std::span<const LabeledDoc> docs, const RunConfig& cfg) {
    TrainOutcome out;
    auto start = Clock::now();
    CountTable table = train(docs, cfg.train, cfg.threads);
    out.count_seconds = seconds_since(start);
    out.features_counted = table.size();

    if (!cfg.selection_enabled) {
        out.features_after_prune = table.size();
        out.features_selected = table.size();
        out.model = Model::build(std::move(table), cfg.smoothing, cfg.denominator_policy);
        return out;
    }
    start = Clock::now();
    prune_singletons_in_place(table, cfg.selection.min_doc_freq);
    out.features_after_prune = table.size();
    const auto selected = select_top_k(table, cfg.selection, cfg.threads);
    out.features_selected = selected.size();
    out.model = Model::build(table, selected, cfg.smoothing, cfg.denominator_policy);
    out.select_seconds = seconds_since(start);
    return out;
}

std::vector<AblationStage> ablation_stages(const RunConfig& base) {
    std::vector<AblationStage> stages;
    RunConfig c = base;
    c.train.mode = CountMode::Multinomial;
    c.train.pipeline.negator_words.clear();
    c.train.bootstrap = false;
    c.train.pipeline.n_max = 1;
    c.selection_enabled = false;
    stages.push_back({"Original Naive Bayes algorithm with Laplacian Smoothing", c});

    c.train.pipeline.negator_words = PipelineConfig::minimal_negators();
    c.train.bootstrap = true;
    stages.push_back({"Handling negations", c});

    c.train.mode = CountMode::Bernoulli;
    stages.push_back({"Bernoulli Naive Bayes", c});

    c.train.pipeline.n_max = 3;
    stages.push_back({"Bigrams and trigrams", c});

    c.selection_enabled = true;
    stages.push_back({"Feature Selection", c});
    return stages;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    if (cfg.model_path.empty()) throw std::invalid_argument("--model is required");
    const auto total_start = Clock::now();
    auto docs = load_split(cfg.data_root, Split::Train);
    out << "loaded " << docs.size() << " training documents\n";

    std::optional<TrainOutcome> final_outcome;
    if (cfg.validation_size > 0) {
        auto split = split_validation(docs, cfg.validation_size, cfg.seed);
        auto holdout = train_model(split.train, cfg);
        const auto report = evaluate(holdout.model, split.validation, cfg.threads);
        out << "holdout: trained on " << split.train.size() << ", validation accuracy " << std::fixed
            << std::setprecision(4) << report.accuracy << " on " << split.validation.size() << " documents\n"
            << std::defaultfloat;
        if (!cfg.retrain_full) final_outcome = std::move(holdout);
    }
    if (!final_outcome) final_outcome = train_model(docs, cfg);

    const auto& o = *final_outcome;
    out << "features counted:     " << o.features_counted << '\n';
    out << "after pruning:        " << o.features_after_prune << '\n';
    out << "selected:             " << o.features_selected << '\n';
    out << std::fixed << std::setprecision(2);
    out << "count pass:           " << o.count_seconds << " s\n";
    out << "prune + select:       " << o.select_seconds << " s\n";
    out << "total wall time:      " << seconds_since(total_start) << " s\n";
    out << "peak memory:          " << mib(peak_memory_bytes()) << " MiB\n" << std::defaultfloat;
    save(o.model, cfg.model_path);
    out << "model written to " << cfg.model_path.string() << '\n';
    return 0;
}

EvalReport cmd_evaluate(const RunConfig& cfg, Split split, std::ostream& out) {
    if (cfg.model_path.empty()) throw std::invalid_argument("--model is required");
    const Model model = load(cfg.model_path);
    const auto docs = load_split(cfg.data_root, split);
    const auto report = evaluate(model, docs, cfg.threads);
    out << "split " << to_string(split) << ": " << report.n_docs << " documents, accuracy " << std::fixed
        << std::setprecision(4) << report.accuracy << std::defaultfloat << '\n';
    out << "confusion (gold x predicted): pos/pos " << report.confusion[0][0] << ", pos/neg " << report.confusion[0][1]
        << ", neg/pos " << report.confusion[1][0] << ", neg/neg " << report.confusion[1][1] << '\n';
    const auto json = report.to_json();
    out << json << '\n';
    if (!cfg.out_path.empty()) append_line(cfg.out_path, json);
    return report;
}

void cmd_predict(const Model& model, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto scores = model.score(line);
        out << to_string(argmax(scores)) << '\t' << format_score(scores[ClassLabel::Positive]) << '\t'
            << format_score(scores[ClassLabel::Negative]) << '\n';
    }
}

std::string sweep_csv(std::span<const SweepPoint> points) {
    std::ostringstream ss;
    ss << "k,accuracy\n";
    for (const auto& p : points) ss << p.k << ',' << format_score(p.accuracy) << '\n';
    return ss.str();
}

std::string sweep_gnuplot(const std::string& csv_name) {
    std::ostringstream ss;
    ss << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set logscale x 2\n"
       << "set xlabel 'number of features (k)'\n"
       << "set ylabel 'validation accuracy'\n"
       << "set grid\n"
       << "plot '" << csv_name << "' using 1:2 with linespoints title 'accuracy'\n";
    return ss.str();
}

std::vector<SweepPoint> cmd_sweep(const RunConfig& cfg, std::span<const std::size_t> ks, std::ostream& out) {
    if (cfg.validation_size == 0) throw std::invalid_argument("sweep needs --validation-size > 0");
    auto split = split_validation(load_split(cfg.data_root, Split::Train), cfg.validation_size, cfg.seed);
    const auto start = Clock::now();
    CountTable table = train(split.train, cfg.train, cfg.threads);
    const std::size_t counted = table.size();
    prune_singletons_in_place(table, cfg.selection.min_doc_freq);
    const auto points = sweep_k(table, split.validation, ks, cfg.smoothing, cfg.denominator_policy, cfg.threads);
    std::clog << "sweep: " << counted << " features counted, " << table.size() << " after pruning, "
              << points.size() << " points in " << std::fixed << std::setprecision(2) << seconds_since(start)
              << " s\n"
              << std::defaultfloat;

    const auto csv = sweep_csv(points);
    out << csv;
    if (!cfg.out_path.empty()) {
        write_text_file(cfg.out_path, csv);
        auto script = cfg.out_path;
        script.replace_extension(".gp");
        write_text_file(script, sweep_gnuplot(cfg.out_path.filename().string()));
    }
    return points;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
    std::ostringstream ss;
    ss << "stage,name,accuracy,features,train_seconds,test_seconds\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        ss << (i + 1) << ",\"" << r.stage << "\"," << format_score(r.accuracy) << ',' << r.features << ','
           << std::fixed << std::setprecision(3) << r.train_seconds << ',' << r.test_seconds << std::defaultfloat
           << '\n';
    }
    return ss.str();
}

std::vector<AblationRow> cmd_ablate(const RunConfig& cfg, std::ostream& out) {
    const auto train_docs = load_split(cfg.data_root, Split::Train);
    const auto test_docs = load_split(cfg.data_root, Split::Test);
    std::vector<AblationRow> rows;
    for (const auto& stage : ablation_stages(cfg)) {
        AblationRow row;
        row.stage = stage.name;
        const auto start = Clock::now();
        auto outcome = train_model(train_docs, stage.config);
        row.train_seconds = seconds_since(start);
        row.features = outcome.features_selected;
        const auto report = evaluate(outcome.model, test_docs, cfg.threads);
        row.accuracy = report.accuracy;
        row.test_seconds = report.wall_time_seconds;
        out << std::left << std::setw(58) << stage.name << std::right << std::fixed << std::setprecision(2)
            << std::setw(7) << 100.0 * row.accuracy << "%  (" << row.features << " features)\n"
            << std::defaultfloat;
        rows.push_back(std::move(row));
    }
    const auto csv = ablation_csv(rows);
    if (!cfg.out_path.empty()) write_text_file(cfg.out_path, csv);
    return rows;
}

BenchReport cmd_bench(const RunConfig& cfg, std::ostream& out) {
    BenchReport r;
    const auto train_docs = load_split(cfg.data_root, Split::Train);
    const auto test_docs = load_split(cfg.data_root, Split::Test);
    out << std::fixed << std::setprecision(3);

    for (const double fraction : {0.25, 0.5, 1.0}) {
        const auto part = fraction < 1.0 ? subsample(train_docs, fraction, cfg.seed) : train_docs;
        const auto start = Clock::now();
        const auto table = train(part, cfg.train, cfg.threads);
        const double secs = seconds_since(start);
        r.train_seconds_by_fraction.emplace_back(fraction, secs);
        out << "count pass on " << std::setw(3) << static_cast<int>(fraction * 100) << "% (" << part.size()
            << " docs, " << table.size() << " features): " << secs << " s\n";
    }
    r.train_seconds = r.train_seconds_by_fraction.back().second;

    const auto outcome = train_model(train_docs, cfg);
    const auto report = evaluate(outcome.model, test_docs, cfg.threads);
    r.test_seconds = report.wall_time_seconds;
    r.test_docs = report.n_docs;
    r.docs_per_second = r.test_seconds > 0 ? static_cast<double>(report.n_docs) / r.test_seconds : 0.0;
    out << "classification: " << report.n_docs << " docs in " << r.test_seconds << " s (" << std::setprecision(0)
        << r.docs_per_second << " docs/s), accuracy " << std::setprecision(4) << report.accuracy << '\n'
        << std::setprecision(3);

    // Latency at two document lengths built by concatenating test reviews.
    std::string stream;
    for (const auto& d : test_docs) {
        stream += d.text;
        stream += ' ';
        if (stream.size() > (1u << 22)) break;
    }
    std::vector<std::string_view> words;
    for (std::size_t i = 0; i < stream.size();) {
        const auto j = stream.find(' ', i);
        const auto end = j == std::string::npos ? stream.size() : j;
        if (end > i) words.emplace_back(stream.data() + i, end - i);
        i = end + 1;
    }
    r.scaling_lengths = {200, 1600};
    for (std::size_t s = 0; s < 2; ++s) {
        const std::size_t len = r.scaling_lengths[s];
        const std::size_t n_docs = 200;
        std::vector<std::string> synthetic(n_docs);
        for (std::size_t d = 0; d < n_docs && !words.empty(); ++d) {
            for (std::size_t w = 0; w < len; ++w) {
                synthetic[d] += words[(d * 7919 + w) % words.size()];
                synthetic[d] += ' ';
            }
        }
        const auto start = Clock::now();
        std::size_t positives = 0;
        for (const auto& doc : synthetic) positives += outcome.model.predict(doc) == ClassLabel::Positive;
        r.scaling_us_per_doc[s] = 1e6 * seconds_since(start) / n_docs;
        out << "latency at " << len << " words: " << r.scaling_us_per_doc[s] << " us/doc (" << positives
            << " positive)\n";
    }
    if (r.scaling_us_per_doc[0] > 0) {
        out << "latency ratio " << r.scaling_us_per_doc[1] / r.scaling_us_per_doc[0] << " for length ratio "
            << static_cast<double>(r.scaling_lengths[1]) / r.scaling_lengths[0] << '\n';
    }
    r.peak_memory_bytes = peak_memory_bytes();
    out << "peak memory: " << std::setprecision(1) << mib(r.peak_memory_bytes) << " MiB\n" << std::defaultfloat;
    return r;
}

}  // namespace nbsent
