#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nbsent/commands.hpp"

namespace py = pybind11;
using namespace nbsent;

namespace {

py::tuple pair_of(const ClassCounts& c) { return py::make_tuple(c[ClassLabel::Positive], c[ClassLabel::Negative]); }

py::tuple pair_of(const ClassScores& s) { return py::make_tuple(s[ClassLabel::Positive], s[ClassLabel::Negative]); }

}  // namespace

PYBIND11_MODULE(_nbsent, m) {
    m.doc() = "Naive Bayes sentiment classifier core";

    auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<ModelFormatError>(m, "ModelFormatError", data_error.ptr());

    py::enum_<ClassLabel>(m, "ClassLabel")
        .value("positive", ClassLabel::Positive)
        .value("negative", ClassLabel::Negative);
    py::enum_<CountMode>(m, "CountMode")
        .value("multinomial", CountMode::Multinomial)
        .value("bernoulli", CountMode::Bernoulli);
    py::enum_<DenominatorPolicy>(m, "DenominatorPolicy")
        .value("fixed_at_training", DenominatorPolicy::FixedAtTraining)
        .value("recomputed_over_selected", DenominatorPolicy::RecomputedOverSelected);
    py::enum_<Split>(m, "Split").value("train", Split::Train).value("test", Split::Test);

    py::class_<LabeledDoc>(m, "LabeledDoc")
        .def(py::init<>())
        .def(py::init([](std::string id, std::string text, ClassLabel label) {
                 return LabeledDoc{std::move(id), std::move(text), label};
             }),
             py::arg("id"), py::arg("text"), py::arg("label"))
        .def_readwrite("id", &LabeledDoc::id)
        .def_readwrite("text", &LabeledDoc::text)
        .def_readwrite("label", &LabeledDoc::label)
        .def("__repr__", [](const LabeledDoc& d) {
            return "LabeledDoc(" + d.id + ", " + std::string(to_string(d.label)) + ")";
        });

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("n_max", &PipelineConfig::n_max)
        .def_readwrite("negator_words", &PipelineConfig::negator_words)
        .def_readwrite("reset_punctuation", &PipelineConfig::reset_punctuation)
        .def_readwrite("lowercase", &PipelineConfig::lowercase)
        .def("validate", &PipelineConfig::validate)
        .def(py::self == py::self);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("pipeline", &TrainConfig::pipeline)
        .def_readwrite("mode", &TrainConfig::mode)
        .def_readwrite("bootstrap", &TrainConfig::bootstrap)
        .def_readwrite("bootstrap_ngrams", &TrainConfig::bootstrap_ngrams);

    py::class_<SmoothingConfig>(m, "SmoothingConfig")
        .def(py::init<>())
        .def(py::init([](double k) { return SmoothingConfig{k}; }), py::arg("k"))
        .def_readwrite("k", &SmoothingConfig::k);

    py::class_<SelectionConfig>(m, "SelectionConfig")
        .def(py::init<>())
        .def(py::init([](std::uint32_t min_doc_freq, std::size_t top_k) { return SelectionConfig{min_doc_freq, top_k}; }),
             py::arg("min_doc_freq"), py::arg("top_k"))
        .def_readwrite("min_doc_freq", &SelectionConfig::min_doc_freq)
        .def_readwrite("top_k", &SelectionConfig::top_k);

    // text pipeline
    m.def("tokenize", &tokenize, py::arg("text"), py::arg("config") = PipelineConfig{});
    m.def(
        "apply_negation",
        [](const std::vector<std::string>& tokens, const PipelineConfig& cfg) {
            auto out = apply_negation(tokens, cfg);
            return py::make_tuple(out.tokens, out.breaks);
        },
        py::arg("tokens"), py::arg("config") = PipelineConfig{},
        "Returns (tokens, breaks); breaks are positions where punctuation was removed.");
    m.def(
        "ngrams",
        [](const std::vector<std::string>& tokens, int n_max, const std::vector<std::size_t>& breaks) {
            std::vector<std::pair<std::string, int>> out;
            for (auto& f : ngrams(NegatedTokens{tokens, breaks}, n_max)) out.emplace_back(std::move(f.text), f.order);
            return out;
        },
        py::arg("tokens"), py::arg("n_max"), py::arg("breaks") = std::vector<std::size_t>{});
    m.def("featurize", &featurize, py::arg("text"), py::arg("config") = PipelineConfig{});
    m.def(
        "featurize_counts",
        [](std::string_view text, const PipelineConfig& cfg) {
            std::vector<std::pair<std::string, std::uint32_t>> out;
            for (auto& f : featurize_counts(text, cfg)) out.emplace_back(std::move(f.text), f.count);
            return out;
        },
        py::arg("text"), py::arg("config") = PipelineConfig{});
    m.def("toggle_negation", py::overload_cast<std::string_view>(&toggle_negation), py::arg("feature"));

    // counting
    py::class_<CountTable>(m, "CountTable")
        .def(py::init<TrainConfig>(), py::arg("config") = TrainConfig{})
        .def_property_readonly("config", &CountTable::config)
        .def("count", &CountTable::count, py::arg("feature"), py::arg("label"))
        .def("counts", [](const CountTable& t, std::string_view f) { return pair_of(t.counts(f)); })
        .def("mass", &CountTable::mass)
        .def("docs", &CountTable::docs)
        .def("add_document", &CountTable::add_document, py::arg("text"), py::arg("label"))
        .def("add_doc_count", &CountTable::add_doc_count, py::arg("label"), py::arg("n") = 1)
        .def("merge", &CountTable::merge)
        .def("features",
             [](const CountTable& t) {
                 py::dict d;
                 for (const auto& [f, c] : t.features()) d[py::str(f)] = pair_of(c);
                 return d;
             })
        .def("__len__", &CountTable::size)
        .def(py::self == py::self);

    m.def(
        "train",
        [](const std::vector<LabeledDoc>& docs, const TrainConfig& cfg, unsigned threads) {
            py::gil_scoped_release release;
            return train(docs, cfg, threads);
        },
        py::arg("docs"), py::arg("config") = TrainConfig{}, py::arg("threads") = 1);

    py::class_<Model>(m, "Model")
        .def_static(
            "build",
            [](const CountTable& t, const SmoothingConfig& s, DenominatorPolicy p) { return Model::build(t, s, p); },
            py::arg("table"), py::arg("smoothing") = SmoothingConfig{},
            py::arg("policy") = DenominatorPolicy::FixedAtTraining)
        .def_static(
            "build_selected",
            [](const CountTable& t, const std::vector<std::string>& vocab, const SmoothingConfig& s,
               DenominatorPolicy p) { return Model::build(t, vocab, s, p); },
            py::arg("table"), py::arg("vocabulary"), py::arg("smoothing") = SmoothingConfig{},
            py::arg("policy") = DenominatorPolicy::FixedAtTraining)
        .def_property_readonly("train_config", &Model::train_config)
        .def_property_readonly("smoothing", &Model::smoothing)
        .def_property_readonly("denominator_policy", &Model::denominator_policy)
        .def("docs", &Model::docs)
        .def("mass", &Model::mass)
        .def("training_mass", &Model::training_mass)
        .def("log_prior", &Model::log_prior)
        .def("vocabulary",
             [](const Model& model) {
                 py::dict d;
                 for (const auto& [f, e] : model.vocabulary()) d[py::str(f)] = pair_of(e.counts);
                 return d;
             })
        .def("__len__", [](const Model& model) { return model.vocabulary().size(); })
        .def(
            "score", [](const Model& model, std::string_view text) { return pair_of(model.score(text)); },
            py::arg("text"), "(log score positive, log score negative)")
        .def("predict", &Model::predict, py::arg("text"))
        .def("to_string", &model_to_string)
        .def_static("from_string", &model_from_string, py::arg("text"));

    m.def("save", &save, py::arg("model"), py::arg("path"));
    m.def("load", &load, py::arg("path"));

    // feature selection
    py::class_<ContingencyTable>(m, "ContingencyTable")
        .def(py::init([](std::uint64_t n11, std::uint64_t n10, std::uint64_t n01, std::uint64_t n00) {
                 return ContingencyTable{n11, n10, n01, n00};
             }),
             py::arg("n11"), py::arg("n10"), py::arg("n01"), py::arg("n00"))
        .def_readwrite("n11", &ContingencyTable::n11)
        .def_readwrite("n10", &ContingencyTable::n10)
        .def_readwrite("n01", &ContingencyTable::n01)
        .def_readwrite("n00", &ContingencyTable::n00)
        .def(py::self == py::self);
    m.def("contingency", py::overload_cast<const CountTable&, std::string_view>(&contingency), py::arg("table"),
          py::arg("feature"));
    m.def("mutual_information", &mutual_information, py::arg("table"));
    m.def("prune_singletons", &prune_singletons, py::arg("table"), py::arg("min_doc_freq") = 2);
    m.def(
        "rank_features",
        [](const CountTable& t, std::size_t limit, unsigned threads) {
            std::vector<std::tuple<std::string, double, std::uint64_t>> out;
            for (auto& r : rank_features(t, limit, threads)) out.emplace_back(std::move(r.text), r.mi, r.doc_freq);
            return out;
        },
        py::arg("table"), py::arg("limit"), py::arg("threads") = 1, "[(feature, mi, doc_freq)] best first");
    m.def("select_top_k", &select_top_k, py::arg("table"), py::arg("config") = SelectionConfig{},
          py::arg("threads") = 1);
    m.def(
        "sweep_k",
        [](const CountTable& t, const std::vector<LabeledDoc>& validation, const std::vector<std::size_t>& ks,
           const SmoothingConfig& s, DenominatorPolicy p, unsigned threads) {
            std::vector<std::pair<std::size_t, double>> out;
            for (const auto& pt : sweep_k(t, validation, ks, s, p, threads)) out.emplace_back(pt.k, pt.accuracy);
            return out;
        },
        py::arg("table"), py::arg("validation"), py::arg("ks"), py::arg("smoothing") = SmoothingConfig{},
        py::arg("policy") = DenominatorPolicy::FixedAtTraining, py::arg("threads") = 1);

    // corpus
    m.def("load_split", &load_split, py::arg("root"), py::arg("split"));
    m.def(
        "split_validation",
        [](std::vector<LabeledDoc> docs, std::size_t n, std::uint64_t seed) {
            auto s = split_validation(std::move(docs), n, seed);
            return py::make_tuple(s.train, s.validation);
        },
        py::arg("docs"), py::arg("n"), py::arg("seed") = 42, "Returns (train, validation).");
    m.def(
        "subsample", [](const std::vector<LabeledDoc>& d, double f, std::uint64_t s) { return subsample(d, f, s); },
        py::arg("docs"), py::arg("fraction"), py::arg("seed") = 42);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("accuracy", &EvalReport::accuracy)
        .def_readonly("confusion", &EvalReport::confusion)
        .def_readonly("n_docs", &EvalReport::n_docs)
        .def_readonly("wall_time_seconds", &EvalReport::wall_time_seconds)
        .def_readonly("peak_memory_bytes", &EvalReport::peak_memory_bytes)
        .def("to_json", &EvalReport::to_json);
    m.def(
        "evaluate",
        [](const Model& model, const std::vector<LabeledDoc>& docs, unsigned threads) {
            py::gil_scoped_release release;
            return evaluate(model, docs, threads);
        },
        py::arg("model"), py::arg("docs"), py::arg("threads") = 1);
}
