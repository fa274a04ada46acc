// Python module _core: bindings for the treebank toolkit. Token and
// sentence containers are bound as live views so in-place edits from
// Python stick; everything else converts by value.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl_bind.h>

#include "tbkit/conllu.hpp"
#include "tbkit/corpus_ops.hpp"
#include "tbkit/evaluator.hpp"
#include "tbkit/harmonizer.hpp"
#include "tbkit/validator.hpp"

namespace py = pybind11;
using namespace tbkit;

PYBIND11_MAKE_OPAQUE(std::vector<Token>);
PYBIND11_MAKE_OPAQUE(std::vector<Sentence>);

namespace {

HarmonizeConfig make_config(const std::optional<std::vector<std::string>>& passes,
                            const std::string& source_version, const std::string& subrel_misc_key) {
    HarmonizeConfig cfg;
    if (passes) cfg.passes = *passes;
    if (source_version == "v1")
        cfg.source_guidelines_version = GuidelinesVersion::v1;
    else if (source_version == "v2")
        cfg.source_guidelines_version = GuidelinesVersion::v2;
    else
        throw Error("source_version must be 'v1' or 'v2'");
    cfg.subrel_misc_key = subrel_misc_key;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Parsing, validation, harmonization, merging, splitting and "
              "scoring of CoNLL-U dependency treebanks";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::bind_vector<std::vector<Token>>(m, "TokenList");
    py::bind_vector<std::vector<Sentence>>(m, "SentenceList");

    py::class_<Token>(m, "Token")
        .def(py::init<>())
        .def_readwrite("id", &Token::id)
        .def_readwrite("form", &Token::form)
        .def_readwrite("lemma", &Token::lemma)
        .def_readwrite("upos", &Token::upos)
        .def_readwrite("xpos", &Token::xpos)
        .def_readwrite("feats", &Token::feats)
        .def_readwrite("head", &Token::head)
        .def_readwrite("deprel", &Token::deprel)
        .def_readwrite("deps", &Token::deps)
        .def_readwrite("misc", &Token::misc)
        .def("__repr__", [](const Token& t) {
            return "<Token " + std::to_string(t.id) + " '" + t.form + "' " + t.upos + " " +
                   std::to_string(t.head) + ":" + t.deprel + ">";
        });

    py::class_<MultiwordToken>(m, "MultiwordToken")
        .def(py::init<>())
        .def_readwrite("start", &MultiwordToken::start)
        .def_readwrite("end", &MultiwordToken::end)
        .def_readwrite("form", &MultiwordToken::form)
        .def_readwrite("misc", &MultiwordToken::misc);

    py::class_<Sentence>(m, "Sentence")
        .def(py::init<>())
        .def_readwrite("tokens", &Sentence::tokens)
        .def_readwrite("mwts", &Sentence::mwts)
        .def_readwrite("source", &Sentence::source)
        .def_property_readonly("sent_id", [](const Sentence& s) { return s.meta.sent_id(); })
        .def("meta_get", [](const Sentence& s, const std::string& key) { return s.meta.get(key); })
        .def("meta_set",
             [](Sentence& s, const std::string& key, const std::string& value) {
                 s.meta.set(key, value);
             })
        .def("text", [](const Sentence& s) { return reconstruct_text(s); })
        .def("root_id", &Sentence::root_id)
        .def("__len__", [](const Sentence& s) { return s.tokens.size(); })
        .def("__repr__", [](const Sentence& s) {
            return "<Sentence " + (s.meta.sent_id().empty() ? "?" : s.meta.sent_id()) + ", " +
                   std::to_string(s.tokens.size()) + " tokens>";
        });

    py::class_<Treebank>(m, "Treebank")
        .def(py::init<>())
        .def_readwrite("sentences", &Treebank::sentences)
        .def_readwrite("source_label", &Treebank::source_label)
        .def("__len__", [](const Treebank& tb) { return tb.sentences.size(); })
        .def("__repr__", [](const Treebank& tb) {
            return "<Treebank of " + std::to_string(tb.sentences.size()) + " sentences>";
        });

    m.def("parse", &parse_conllu, py::arg("text"), py::arg("source_label") = std::string(),
          "Parse CoNLL-U text into a Treebank");
    m.def(
        "load",
        [](const std::string& root, const std::string& glob) {
            LoadOptions opts;
            opts.glob = glob;
            return load_corpus(root, opts).treebank;
        },
        py::arg("root"), py::arg("glob") = std::string("*.conllu"),
        "Load every matching file under a directory (or a single file)");
    m.def("serialize", &serialize_conllu, py::arg("treebank"), "Render a Treebank as CoNLL-U text");
    m.def("serialize_sentence", &serialize_sentence, py::arg("sentence"));

    py::class_<ValidationIssue>(m, "ValidationIssue")
        .def_property_readonly("code",
                               [](const ValidationIssue& i) { return std::string(to_string(i.code)); })
        .def_property_readonly(
            "severity", [](const ValidationIssue& i) { return std::string(to_string(i.severity)); })
        .def_readonly("sent_id", &ValidationIssue::sent_id)
        .def_readonly("token_id", &ValidationIssue::token_id)
        .def_readonly("message", &ValidationIssue::message)
        .def("__repr__", [](const ValidationIssue& i) { return "<" + issue_to_text(i) + ">"; });

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("issues", &ValidationReport::issues)
        .def_readonly("sentences_checked", &ValidationReport::sentences_checked)
        .def("error_count", &ValidationReport::error_count)
        .def("warning_count", &ValidationReport::warning_count);

    m.def(
        "validate",
        [](const Treebank& tb, const std::string& rules, const std::string& matrix_path) {
            const RuleSet ruleset = rules.empty() ? RuleSet{} : RuleSet::from_csv(rules);
            const UposDeprelMatrix matrix = matrix_path.empty()
                                                ? UposDeprelMatrix::builtin()
                                                : UposDeprelMatrix::load_file(matrix_path);
            return validate(tb, ruleset, matrix);
        },
        py::arg("treebank"), py::arg("rules") = std::string(),
        py::arg("matrix_path") = std::string(),
        "Run the validator; `rules` is a comma-separated rule subset");

    py::class_<ChangeLogEntry>(m, "ChangeLogEntry")
        .def_readonly("sent_id", &ChangeLogEntry::sent_id)
        .def_readonly("token_id", &ChangeLogEntry::token_id)
        .def_readonly("pass_name", &ChangeLogEntry::pass)
        .def_readonly("field", &ChangeLogEntry::field)
        .def_readonly("old_value", &ChangeLogEntry::old_value)
        .def_readonly("new_value", &ChangeLogEntry::new_value)
        .def("__repr__", [](const ChangeLogEntry& e) { return "<" + change_to_text(e) + ">"; });

    py::class_<HarmonizeError>(m, "HarmonizeError")
        .def_readonly("sent_id", &HarmonizeError::sent_id)
        .def_readonly("pass_name", &HarmonizeError::pass)
        .def_readonly("message", &HarmonizeError::message);

    py::class_<HarmonizeResult>(m, "HarmonizeResult")
        .def_readonly("treebank", &HarmonizeResult::treebank)
        .def_readonly("changes", &HarmonizeResult::changes)
        .def_readonly("errors", &HarmonizeResult::errors);

    m.def(
        "harmonize",
        [](const Treebank& tb, const std::optional<std::vector<std::string>>& passes,
           const std::string& source_version, const std::string& subrel_misc_key) {
            return harmonize(tb, make_config(passes, source_version, subrel_misc_key));
        },
        py::arg("treebank"), py::arg("passes") = std::nullopt,
        py::arg("source_version") = std::string("v2"),
        py::arg("subrel_misc_key") = std::string("SubRel"),
        "Apply the harmonization passes in canonical order");

    m.def(
        "deduplicate",
        [](const Treebank& tb, const std::vector<std::string>& priority) {
            DedupResult r = deduplicate(tb, priority);
            return py::make_tuple(r.treebank, r.removed, r.warnings);
        },
        py::arg("treebank"), py::arg("priority") = std::vector<std::string>{},
        "Returns (treebank, removed_count, warnings)");
    m.def("renumber", &renumber, py::arg("treebank"));

    m.def(
        "split",
        [](const Treebank& tb, const std::vector<std::string>& test_children, double dev_fraction) {
            SplitSpec spec;
            spec.test_children = test_children;
            spec.dev_fraction = dev_fraction;
            SplitResult r = split(tb, spec);
            return py::make_tuple(r.train, r.dev, r.test);
        },
        py::arg("treebank"),
        py::arg("test_children") = std::vector<std::string>{"Eve", "Violet", "Emma", "Thomas"},
        py::arg("dev_fraction") = 0.10, "Returns (train, dev, test)");

    py::class_<StatsTable>(m, "StatsTable")
        .def_property_readonly("columns", [](const StatsTable& t) { return t.columns; })
        .def_property_readonly("rows",
                               [](const StatsTable& t) {
                                   py::list rows;
                                   for (const auto& r : t.rows)
                                       rows.append(py::make_tuple(r.label, r.values));
                                   return rows;
                               })
        .def("to_text", &StatsTable::to_text)
        .def("to_csv", &StatsTable::to_csv);

    m.def("sentence_type_stats", &sentence_type_stats, py::arg("treebank"));
    m.def("corpus_profile", &corpus_profile, py::arg("treebank"));

    py::class_<AttachmentScores>(m, "AttachmentScores")
        .def_readonly("tokens_total", &AttachmentScores::tokens_total)
        .def_readonly("head_correct", &AttachmentScores::head_correct)
        .def_readonly("head_and_label_correct", &AttachmentScores::head_and_label_correct)
        .def("uas", &AttachmentScores::uas)
        .def("las", &AttachmentScores::las)
        .def("__repr__", [](const AttachmentScores& s) {
            return "<AttachmentScores LAS " + percent1(s.las()) + " UAS " + percent1(s.uas()) +
                   " over " + std::to_string(s.tokens_total) + " tokens>";
        });

    py::class_<GroupedScores>(m, "GroupedScores")
        .def_readonly("groups", &GroupedScores::groups)
        .def_readonly("overall", &GroupedScores::overall)
        .def("to_text", [](const GroupedScores& s) { return scores_to_text(s); })
        .def("to_csv", [](const GroupedScores& s) { return scores_to_csv(s); });

    m.def(
        "score",
        [](const Treebank& gold, const Treebank& pred, const std::string& group_by,
           bool include_punct) {
            const Grouping grouping = group_by == "none" ? Grouping::none : Grouping::speaker;
            return score(gold, pred, grouping, include_punct);
        },
        py::arg("gold"), py::arg("pred"), py::arg("group_by") = std::string("speaker"),
        py::arg("include_punct") = true, "LAS/UAS of pred against gold");
}
