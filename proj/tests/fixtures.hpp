#ifndef TBKIT_TESTS_FIXTURES_HPP
#define TBKIT_TESTS_FIXTURES_HPP

// Shared test data: the two reference sentences every suite leans on, a
// corpus seeded with one instance of each annotation defect the rewrite
// passes target, and deterministic random generators for property tests.

#include <cctype>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tbkit/conllu.hpp"

namespace fixtures {

using tbkit::MultiwordToken;
using tbkit::Sentence;
using tbkit::Token;
using tbkit::Treebank;

// Gold question with a multiword contraction ("Who's" = Who + 's).
inline const char* kWhosThat =
    "# sent_id = 22497\n"
    "# original_sent_id = 946255\n"
    "# childes_toks = who's that\n"
    "# child_name = Abe\n"
    "# corpus_name = Kuczaj\n"
    "# gold_annotation = True\n"
    "# speaker_age = 43.72369042485472\n"
    "# speaker_gender = male\n"
    "# speaker_role = Father\n"
    "# type = question\n"
    "# text = Who's that?\n"
    "1-2\tWho's\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tWho\twho\tPRON\tWP\t_\t0\troot\t0:root\t_\n"
    "2\t's\tbe\tAUX\tVBZ\t_\t1\tcop\t1:cop\t_\n"
    "3\tthat\tthat\tPRON\tDT\t_\t1\tnsubj\t1:nsubj\tSpaceAfter=No\n"
    "4\t?\t?\tPUNCT\t?\t_\t1\tpunct\t1:punct\t_\n"
    "\n";

// Child utterance with a repetition disfluency ("a a") under reparandum.
inline const char* kGreenOne =
    "# sent_id = 10158\n"
    "# original_sent_id = 16916280\n"
    "# childes_toks = and a a green one\n"
    "# child_name = Lily\n"
    "# corpus_name = Providence\n"
    "# gold_annotation = True\n"
    "# speaker_age = 32.12\n"
    "# speaker_gender = female\n"
    "# speaker_role = Target_Child\n"
    "# type = declarative\n"
    "# text = And a a green one.\n"
    "1\tAnd\tand\tCCONJ\tCC\t_\t5\tcc\t5:cc\t_\n"
    "2\ta\ta\tDET\tDT\t_\t3\treparandum\t3:reparandum\t_\n"
    "3\ta\ta\tDET\tDT\t_\t5\tdet\t5:det\t_\n"
    "4\tgreen\tgreen\tADJ\tJJ\t_\t5\tamod\t5:amod\t_\n"
    "5\tone\tone\tNOUN\tNN\t_\t0\troot\t0:root\tSpaceAfter=No\n"
    "6\t.\t.\tPUNCT\t.\t_\t5\tpunct\t5:punct\t_\n"
    "\n";

inline Sentence whos_that() { return tbkit::parse_conllu(kWhosThat).sentences.at(0); }
inline Sentence green_one() { return tbkit::parse_conllu(kGreenOne).sentences.at(0); }

inline Token tok(int id, std::string form, std::string lemma, std::string upos, std::string xpos,
                 int head, std::string deprel, std::string misc_item = "") {
    Token t;
    t.id = id;
    t.form = std::move(form);
    t.lemma = std::move(lemma);
    t.upos = std::move(upos);
    t.xpos = std::move(xpos);
    t.head = head;
    t.deprel = std::move(deprel);
    if (!misc_item.empty()) t.misc.push_back(std::move(misc_item));
    return t;
}

inline Sentence make_sentence(std::vector<std::pair<std::string, std::string>> meta,
                              std::vector<Token> tokens,
                              std::vector<MultiwordToken> mwts = {}) {
    Sentence s;
    for (auto& [key, value] : meta) s.meta.set(key, value);
    s.tokens = std::move(tokens);
    s.mwts = std::move(mwts);
    return s;
}

// Minimal but fully-specified sentence: complete metadata, consistent text.
inline Sentence seeded(std::string sent_id, std::string original, std::string child,
                       std::string role, std::string type, std::vector<Token> tokens) {
    Sentence s;
    s.tokens = std::move(tokens);
    std::string childes;
    for (const Token& t : s.tokens) {
        if (t.upos == "PUNCT") continue;
        if (!childes.empty()) childes += ' ';
        std::string low = t.form;
        for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        childes += low;
    }
    s.meta.set("sent_id", sent_id);
    s.meta.set("original_sent_id", original);
    s.meta.set("childes_toks", childes);
    s.meta.set("child_name", child);
    s.meta.set("corpus_name", "Brown");
    s.meta.set("gold_annotation", "True");
    s.meta.set("speaker_age", "30.5");
    s.meta.set("speaker_role", role);
    s.meta.set("type", type);
    s.meta.set("text", tbkit::reconstruct_text(s));
    return s;
}

// One sentence per targeted defect class:
//   101: phrasal particle labeled advmod with upos ADP
//   102: contracted auxiliary tagged VERB with surface lemma
//   103: lexical word tagged PUNCT
//   104: deprecated deprel subtype
//   105: function word with a non-exempt dependent
inline Treebank seeded_defect_corpus() {
    Treebank tb;
    tb.sentences.push_back(seeded(
        "101", "901", "Adam", "Mother", "declarative",
        {tok(1, "You", "you", "PRON", "PRP", 2, "nsubj"),
         tok(2, "get", "get", "VERB", "VB", 0, "root"),
         tok(3, "up", "up", "ADP", "RP", 2, "advmod", "SpaceAfter=No"),
         tok(4, ".", ".", "PUNCT", ".", 2, "punct")}));
    tb.sentences.push_back(seeded(
        "102", "902", "Adam", "Mother", "declarative",
        {tok(1, "He", "he", "PRON", "PRP", 3, "nsubj", "SpaceAfter=No"),
         tok(2, "'s", "'s", "VERB", "VBZ", 3, "aux"),
         tok(3, "going", "go", "VERB", "VBG", 0, "root", "SpaceAfter=No"),
         tok(4, ".", ".", "PUNCT", ".", 3, "punct")}));
    tb.sentences.push_back(seeded(
        "103", "903", "Adam", "Target_Child", "declarative",
        {tok(1, "Um", "um", "PUNCT", "UH", 2, "discourse"),
         tok(2, "stop", "stop", "VERB", "VB", 0, "root", "SpaceAfter=No"),
         tok(3, ".", ".", "PUNCT", ".", 2, "punct")}));
    tb.sentences.push_back(seeded(
        "104", "904", "Adam", "Target_Child", "declarative",
        {tok(1, "No", "no", "INTJ", "UH", 2, "reparandum:repetition"),
         tok(2, "no", "no", "INTJ", "UH", 4, "discourse"),
         tok(3, "I", "I", "PRON", "PRP", 4, "nsubj"),
         tok(4, "do", "do", "VERB", "VBP", 0, "root"),
         tok(5, "it", "it", "PRON", "PRP", 4, "obj", "SpaceAfter=No"),
         tok(6, ".", ".", "PUNCT", ".", 4, "punct")}));
    tb.sentences.push_back(seeded(
        "105", "905", "Adam", "Mother", "declarative",
        {tok(1, "I", "I", "PRON", "PRP", 2, "nsubj"),
         tok(2, "want", "want", "VERB", "VBP", 0, "root"),
         tok(3, "to", "to", "PART", "TO", 5, "mark"),
         tok(4, "really", "really", "ADV", "RB", 3, "advmod"),
         tok(5, "go", "go", "VERB", "VB", 2, "xcomp", "SpaceAfter=No"),
         tok(6, ".", ".", "PUNCT", ".", 2, "punct")}));
    return tb;
}

// Twelve sentences covering every reported sentence type, balanced over
// child speech (Target_Child) and child-directed speech.
inline Treebank stats_fixture() {
    struct Row {
        const char* type;
        const char* role;
    };
    const Row rows[] = {
        {"declarative", "Mother"},
        {"declarative", "Target_Child"},
        {"question", "Father"},
        {"self interruption question", "Target_Child"},
        {"trail off question", "Mother"},
        {"interruption question", "Target_Child"},
        {"imperative emphatic", "Mother"},
        {"imperative emphatic", "Target_Child"},
        {"trail off", "Investigator"},
        {"interruption", "Target_Child"},
        {"self interruption", "Father"},
        {"quotation next line", "Target_Child"},
    };
    Treebank tb;
    int id = 1;
    for (const Row& row : rows) {
        Sentence s = make_sentence({{"sent_id", std::to_string(id)},
                                    {"child_name", "Adam"},
                                    {"speaker_role", row.role},
                                    {"type", row.type}},
                                   {tok(1, "ok", "ok", "INTJ", "UH", 0, "root")});
        tb.sentences.push_back(std::move(s));
        ++id;
    }
    return tb;
}

// Same utterance carried by two sources plus one unrelated sentence.
inline Treebank dedup_fixture() {
    Treebank tb;
    Sentence a = make_sentence({{"sent_id", "1"},
                                {"original_sent_id", "555"},
                                {"corpus_name", "Brown"},
                                {"child_name", "Adam"}},
                               {tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
    a.source = "LP23";
    Sentence b = make_sentence({{"sent_id", "2"},
                                {"original_sent_id", "555"},
                                {"corpus_name", "Brown"},
                                {"child_name", "Adam"}},
                               {tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
    b.source = "S+24";
    Sentence c = make_sentence({{"sent_id", "3"},
                                {"original_sent_id", "556"},
                                {"corpus_name", "Brown"},
                                {"child_name", "Adam"}},
                               {tok(1, "bye", "bye", "INTJ", "UH", 0, "root")});
    c.source = "LP23";
    tb.sentences = {std::move(a), std::move(b), std::move(c)};
    return tb;
}

// Scoring example: the third token's head is wrong in pred, so two of
// three tokens survive both metrics (66.7 at one decimal).
inline Treebank eval_gold_example() {
    Treebank tb;
    tb.sentences.push_back(make_sentence({{"sent_id", "e1"}, {"speaker_role", "Target_Child"}},
                                         {tok(1, "I", "I", "PRON", "PRP", 2, "nsubj"),
                                          tok(2, "see", "see", "VERB", "VBP", 0, "root"),
                                          tok(3, "it", "it", "PRON", "PRP", 2, "obj")}));
    return tb;
}

inline Treebank eval_pred_example() {
    Treebank tb = eval_gold_example();
    tb.sentences[0].tokens[2].head = 1;
    return tb;
}

// ---------------------------------------------------------------------------
// Deterministic random corpora

inline Sentence random_valid_sentence(std::mt19937& rng, int index) {
    static const std::vector<std::string> forms = {"the", "a",   "dog", "ball", "go",
                                                   "want", "see", "no",  "up",   "mommy"};
    static const std::vector<std::string> upos = {"NOUN", "VERB", "PRON", "DET",  "ADP",
                                                  "ADV",  "AUX",  "INTJ", "ADJ",  "PART"};
    static const std::vector<std::string> rels = {
        "nsubj",  "obj",       "obl",       "advmod",   "amod",     "det",
        "aux",    "case",      "cc",        "mark",     "cop",      "flat",
        "conj",   "discourse", "compound",  "nmod",     "xcomp",    "dep",
        "nmod:poss", "reparandum:repetition", "parataxis:repeat", "advcl:because"};
    static const std::vector<std::string> types = {
        "declarative", "question", "imperative emphatic", "trail off", "interruption"};
    static const std::vector<std::string> roles = {"Mother", "Father", "Target_Child",
                                                   "Investigator"};
    static const std::vector<std::string> children = {"Adam", "Eve", "Sarah", "Naomi", "Lily"};

    std::uniform_int_distribution<int> len_dist(1, 10);
    const int n = len_dist(rng);
    Sentence s;
    for (int i = 1; i <= n; ++i) {
        std::uniform_int_distribution<std::size_t> form_dist(0, forms.size() - 1);
        std::uniform_int_distribution<std::size_t> upos_dist(0, upos.size() - 1);
        std::uniform_int_distribution<std::size_t> rel_dist(0, rels.size() - 1);
        Token t;
        t.id = i;
        t.form = forms[form_dist(rng)];
        t.lemma = t.form;
        t.upos = upos[upos_dist(rng)];
        t.xpos = "_";
        if (i == 1) {
            t.head = 0;
            t.deprel = "root";
        } else {
            std::uniform_int_distribution<int> head_dist(1, i - 1);
            t.head = head_dist(rng);
            t.deprel = rels[rel_dist(rng)];
        }
        if (i < n && std::uniform_int_distribution<int>(0, 4)(rng) == 0)
            t.misc.push_back("SpaceAfter=No");
        s.tokens.push_back(std::move(t));
    }
    if (n >= 2 && std::uniform_int_distribution<int>(0, 9)(rng) == 0) {
        MultiwordToken m;
        m.start = 1;
        m.end = 2;
        m.form = s.tokens[0].form + s.tokens[1].form;
        s.mwts.push_back(std::move(m));
    }

    std::uniform_int_distribution<std::size_t> type_dist(0, types.size() - 1);
    std::uniform_int_distribution<std::size_t> role_dist(0, roles.size() - 1);
    std::uniform_int_distribution<std::size_t> child_dist(0, children.size() - 1);
    s.meta.set("sent_id", std::to_string(index));
    s.meta.set("original_sent_id", std::to_string(100000 + index));
    std::string childes;
    for (const Token& t : s.tokens) {
        if (!childes.empty()) childes += ' ';
        childes += t.form;
    }
    s.meta.set("childes_toks", childes);
    s.meta.set("child_name", children[child_dist(rng)]);
    s.meta.set("corpus_name", "Synthetic");
    s.meta.set("gold_annotation", std::uniform_int_distribution<int>(0, 1)(rng) ? "True" : "False");
    s.meta.set("speaker_age", "28.0");
    s.meta.set("speaker_role", roles[role_dist(rng)]);
    s.meta.set("type", types[type_dist(rng)]);
    s.meta.set("text", tbkit::reconstruct_text(s));
    return s;
}

inline Treebank random_valid_treebank(std::mt19937& rng, int count, int first_index = 1) {
    Treebank tb;
    for (int i = 0; i < count; ++i)
        tb.sentences.push_back(random_valid_sentence(rng, first_index + i));
    return tb;
}

// Gold/pred pair over identical forms with independently drawn trees.
inline std::pair<Sentence, Sentence> random_scored_pair(std::mt19937& rng, int index) {
    static const std::vector<std::string> rels = {"nsubj", "obj", "advmod", "det", "punct", "dep"};
    std::uniform_int_distribution<int> len_dist(1, 10);
    const int n = len_dist(rng);
    Sentence gold;
    gold.meta.set("sent_id", std::to_string(index));
    gold.meta.set("speaker_role",
                  std::uniform_int_distribution<int>(0, 1)(rng) ? "Target_Child" : "Mother");
    for (int i = 1; i <= n; ++i) {
        Token t;
        t.id = i;
        t.form = "w" + std::to_string(i);
        t.lemma = t.form;
        t.upos = "NOUN";
        gold.tokens.push_back(std::move(t));
    }
    Sentence pred = gold;
    auto draw_tree = [&](Sentence& s) {
        std::uniform_int_distribution<std::size_t> rel_dist(0, rels.size() - 1);
        for (Token& t : s.tokens) {
            if (t.id == 1) {
                t.head = 0;
                t.deprel = "root";
            } else {
                std::uniform_int_distribution<int> head_dist(1, t.id - 1);
                t.head = head_dist(rng);
                t.deprel = rels[rel_dist(rng)];
            }
        }
    };
    draw_tree(gold);
    draw_tree(pred);
    return {std::move(gold), std::move(pred)};
}

}  // namespace fixtures

#endif
