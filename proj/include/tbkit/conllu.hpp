#ifndef TBKIT_CONLLU_HPP
#define TBKIT_CONLLU_HPP

// Data model and I/O for CoNLL-U dependency treebanks with CHILDES-style
// sentence metadata.
//
// File format: sentence blocks separated by one blank line. A block is a
// run of comment lines ("# key = value" or free comments) followed by
// 10-column tab-separated token lines. Multiword token ranges ("i-j") are
// supported; empty nodes (decimal ids) are rejected. Newlines are
// normalized to LF on input and the serializer always emits LF, so files
// already in canonical form round-trip byte-identically.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tbkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse failure; `line` is 1-based within the parsed text.
struct ParseError : Error {
    ParseError(std::size_t line_no, const std::string& reason);
    std::size_t line;
};

// The 17 universal POS tags.
bool is_universal_upos(std::string_view tag);

// Relation label up to the first ':' ("aux:pass" -> "aux").
std::string_view deprel_base(std::string_view deprel);

// One syntactic word. FEATS, DEPS and MISC keep their items in file order;
// an empty list serializes as "_". FORM/LEMMA/UPOS/XPOS/DEPREL hold the
// raw column text (a literal "_" stays "_").
struct Token {
    int id = 0;          // 1-based surface position
    std::string form = "_";
    std::string lemma = "_";
    std::string upos = "_";
    std::string xpos = "_";
    std::vector<std::string> feats;                 // "Key=Value" items
    int head = 0;        // 0 = root
    std::string deprel = "root";
    std::vector<std::pair<int, std::string>> deps;  // (head, relation)
    std::vector<std::string> misc;                  // raw items

    bool misc_has(std::string_view key) const;
    // Value of "key=..." in MISC, or empty string.
    std::string misc_value(std::string_view key) const;
    // Insert or replace "key=value", preserving position when replacing.
    void misc_set(std::string_view key, std::string_view value);
    bool space_after() const { return misc_value("SpaceAfter") != "No"; }

    bool operator==(const Token&) const = default;
};

// Surface token covering syntactic words start..end ("1-2  Who's").
struct MultiwordToken {
    int start = 0;
    int end = 0;
    std::string form = "_";
    std::vector<std::string> misc;

    bool space_after() const;
    bool operator==(const MultiwordToken&) const = default;
};

// One metadata line. Key-value comments ("# key = value") are parsed into
// key/value; anything else is kept verbatim in `value` with `key` empty.
struct MetaEntry {
    std::string key;
    std::string value;
    bool is_comment() const { return key.empty(); }
    bool operator==(const MetaEntry&) const = default;
};

// Ordered sentence metadata. Unknown keys and free comments are preserved
// in their original positions; typed accessors cover the CHILDES schema.
// gold_annotation and speaker_age keep their raw spelling so files
// round-trip exactly ("True", full-precision ages).
struct SentenceMeta {
    std::vector<MetaEntry> entries;

    bool has(std::string_view key) const;
    std::string get(std::string_view key) const;          // "" when absent
    void set(std::string_view key, std::string_view value);

    std::string sent_id() const { return get("sent_id"); }
    std::string original_sent_id() const { return get("original_sent_id"); }
    std::string child_name() const { return get("child_name"); }
    std::string corpus_name() const { return get("corpus_name"); }
    std::string speaker_role() const { return get("speaker_role"); }
    std::string type() const { return get("type"); }
    std::string text() const { return get("text"); }
    std::optional<bool> gold_annotation() const;          // "True"/"False", any case
    std::optional<double> speaker_age_months() const;

    bool operator==(const SentenceMeta&) const = default;
};

struct Sentence {
    SentenceMeta meta;
    std::vector<Token> tokens;        // ids exactly 1..n
    std::vector<MultiwordToken> mwts; // sorted by start, non-overlapping
    std::string source;               // file or corpus label

    const Token* token(int id) const {
        return id >= 1 && id <= static_cast<int>(tokens.size()) ? &tokens[id - 1] : nullptr;
    }
    Token* token(int id) {
        return id >= 1 && id <= static_cast<int>(tokens.size()) ? &tokens[id - 1] : nullptr;
    }
    // First token with head 0, or 0 when there is none.
    int root_id() const;
    // Multiword token starting at `id`, if any.
    const MultiwordToken* mwt_starting_at(int id) const;
    MultiwordToken* mwt_starting_at(int id);

    bool operator==(const Sentence&) const = default;
};

struct Treebank {
    std::vector<Sentence> sentences;
    std::string source_label;

    std::size_t size() const { return sentences.size(); }
    bool operator==(const Treebank&) const = default;
};

// Throws Error naming the sentence if structural invariants are violated
// (ids not 1..n, head out of range or self-referent, deprel/root mismatch,
// bad multiword ranges). The parser establishes these; the serializer and
// rewrite passes re-check them.
void check_sentence_invariants(const Sentence& s);

// Streaming reader over one text stream. Reads a sentence per call;
// throws ParseError with the absolute line number on malformed input.
class ConlluReader {
  public:
    explicit ConlluReader(std::istream& in, std::string source_label = {});
    std::optional<Sentence> next();
    std::size_t line() const { return line_no_; }

  private:
    std::istream& in_;
    std::string source_label_;
    std::size_t line_no_ = 0;
    bool at_start_ = true;
};

Treebank parse_conllu(std::string_view text, std::string source_label = {});

// Canonical text for one sentence: metadata comments in stored order,
// multiword lines interleaved before their first covered token, trailing
// newline on every line, no terminating blank line.
std::string serialize_sentence(const Sentence& s);

// Whole treebank; every sentence block is followed by one blank line.
std::string serialize_conllu(const Treebank& tb);

// Detokenized utterance: forms joined by single spaces, suppressed after
// SpaceAfter=No; multiword surface forms replace their covered tokens.
std::string reconstruct_text(const Sentence& s);

// Ids of tokens headed by `id`, in surface order. Throws on out-of-range id.
std::vector<int> children_of(const Sentence& s, int id);

struct LoadOptions {
    std::string glob = "*.conllu";
    bool skip_bad_files = false;  // collect a warning instead of throwing
};

struct LoadResult {
    Treebank treebank;
    std::vector<std::string> warnings;
};

// Parses every file under `root` matching the glob, in lexicographic path
// order. Each sentence's `source` records its file. Errors name file and
// line; with skip_bad_files the file is skipped and a warning recorded.
LoadResult load_corpus(const std::filesystem::path& root, const LoadOptions& opts = {});

// Files (sorted) that `load_corpus` would read.
std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& root,
                                                     const std::string& glob);

}  // namespace tbkit

#endif
