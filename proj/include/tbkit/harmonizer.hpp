#ifndef TBKIT_HARMONIZER_HPP
#define TBKIT_HARMONIZER_HPP

// Deterministic per-sentence rewrite passes that normalize heterogeneous
// source annotations into one scheme: v1-style flat chains flipped to
// leftmost head, unsanctioned deprel subtypes moved to MISC, dependents of
// function words reattached, phrasal particles relabeled compound:prt,
// auxiliary tags and contracted lemmas canonicalized, all-interjection
// utterances restructured as flat stars, terminal punctuation and
// capitalization inferred from the sentence type, and the enhanced DEPS
// column projected from the basic tree.
//
// Every mutation is recorded as one ChangeLogEntry; replaying a log
// against the original input reproduces the harmonized output exactly.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbkit/conllu.hpp"

namespace tbkit {

// Lemma lookup for contracted auxiliaries: surface form (lowercased) plus
// XPOS, first matching row wins, "*" matches any XPOS.
struct ContractionRule {
    std::string surface;
    std::string xpos;
    std::string lemma;

    bool operator==(const ContractionRule&) const = default;
};

struct ContractionTable {
    std::vector<ContractionRule> rules;

    // nullptr when no row matches.
    const std::string* lookup(std::string_view surface_lower, std::string_view xpos) const;

    static const ContractionTable& builtin();
    // Whitespace-separated columns surface/xpos/lemma, '#' comments.
    static ContractionTable load_file(const std::filesystem::path& path);

    bool operator==(const ContractionTable&) const = default;
};

// Annotation generation of the source treebank. Only flip_flat_direction
// is conditional on it: v1 data attached flat chains to the last member.
enum class GuidelinesVersion { v1, v2 };

struct HarmonizeConfig {
    // Enabled passes; harmonize() always applies them in canonical order
    // regardless of this list's order.
    std::vector<std::string> passes = all_pass_names();
    // Exact sentence-type to terminal-mark entries, consulted first.
    std::map<std::string, std::string> punctuation_map = default_punctuation_map();
    // Fallback mark for types without an entry that do not mention "question".
    std::string default_mark = ".";
    std::string subrel_misc_key = "SubRel";
    GuidelinesVersion source_guidelines_version = GuidelinesVersion::v2;
    ContractionTable contractions = ContractionTable::builtin();

    bool pass_enabled(std::string_view name) const;
    // Exact map entry, else "?" for any type containing "question",
    // else default_mark.
    std::string terminal_mark(std::string_view sentence_type) const;

    // Canonical pass order: structural rewrites first, label fixes next,
    // punctuation before enhanced projection so inserted tokens get DEPS.
    static const std::vector<std::string>& all_pass_names();
    static std::map<std::string, std::string> default_punctuation_map();

    // Plain-text config: global `passes` and `source_guidelines_version`
    // keys, then one [section] per pass with its own key=value settings.
    static HarmonizeConfig load_file(const std::filesystem::path& path);
};

// One recorded mutation. token_id 0 marks sentence-level fields; `field`
// names the slot changed (form, lemma, upos, xpos, feats, head, deprel,
// deps, misc, mwt_form, mwt_misc, meta:text, insert_token). List-valued
// slots are rendered in column syntax ("_" for empty).
struct ChangeLogEntry {
    std::string sent_id;
    int token_id = 0;
    std::string pass;
    std::string field;
    std::string old_value;
    std::string new_value;

    bool operator==(const ChangeLogEntry&) const = default;
};

std::string change_to_jsonl(const ChangeLogEntry& entry);
std::string change_to_text(const ChangeLogEntry& entry);

struct HarmonizeError {
    std::string sent_id;
    std::string pass;
    std::string message;
};

struct HarmonizeResult {
    Treebank treebank;
    std::vector<ChangeLogEntry> changes;
    std::vector<HarmonizeError> errors;
};

using PassOutput = std::pair<Sentence, std::vector<ChangeLogEntry>>;

// ADP tokens labeled advmod under a VERB head become compound:prt.
PassOutput fix_particles(const Sentence& s);

// aux/cop tokens get upos AUX; contracted forms whose lemma still equals
// the surface form get the canonical lemma from the table.
PassOutput fix_auxiliaries(const Sentence& s,
                           const ContractionTable& table = ContractionTable::builtin());

// Unsanctioned `base:subtype` relations with a universal base drop the
// subtype into MISC (`misc_key=subtype`) and keep the base as deprel.
PassOutput relocate_subrelations(const Sentence& s, std::string_view misc_key = "SubRel");

// Re-heads every flat chain at its leftmost member: the old head's
// external attachment moves to the leftmost token, every other member
// attaches to it, and dependents of the displaced head follow. Throws
// when a chain has no or several external attachments.
PassOutput flip_flat_direction(const Sentence& s);

// Uppercases the first alphabetic token; when the sentence does not end
// in PUNCT, appends the terminal mark for its type, attached to the root.
// The text metadata is refreshed when either half changed anything.
// Throws when punctuation must be added but the sentence has no root.
PassOutput infer_terminal_punctuation(const Sentence& s, const HarmonizeConfig& cfg = {});

// Moves non-exempt dependents of function words (deprel base aux, case,
// cc, cop, mark) to the function word's own head, repeated to fixpoint.
PassOutput reattach_function_word_dependents(const Sentence& s);

// Sentences whose every non-PUNCT token is an interjection become a star:
// leftmost INTJ is the root, other INTJ attach flat, PUNCT attach punct.
PassOutput interjections_to_flat(const Sentence& s);

// DEPS of every token becomes the single basic-tree pair `head:deprel`.
PassOutput project_enhanced(const Sentence& s);

// Runs one pass by name. Throws Error for unknown names.
PassOutput run_pass(std::string_view name, const Sentence& s, const HarmonizeConfig& cfg);

// Applies the enabled passes in canonical order. Pass failures throw
// Error with the pass name in the message.
PassOutput harmonize_sentence(const Sentence& s, const HarmonizeConfig& cfg = {});

// Whole-treebank harmonization. A failing sentence is copied through
// unchanged and recorded in `errors`; its partial changes are discarded.
HarmonizeResult harmonize(const Treebank& tb, const HarmonizeConfig& cfg = {});

// Applies a change log to `tb` and returns the result. Every entry's old
// value is checked against the current state; a mismatch throws Error.
Treebank replay_changes(const Treebank& tb, const std::vector<ChangeLogEntry>& changes);

}  // namespace tbkit

#endif
