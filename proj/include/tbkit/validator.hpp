#ifndef TBKIT_VALIDATOR_HPP
#define TBKIT_VALIDATOR_HPP

// Structural and annotation-scheme checks over parsed sentences.
//
// Rule catalog (code, severity):
//   CYCLE              error    head links form a cycle
//   MULTI_ROOT         error    number of head-0 tokens is not exactly 1
//   FUNC_LEAF          error    function word (case/mark/aux/cop/cc) has a
//                               dependent outside {fixed, goeswith, conj, punct}
//   DEPRECATED_REL     error    deprel outside the allowed inventory
//   TEXT_MISMATCH      error    metadata text differs from the detokenization
//   META_MISSING       error    required metadata key absent (or empty)
//   DUPLICATE_SENT_ID  error    two sentences share a sent_id
//   UPOS_DEPREL        warning  UPOS/deprel combination off the compatibility
//                               matrix (includes the phrasal-particle pattern)
//   PUNCT_FORM         warning  PUNCT-tagged token with an alphanumeric form
//   AUX_LEMMA          warning  contracted aux/cop whose lemma still equals
//                               its surface form
//
// XPOS and FEATS are never validated.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tbkit/conllu.hpp"

namespace tbkit {

enum class Severity { error, warning };

enum class IssueCode {
    CYCLE,
    MULTI_ROOT,
    FUNC_LEAF,
    UPOS_DEPREL,
    PUNCT_FORM,
    AUX_LEMMA,
    DEPRECATED_REL,
    META_MISSING,
    TEXT_MISMATCH,
    DUPLICATE_SENT_ID,
};

std::string_view to_string(IssueCode code);
std::string_view to_string(Severity severity);
Severity severity_of(IssueCode code);

struct ValidationIssue {
    IssueCode code;
    Severity severity;
    std::string sent_id;
    int token_id = 0;  // 0 = sentence-level
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::map<IssueCode, std::size_t> counts;
    std::size_t sentences_checked = 0;

    std::size_t error_count() const;
    std::size_t warning_count() const;
};

// True for the 37 universal relations.
bool is_universal_relation(std::string_view base);
// Universal relations plus the allowed language-specific subtypes
// (compound:prt, obl:tmod, nmod:poss, ...); reparandum and parataxis are
// allowed without subtypes only.
bool deprel_in_inventory(std::string_view deprel);

// Deprels whose bearers must not head non-exempt dependents.
bool is_function_deprel_base(std::string_view base);
// Dependent relations exempt from the leaf constraint.
bool is_leaf_exception_base(std::string_view base);

// UPOS/deprel compatibility matrix. Data-driven so the ruleset can be
// tightened without code changes; `builtin()` mirrors the shipped
// data/upos_deprel.rules file.
struct UposDeprelRule {
    enum class Kind { require_upos, require_deprel, flag_pair };
    Kind kind;
    std::string key;                  // deprel base or UPOS, per kind
    std::vector<std::string> values;  // allowed set, or the flagged UPOS
    Severity severity = Severity::warning;

    bool operator==(const UposDeprelRule&) const = default;
};

struct UposDeprelMatrix {
    std::vector<UposDeprelRule> rules;

    static const UposDeprelMatrix& builtin();
    static UposDeprelMatrix load_file(const std::filesystem::path& path);

    bool operator==(const UposDeprelMatrix&) const = default;
};

struct RuleSet {
    bool tree = true;
    bool func_leaf = true;
    bool upos_deprel = true;
    bool deprel_inventory = true;
    bool metadata = true;
    bool duplicate_sent_id = true;

    static RuleSet all() { return RuleSet{}; }
    static RuleSet none();
    // Comma-separated rule names (tree, func_leaf, upos_deprel,
    // deprel_inventory, metadata, duplicate_sent_id). Throws on unknown names.
    static RuleSet from_csv(std::string_view csv);
};

std::vector<ValidationIssue> check_tree(const Sentence& s);
std::vector<ValidationIssue> check_function_word_leaves(const Sentence& s);
std::vector<ValidationIssue> check_upos_deprel(const Sentence& s,
                                               const UposDeprelMatrix& matrix = UposDeprelMatrix::builtin());
std::vector<ValidationIssue> check_deprel_inventory(const Sentence& s);
std::vector<ValidationIssue> check_metadata(const Sentence& s);

// Per-sentence validation with cross-sentence duplicate-id state, usable
// one sentence at a time over corpora that never fit in memory. Issues for
// each sentence come back sorted (token id, then code).
class StreamingValidator {
  public:
    explicit StreamingValidator(RuleSet rules = RuleSet::all(),
                                const UposDeprelMatrix& matrix = UposDeprelMatrix::builtin());
    std::vector<ValidationIssue> check(const Sentence& s);

    std::size_t sentences_checked() const { return sentences_checked_; }
    const std::map<IssueCode, std::size_t>& counts() const { return counts_; }
    std::size_t errors() const { return errors_; }
    std::size_t warnings() const { return warnings_; }

  private:
    RuleSet rules_;
    const UposDeprelMatrix& matrix_;
    std::unordered_set<std::uint64_t> seen_sent_ids_;  // hashed, constant per-sentence memory
    std::size_t sentences_checked_ = 0;
    std::map<IssueCode, std::size_t> counts_;
    std::size_t errors_ = 0;
    std::size_t warnings_ = 0;
};

ValidationReport validate(const Treebank& tb, const RuleSet& rules = RuleSet::all(),
                          const UposDeprelMatrix& matrix = UposDeprelMatrix::builtin());

// One issue as a single-line JSON record (code, severity, sent_id,
// token_id, message) or as readable text.
std::string issue_to_jsonl(const ValidationIssue& issue);
std::string issue_to_text(const ValidationIssue& issue);

}  // namespace tbkit

#endif
