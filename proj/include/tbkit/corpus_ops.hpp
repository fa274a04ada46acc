#ifndef TBKIT_CORPUS_OPS_HPP
#define TBKIT_CORPUS_OPS_HPP

// Treebank-level set operations: removing cross-source duplicates, assigning
// collision-free sequential sentence ids, carving train/dev/test splits by
// child, and descriptive statistics tables.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tbkit/conllu.hpp"

namespace tbkit {

// Aligned-column statistics. First column holds row labels; numeric cells
// print as integers when whole, two decimals otherwise, "-" when NaN.
struct StatsTable {
    struct Row {
        std::string label;
        std::vector<double> values;
        bool operator==(const Row&) const = default;
    };

    std::vector<std::string> columns;  // header names, label column first
    std::vector<Row> rows;

    std::string to_text() const;
    std::string to_csv() const;

    bool operator==(const StatsTable&) const = default;
};

struct DedupResult {
    Treebank treebank;
    std::size_t removed = 0;
    std::vector<std::string> warnings;
};

// Collapses sentences sharing (corpus_name, original_sent_id) to a single
// copy: the one whose `source` ranks earliest in `priority` (unlisted
// sources rank after all listed ones; ties keep the first occurrence).
// Sentences missing either key pass through untouched. Survivors keep
// input order. A repeated key within one source keeps the first copy and
// records a warning.
DedupResult deduplicate(const Treebank& tb, const std::vector<std::string>& priority = {});

// Rewrites sent_id to "1", "2", ... in treebank order. A sentence without
// an original_sent_id gets its previous sent_id preserved there.
Treebank renumber(const Treebank& tb);

struct SplitSpec {
    std::vector<std::string> test_children = {"Eve", "Violet", "Emma", "Thomas"};
    double dev_fraction = 0.10;
    std::string selection_rule = "every_kth";
};

struct SplitResult {
    Treebank train;
    Treebank dev;
    Treebank test;
    std::vector<std::string> warnings;  // test children with no sentences
};

// Sentences of test children go to test. The rest are ranked by sent_id
// (numeric when both ids are digits) and every k-th of that ranking,
// k = round(1/dev_fraction), goes to dev; the remainder is train. All
// three outputs preserve input order. Throws on a dev_fraction outside
// [0,1] or an unknown selection rule.
SplitResult split(const Treebank& tb, const SplitSpec& spec = {});

// Collapses a sentence type annotation to one of the four reported
// buckets: declarative, question (the four question subtypes), imperative
// emphatic, or others.
std::string sentence_type_bucket(std::string_view type);

// Target_Child utterances count as child speech; every other speaker role
// is treated as child-directed speech.
bool is_child_speech(const Sentence& s);

// Sentence counts per type bucket, split into child-directed speech (CDS),
// child speech (CS), and overall, with a trailing total row.
StatsTable sentence_type_stats(const Treebank& tb);

// Per-child profile: gold and non-gold sentence and token counts plus the
// speaker age range in months. Tokens count syntactic words; multiword
// range lines are not counted.
StatsTable corpus_profile(const Treebank& tb);

}  // namespace tbkit

#endif
