#ifndef TBKIT_EVALUATOR_HPP
#define TBKIT_EVALUATOR_HPP

// Attachment scoring between a gold and a predicted treebank: UAS counts
// tokens whose head matches, LAS additionally requires the full deprel
// string to match. Scores are reported per speaker group (children =
// Target_Child utterances, parents = all other speakers) and overall.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tbkit/conllu.hpp"

namespace tbkit {

struct AttachmentScores {
    std::size_t tokens_total = 0;
    std::size_t head_correct = 0;
    std::size_t head_and_label_correct = 0;

    // Fractions in [0, 1]; an empty denominator counts as perfect.
    double uas() const {
        return tokens_total ? static_cast<double>(head_correct) / tokens_total : 1.0;
    }
    double las() const {
        return tokens_total ? static_cast<double>(head_and_label_correct) / tokens_total : 1.0;
    }

    AttachmentScores& operator+=(const AttachmentScores& other) {
        tokens_total += other.tokens_total;
        head_correct += other.head_correct;
        head_and_label_correct += other.head_and_label_correct;
        return *this;
    }

    bool operator==(const AttachmentScores&) const = default;
};

struct GroupedScores {
    // Group label with its scores, in fixed label order.
    std::vector<std::pair<std::string, AttachmentScores>> groups;
    AttachmentScores overall;

    bool operator==(const GroupedScores&) const = default;
};

enum class Grouping { speaker, none };

// Positional token pairing. Requires equal sent_id, equal token counts and
// identical forms; throws Error naming the sentence and first divergence.
std::vector<std::pair<const Token*, const Token*>> align(const Sentence& gold,
                                                         const Sentence& pred);

// Scores pred against gold. Sentences pair by sent_id; the id sets must
// match exactly and be duplicate-free on both sides. With include_punct
// false, tokens whose gold deprel base is punct are skipped. Grouping
// speaker always reports both children and parents.
GroupedScores score(const Treebank& gold, const Treebank& pred,
                    Grouping grouping = Grouping::speaker, bool include_punct = true);

// "66.7" style rendering of a fraction as a one-decimal percentage.
std::string percent1(double fraction);

// Two-row layout: LAS and UAS rows, one column per group plus overall.
// Groups with no scored tokens print "-".
std::string scores_to_text(const GroupedScores& scores);
std::string scores_to_csv(const GroupedScores& scores);

}  // namespace tbkit

#endif
