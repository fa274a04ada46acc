#include "tbkit/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "tbkit/corpus_ops.hpp"

namespace tbkit {

namespace {

std::string describe(const Sentence& s) {
    const std::string id = s.meta.sent_id();
    return id.empty() ? "<no sent_id>" : id;
}

// sent_id -> sentence, rejecting duplicates.
std::unordered_map<std::string, const Sentence*> index_by_id(const Treebank& tb,
                                                             const char* side) {
    std::unordered_map<std::string, const Sentence*> index;
    for (const Sentence& s : tb.sentences)
        if (!index.emplace(s.meta.sent_id(), &s).second)
            throw Error(std::string("duplicate sent_id '") + s.meta.sent_id() + "' in " + side +
                        " treebank");
    return index;
}

std::string list_ids(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
    std::string out;
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) out += ", ";
        out += ids[i].empty() ? "<no sent_id>" : ids[i];
    }
    if (ids.size() > shown) out += ", +" + std::to_string(ids.size() - shown) + " more";
    return out;
}

}  // namespace

std::vector<std::pair<const Token*, const Token*>> align(const Sentence& gold,
                                                         const Sentence& pred) {
    if (gold.meta.sent_id() != pred.meta.sent_id())
        throw Error("cannot align sentences with different sent_ids ('" + gold.meta.sent_id() +
                    "' vs '" + pred.meta.sent_id() + "')");
    if (gold.tokens.size() != pred.tokens.size())
        throw Error("tokenization mismatch in sent " + describe(gold) + ": gold has " +
                    std::to_string(gold.tokens.size()) + " tokens, pred has " +
                    std::to_string(pred.tokens.size()));
    std::vector<std::pair<const Token*, const Token*>> pairs;
    pairs.reserve(gold.tokens.size());
    for (std::size_t i = 0; i < gold.tokens.size(); ++i) {
        if (gold.tokens[i].form != pred.tokens[i].form)
            throw Error("tokenization mismatch in sent " + describe(gold) + " at token " +
                        std::to_string(i + 1) + ": '" + gold.tokens[i].form + "' vs '" +
                        pred.tokens[i].form + "'");
        pairs.emplace_back(&gold.tokens[i], &pred.tokens[i]);
    }
    return pairs;
}

GroupedScores score(const Treebank& gold, const Treebank& pred, Grouping grouping,
                    bool include_punct) {
    const auto gold_index = index_by_id(gold, "gold");
    const auto pred_index = index_by_id(pred, "pred");

    std::vector<std::string> missing, extra;
    for (const auto& [id, s] : gold_index)
        if (!pred_index.count(id)) missing.push_back(id);
    for (const auto& [id, s] : pred_index)
        if (!gold_index.count(id)) extra.push_back(id);
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "sent_id sets differ:";
        if (!missing.empty()) msg += " missing from pred: " + list_ids(missing) + ";";
        if (!extra.empty()) msg += " extra in pred: " + list_ids(extra) + ";";
        msg.pop_back();
        throw Error(msg);
    }

    GroupedScores result;
    if (grouping == Grouping::speaker)
        result.groups = {{"children", {}}, {"parents", {}}};

    for (const Sentence& g : gold.sentences) {
        const Sentence& p = *pred_index.at(g.meta.sent_id());
        AttachmentScores sentence_scores;
        for (const auto& [gt, pt] : align(g, p)) {
            if (!include_punct && deprel_base(gt->deprel) == "punct") continue;
            ++sentence_scores.tokens_total;
            if (gt->head == pt->head) {
                ++sentence_scores.head_correct;
                if (gt->deprel == pt->deprel) ++sentence_scores.head_and_label_correct;
            }
        }
        result.overall += sentence_scores;
        if (grouping == Grouping::speaker)
            result.groups[is_child_speech(g) ? 0 : 1].second += sentence_scores;
    }
    return result;
}

std::string percent1(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
    return buf;
}

namespace {

std::string cell(const AttachmentScores& s, double fraction) {
    return s.tokens_total == 0 ? "-" : percent1(fraction);
}

}  // namespace

std::string scores_to_text(const GroupedScores& scores) {
    std::vector<std::string> headers{"metric"};
    std::vector<std::string> las_row{"LAS"}, uas_row{"UAS"};
    for (const auto& [label, s] : scores.groups) {
        headers.push_back(label);
        las_row.push_back(cell(s, s.las()));
        uas_row.push_back(cell(s, s.uas()));
    }
    headers.push_back("overall");
    las_row.push_back(cell(scores.overall, scores.overall.las()));
    uas_row.push_back(cell(scores.overall, scores.overall.uas()));

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i)
        widths[i] = std::max({headers[i].size(), las_row[i].size(), uas_row[i].size()});
    std::string out;
    for (const auto* row : {&headers, &las_row, &uas_row}) {
        for (std::size_t i = 0; i < row->size(); ++i) {
            if (i) out += "  ";
            const std::size_t pad = widths[i] - (*row)[i].size();
            if (i == 0) {
                out += (*row)[i];
                out.append(pad, ' ');
            } else {
                out.append(pad, ' ');
                out += (*row)[i];
            }
        }
        out += '\n';
    }
    return out;
}

std::string scores_to_csv(const GroupedScores& scores) {
    std::string out = "metric";
    for (const auto& [label, s] : scores.groups) out += "," + label;
    out += ",overall\n";
    out += "LAS";
    for (const auto& [label, s] : scores.groups) out += "," + cell(s, s.las());
    out += "," + cell(scores.overall, scores.overall.las()) + "\n";
    out += "UAS";
    for (const auto& [label, s] : scores.groups) out += "," + cell(s, s.uas());
    out += "," + cell(scores.overall, scores.overall.uas()) + "\n";
    return out;
}

}  // namespace tbkit
