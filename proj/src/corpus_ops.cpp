#include "tbkit/corpus_ops.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

namespace tbkit {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// Numeric order when both ids are plain numbers, byte order otherwise.
bool sent_id_less(const std::string& a, const std::string& b) {
    if (all_digits(a) && all_digits(b)) {
        if (a.size() != b.size()) return a.size() < b.size();
    }
    return a < b;
}

std::string format_cell(double v) {
    char buf[32];
    if (std::isnan(v)) return "-";
    if (v == std::floor(v) && std::fabs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::string StatsTable::to_text() const {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(columns);
    for (const Row& r : rows) {
        std::vector<std::string> line{r.label};
        for (double v : r.values) line.push_back(format_cell(v));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths;
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (widths.size() <= i) widths.push_back(0);
            widths[i] = std::max(widths[i], line[i].size());
        }
    std::string out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) out += "  ";
            const std::size_t pad = widths[i] - line[i].size();
            if (i == 0) {
                out += line[i];
                if (i + 1 < line.size()) out.append(pad, ' ');
            } else {
                out.append(pad, ' ');
                out += line[i];
            }
        }
        out += '\n';
    }
    return out;
}

std::string StatsTable::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(columns[i]);
    }
    out += '\n';
    for (const Row& r : rows) {
        out += csv_field(r.label);
        for (double v : r.values) {
            out += ',';
            out += format_cell(v);
        }
        out += '\n';
    }
    return out;
}

DedupResult deduplicate(const Treebank& tb, const std::vector<std::string>& priority) {
    auto rank = [&](const std::string& source) {
        for (std::size_t i = 0; i < priority.size(); ++i)
            if (priority[i] == source) return i;
        return priority.size();
    };

    using Key = std::pair<std::string, std::string>;  // (corpus_name, original_sent_id)
    std::map<Key, std::size_t> winner;
    std::map<std::pair<Key, std::string>, std::size_t> per_source;
    for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
        const Sentence& s = tb.sentences[i];
        const std::string corpus = s.meta.corpus_name();
        const std::string original = s.meta.original_sent_id();
        if (corpus.empty() || original.empty()) continue;
        const Key key{corpus, original};
        ++per_source[{key, s.source}];
        auto [it, fresh] = winner.emplace(key, i);
        if (!fresh && rank(s.source) < rank(tb.sentences[it->second].source)) it->second = i;
    }

    DedupResult result;
    result.treebank.source_label = tb.source_label;
    for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
        const Sentence& s = tb.sentences[i];
        const Key key{s.meta.corpus_name(), s.meta.original_sent_id()};
        if (key.first.empty() || key.second.empty() || winner.at(key) == i)
            result.treebank.sentences.push_back(s);
    }
    result.removed = tb.sentences.size() - result.treebank.sentences.size();
    for (const auto& [group, count] : per_source)
        if (count > 1)
            result.warnings.push_back("corpus " + group.first.first + " original_sent_id " +
                                      group.first.second + ": " + std::to_string(count) +
                                      " copies within source '" + group.second +
                                      "', keeping the first");
    return result;
}

Treebank renumber(const Treebank& tb) {
    Treebank out = tb;
    std::size_t next = 1;
    for (Sentence& s : out.sentences) {
        const std::string old_id = s.meta.sent_id();
        if (s.meta.original_sent_id().empty() && !old_id.empty())
            s.meta.set("original_sent_id", old_id);
        s.meta.set("sent_id", std::to_string(next++));
    }
    return out;
}

SplitResult split(const Treebank& tb, const SplitSpec& spec) {
    if (!(spec.dev_fraction >= 0.0 && spec.dev_fraction <= 1.0))
        throw Error("dev_fraction must be within [0, 1]");
    if (spec.selection_rule != "every_kth")
        throw Error("unknown selection rule '" + spec.selection_rule + "'");

    auto is_test_child = [&](const std::string& name) {
        return std::find(spec.test_children.begin(), spec.test_children.end(), name) !=
               spec.test_children.end();
    };

    std::vector<std::size_t> pool;
    std::vector<bool> in_test(tb.sentences.size(), false);
    std::map<std::string, std::size_t> test_counts;
    for (const std::string& child : spec.test_children) test_counts[child] = 0;
    for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
        const std::string child = tb.sentences[i].meta.child_name();
        if (is_test_child(child)) {
            in_test[i] = true;
            ++test_counts[child];
        } else {
            pool.push_back(i);
        }
    }

    // Rank the pool by sent_id; every k-th of that ranking goes to dev.
    std::vector<bool> in_dev(tb.sentences.size(), false);
    if (spec.dev_fraction > 0.0) {
        const std::size_t k = static_cast<std::size_t>(std::lround(1.0 / spec.dev_fraction));
        std::vector<std::size_t> ranked = pool;
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
            return sent_id_less(tb.sentences[a].meta.sent_id(), tb.sentences[b].meta.sent_id());
        });
        for (std::size_t pos = 0; pos < ranked.size(); ++pos)
            if ((pos + 1) % k == 0) in_dev[ranked[pos]] = true;
    }

    SplitResult result;
    result.train.source_label = tb.source_label;
    result.dev.source_label = tb.source_label;
    result.test.source_label = tb.source_label;
    for (std::size_t i = 0; i < tb.sentences.size(); ++i) {
        if (in_test[i])
            result.test.sentences.push_back(tb.sentences[i]);
        else if (in_dev[i])
            result.dev.sentences.push_back(tb.sentences[i]);
        else
            result.train.sentences.push_back(tb.sentences[i]);
    }
    for (const auto& [child, count] : test_counts)
        if (count == 0)
            result.warnings.push_back("test child '" + child + "' has no sentences");
    return result;
}

std::string sentence_type_bucket(std::string_view type) {
    if (type == "declarative") return "declarative";
    if (type == "imperative emphatic") return "imperative emphatic";
    if (type == "question" || type == "self interruption question" ||
        type == "trail off question" || type == "interruption question")
        return "question";
    return "others";
}

bool is_child_speech(const Sentence& s) {
    return s.meta.speaker_role() == "Target_Child";
}

StatsTable sentence_type_stats(const Treebank& tb) {
    static const char* buckets[] = {"declarative", "question", "imperative emphatic", "others"};
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // bucket -> (cds, cs)
    for (const char* b : buckets) counts[b] = {0, 0};
    for (const Sentence& s : tb.sentences) {
        auto& cell = counts[sentence_type_bucket(s.meta.type())];
        if (is_child_speech(s))
            ++cell.second;
        else
            ++cell.first;
    }

    StatsTable table;
    table.columns = {"type", "CDS", "CS", "overall"};
    std::size_t cds_total = 0, cs_total = 0;
    for (const char* b : buckets) {
        const auto [cds, cs] = counts[b];
        table.rows.push_back({b, {static_cast<double>(cds), static_cast<double>(cs),
                                  static_cast<double>(cds + cs)}});
        cds_total += cds;
        cs_total += cs;
    }
    table.rows.push_back({"total", {static_cast<double>(cds_total), static_cast<double>(cs_total),
                                    static_cast<double>(cds_total + cs_total)}});
    return table;
}

StatsTable corpus_profile(const Treebank& tb) {
    struct Profile {
        std::size_t gold_sents = 0, gold_toks = 0, other_sents = 0, other_toks = 0;
        double age_min = std::numeric_limits<double>::quiet_NaN();
        double age_max = std::numeric_limits<double>::quiet_NaN();
    };
    std::map<std::string, Profile> profiles;
    for (const Sentence& s : tb.sentences) {
        std::string child = s.meta.child_name();
        if (child.empty()) child = "(unknown)";
        Profile& p = profiles[child];
        const bool gold = s.meta.gold_annotation().value_or(false);
        const std::size_t toks = s.tokens.size();
        if (gold) {
            ++p.gold_sents;
            p.gold_toks += toks;
        } else {
            ++p.other_sents;
            p.other_toks += toks;
        }
        if (auto age = s.meta.speaker_age_months()) {
            if (std::isnan(p.age_min) || *age < p.age_min) p.age_min = *age;
            if (std::isnan(p.age_max) || *age > p.age_max) p.age_max = *age;
        }
    }

    StatsTable table;
    table.columns = {"child", "gold_sents", "gold_toks", "silver_sents", "silver_toks",
                     "age_min",   "age_max"};
    for (const auto& [child, p] : profiles)
        table.rows.push_back({child,
                              {static_cast<double>(p.gold_sents), static_cast<double>(p.gold_toks),
                               static_cast<double>(p.other_sents), static_cast<double>(p.other_toks),
                               p.age_min, p.age_max}});
    return table;
}

}  // namespace tbkit
