#include "tbkit/conllu.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fnmatch.h>
#include <fstream>
#include <istream>
#include <sstream>

namespace tbkit {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

bool parse_int(std::string_view s, int& value) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && value >= 0;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

constexpr std::array<std::string_view, 17> kUposTags = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

}  // namespace

ParseError::ParseError(std::size_t line_no, const std::string& reason)
    : Error("line " + std::to_string(line_no) + ": " + reason), line(line_no) {}

bool is_universal_upos(std::string_view tag) {
    return std::find(kUposTags.begin(), kUposTags.end(), tag) != kUposTags.end();
}

std::string_view deprel_base(std::string_view deprel) {
    return deprel.substr(0, deprel.find(':'));
}

// ---------------------------------------------------------------------------
// Token / MultiwordToken / SentenceMeta

static bool item_has_key(std::string_view item, std::string_view key) {
    return item.size() > key.size() && item.compare(0, key.size(), key) == 0 && item[key.size()] == '=';
}

bool Token::misc_has(std::string_view key) const {
    return std::any_of(misc.begin(), misc.end(), [&](const std::string& m) { return item_has_key(m, key); });
}

std::string Token::misc_value(std::string_view key) const {
    for (const std::string& m : misc)
        if (item_has_key(m, key)) return m.substr(key.size() + 1);
    return {};
}

void Token::misc_set(std::string_view key, std::string_view value) {
    std::string item = std::string(key) + "=" + std::string(value);
    for (std::string& m : misc)
        if (item_has_key(m, key)) {
            m = std::move(item);
            return;
        }
    misc.push_back(std::move(item));
}

bool MultiwordToken::space_after() const {
    for (const std::string& m : misc)
        if (item_has_key(m, "SpaceAfter")) return m.substr(11) != "No";
    return true;
}

bool SentenceMeta::has(std::string_view key) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const MetaEntry& e) { return !e.is_comment() && e.key == key; });
}

std::string SentenceMeta::get(std::string_view key) const {
    for (const MetaEntry& e : entries)
        if (!e.is_comment() && e.key == key) return e.value;
    return {};
}

void SentenceMeta::set(std::string_view key, std::string_view value) {
    for (MetaEntry& e : entries)
        if (!e.is_comment() && e.key == key) {
            e.value = value;
            return;
        }
    entries.push_back(MetaEntry{std::string(key), std::string(value)});
}

std::optional<bool> SentenceMeta::gold_annotation() const {
    std::string v = get("gold_annotation");
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true") return true;
    if (v == "false") return false;
    return std::nullopt;
}

std::optional<double> SentenceMeta::speaker_age_months() const {
    std::string v = get("speaker_age");
    if (v.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) return std::nullopt;
        return d;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int Sentence::root_id() const {
    for (const Token& t : tokens)
        if (t.head == 0) return t.id;
    return 0;
}

const MultiwordToken* Sentence::mwt_starting_at(int id) const {
    for (const MultiwordToken& m : mwts)
        if (m.start == id) return &m;
    return nullptr;
}

MultiwordToken* Sentence::mwt_starting_at(int id) {
    for (MultiwordToken& m : mwts)
        if (m.start == id) return &m;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Invariants

void check_sentence_invariants(const Sentence& s) {
    const std::string name = s.meta.has("sent_id") ? s.meta.sent_id() : "<no sent_id>";
    auto fail = [&](const std::string& why) { throw Error("sentence '" + name + "': " + why); };

    const int n = static_cast<int>(s.tokens.size());
    if (n == 0) fail("has no tokens");
    for (int i = 0; i < n; ++i) {
        const Token& t = s.tokens[i];
        if (t.id != i + 1)
            fail("token ids are not consecutive from 1 (position " + std::to_string(i + 1) +
                 " has id " + std::to_string(t.id) + ")");
        if (t.head < 0 || t.head > n)
            fail("token " + std::to_string(t.id) + " head " + std::to_string(t.head) + " out of range");
        if (t.head == t.id) fail("token " + std::to_string(t.id) + " is its own head");
        if ((t.head == 0) != (t.deprel == "root"))
            fail("token " + std::to_string(t.id) + ": deprel must be 'root' exactly when head is 0");
        if (t.form.empty() || t.lemma.empty() || t.upos.empty() || t.xpos.empty() || t.deprel.empty())
            fail("token " + std::to_string(t.id) + " has an empty column");
        for (const std::string& f : t.feats)
            if (f.empty() || f.find('=') == std::string::npos)
                fail("token " + std::to_string(t.id) + " has a malformed FEATS item");
        for (const std::string& m : t.misc)
            if (m.empty()) fail("token " + std::to_string(t.id) + " has an empty MISC item");
        for (const auto& [h, rel] : t.deps)
            if (h < 0 || h > n || rel.empty())
                fail("token " + std::to_string(t.id) + " has a malformed DEPS item");
    }
    int prev_end = 0;
    for (const MultiwordToken& m : s.mwts) {
        if (m.start >= m.end || m.start < 1 || m.end > n)
            fail("invalid multiword range " + std::to_string(m.start) + "-" + std::to_string(m.end));
        if (m.start <= prev_end)
            fail("overlapping multiword range " + std::to_string(m.start) + "-" + std::to_string(m.end));
        prev_end = m.end;
    }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

// Accumulates one sentence block line by line.
struct BlockBuilder {
    Sentence sentence;
    std::vector<std::size_t> token_lines;  // line number per token
    std::vector<std::size_t> mwt_lines;
    bool saw_token = false;

    void add_comment(const std::string& line, std::size_t line_no) {
        if (saw_token)
            throw ParseError(line_no, "comment line after token lines (missing blank-line separator?)");
        // "# key = value" with a space-free key is metadata; anything else is
        // preserved verbatim.
        if (line.size() >= 2 && line[1] == ' ') {
            std::string_view rest(line.c_str() + 2, line.size() - 2);
            std::size_t eq = rest.find(" = ");
            if (eq != std::string_view::npos && eq > 0) {
                std::string_view key = rest.substr(0, eq);
                if (key.find(' ') == std::string_view::npos && key.find('\t') == std::string_view::npos) {
                    sentence.meta.entries.push_back(
                        MetaEntry{std::string(key), std::string(rest.substr(eq + 3))});
                    return;
                }
            }
        }
        sentence.meta.entries.push_back(MetaEntry{"", line.substr(1)});
    }

    void add_token_line(const std::string& line, std::size_t line_no) {
        std::vector<std::string> cols = split(line, '\t');
        if (cols.size() != 10)
            throw ParseError(line_no, "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i].empty())
                throw ParseError(line_no, "empty column " + std::to_string(i + 1) + " (use _)");

        const std::string& id_col = cols[0];
        if (id_col.find('.') != std::string::npos)
            throw ParseError(line_no, "empty nodes (decimal token ids) are not supported");
        std::size_t dash = id_col.find('-');
        if (dash != std::string::npos) {
            add_mwt(cols, dash, line_no);
            return;
        }
        add_regular(cols, line_no);
    }

    void add_mwt(const std::vector<std::string>& cols, std::size_t dash, std::size_t line_no) {
        int start = 0, end = 0;
        if (!parse_int(std::string_view(cols[0]).substr(0, dash), start) ||
            !parse_int(std::string_view(cols[0]).substr(dash + 1), end))
            throw ParseError(line_no, "malformed multiword token id '" + cols[0] + "'");
        if (start >= end)
            throw ParseError(line_no, "invalid multiword range " + cols[0]);
        int next_id = static_cast<int>(sentence.tokens.size()) + 1;
        if (!sentence.mwts.empty() && start <= sentence.mwts.back().end)
            throw ParseError(line_no, "overlapping multiword ranges");
        if (start != next_id)
            throw ParseError(line_no, "multiword range " + cols[0] + " must precede token " +
                                          std::to_string(start));
        for (std::size_t i = 2; i <= 8; ++i)
            if (cols[i] != "_")
                throw ParseError(line_no, "multiword token line must use _ in columns 3-9");
        MultiwordToken m;
        m.start = start;
        m.end = end;
        m.form = cols[1];
        if (cols[9] != "_") m.misc = split(cols[9], '|');
        for (const std::string& item : m.misc)
            if (item.empty()) throw ParseError(line_no, "empty MISC item");
        sentence.mwts.push_back(std::move(m));
        mwt_lines.push_back(line_no);
    }

    void add_regular(const std::vector<std::string>& cols, std::size_t line_no) {
        Token t;
        if (!parse_int(cols[0], t.id) || t.id < 1)
            throw ParseError(line_no, "non-integer token id '" + cols[0] + "'");
        int expected = static_cast<int>(sentence.tokens.size()) + 1;
        if (t.id != expected) {
            if (t.id == 1 && expected > 1)
                throw ParseError(line_no, "token id restarts at 1 (missing blank-line separator?)");
            if (t.id < expected)
                throw ParseError(line_no, "duplicate token id " + cols[0]);
            throw ParseError(line_no, "non-consecutive token id " + cols[0] + " (expected " +
                                          std::to_string(expected) + ")");
        }
        t.form = cols[1];
        t.lemma = cols[2];
        t.upos = cols[3];
        if (t.upos != "_" && !is_universal_upos(t.upos))
            throw ParseError(line_no, "invalid UPOS '" + t.upos + "'");
        t.xpos = cols[4];
        if (cols[5] != "_") {
            t.feats = split(cols[5], '|');
            for (const std::string& f : t.feats)
                if (f.empty() || f.find('=') == std::string::npos || f[0] == '=')
                    throw ParseError(line_no, "malformed FEATS item '" + f + "'");
        }
        if (!all_digits(cols[6]) || !parse_int(cols[6], t.head))
            throw ParseError(line_no, "non-integer head '" + cols[6] + "'");
        if (t.head == t.id)
            throw ParseError(line_no, "token " + cols[0] + " is its own head");
        t.deprel = cols[7];
        if ((t.head == 0) != (t.deprel == "root"))
            throw ParseError(line_no, "deprel must be 'root' exactly when head is 0 (token " + cols[0] + ")");
        if (cols[8] != "_") {
            for (const std::string& item : split(cols[8], '|')) {
                std::size_t colon = item.find(':');
                if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
                    throw ParseError(line_no, "malformed DEPS item '" + item + "'");
                std::string_view head_part = std::string_view(item).substr(0, colon);
                if (head_part.find('.') != std::string_view::npos)
                    throw ParseError(line_no, "empty-node reference in DEPS '" + item + "'");
                int h = 0;
                if (!parse_int(head_part, h))
                    throw ParseError(line_no, "malformed DEPS item '" + item + "'");
                t.deps.emplace_back(h, item.substr(colon + 1));
            }
        }
        if (cols[9] != "_") {
            t.misc = split(cols[9], '|');
            for (const std::string& m : t.misc)
                if (m.empty()) throw ParseError(line_no, "empty MISC item");
        }
        sentence.tokens.push_back(std::move(t));
        token_lines.push_back(line_no);
        saw_token = true;
    }

    Sentence finish(std::size_t end_line, const std::string& source_label) {
        if (sentence.tokens.empty())
            throw ParseError(end_line, "sentence has no token lines");
        const int n = static_cast<int>(sentence.tokens.size());
        for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
            if (sentence.tokens[i].head > n)
                throw ParseError(token_lines[i],
                                 "head " + std::to_string(sentence.tokens[i].head) +
                                     " out of range (sentence has " + std::to_string(n) + " tokens)");
        for (std::size_t i = 0; i < sentence.mwts.size(); ++i)
            if (sentence.mwts[i].end > n)
                throw ParseError(mwt_lines[i], "multiword range " + std::to_string(sentence.mwts[i].start) +
                                                   "-" + std::to_string(sentence.mwts[i].end) +
                                                   " exceeds sentence length");
        sentence.source = source_label;
        return std::move(sentence);
    }
};

}  // namespace

ConlluReader::ConlluReader(std::istream& in, std::string source_label)
    : in_(in), source_label_(std::move(source_label)) {}

std::optional<Sentence> ConlluReader::next() {
    BlockBuilder block;
    bool have_any = false;
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (at_start_) {
            at_start_ = false;
            if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (!have_any)
                throw ParseError(line_no_, "empty sentence (consecutive blank lines?)");
            return block.finish(line_no_, source_label_);
        }
        have_any = true;
        if (line[0] == '#')
            block.add_comment(line, line_no_);
        else
            block.add_token_line(line, line_no_);
    }
    if (have_any) return block.finish(line_no_, source_label_);
    return std::nullopt;
}

Treebank parse_conllu(std::string_view text, std::string source_label) {
    std::istringstream in{std::string(text)};
    ConlluReader reader(in, source_label);
    Treebank tb;
    tb.source_label = std::move(source_label);
    while (std::optional<Sentence> s = reader.next())
        tb.sentences.push_back(std::move(*s));
    return tb;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_sentence(const Sentence& s) {
    check_sentence_invariants(s);
    std::string out;
    for (const MetaEntry& e : s.meta.entries) {
        if (e.is_comment()) {
            out += '#';
            out += e.value;
        } else {
            out += "# ";
            out += e.key;
            out += " = ";
            out += e.value;
        }
        out += '\n';
    }
    std::size_t mwt_i = 0;
    for (const Token& t : s.tokens) {
        if (mwt_i < s.mwts.size() && s.mwts[mwt_i].start == t.id) {
            const MultiwordToken& m = s.mwts[mwt_i++];
            out += std::to_string(m.start);
            out += '-';
            out += std::to_string(m.end);
            out += '\t';
            out += m.form;
            out += "\t_\t_\t_\t_\t_\t_\t_\t";
            out += m.misc.empty() ? "_" : join(m.misc, '|');
            out += '\n';
        }
        out += std::to_string(t.id);
        out += '\t';
        out += t.form;
        out += '\t';
        out += t.lemma;
        out += '\t';
        out += t.upos;
        out += '\t';
        out += t.xpos;
        out += '\t';
        out += t.feats.empty() ? "_" : join(t.feats, '|');
        out += '\t';
        out += std::to_string(t.head);
        out += '\t';
        out += t.deprel;
        out += '\t';
        if (t.deps.empty()) {
            out += '_';
        } else {
            for (std::size_t i = 0; i < t.deps.size(); ++i) {
                if (i) out += '|';
                out += std::to_string(t.deps[i].first);
                out += ':';
                out += t.deps[i].second;
            }
        }
        out += '\t';
        out += t.misc.empty() ? "_" : join(t.misc, '|');
        out += '\n';
    }
    return out;
}

std::string serialize_conllu(const Treebank& tb) {
    std::string out;
    for (const Sentence& s : tb.sentences) {
        out += serialize_sentence(s);
        out += '\n';
    }
    return out;
}

std::string reconstruct_text(const Sentence& s) {
    std::string out;
    bool add_space = false;
    std::size_t mwt_i = 0;
    int id = 1;
    const int n = static_cast<int>(s.tokens.size());
    while (id <= n) {
        while (mwt_i < s.mwts.size() && s.mwts[mwt_i].start < id) ++mwt_i;
        if (add_space) out += ' ';
        if (mwt_i < s.mwts.size() && s.mwts[mwt_i].start == id) {
            const MultiwordToken& m = s.mwts[mwt_i];
            out += m.form;
            add_space = m.space_after();
            id = m.end + 1;
        } else {
            const Token& t = s.tokens[id - 1];
            out += t.form;
            add_space = t.space_after();
            ++id;
        }
    }
    return out;
}

std::vector<int> children_of(const Sentence& s, int id) {
    if (id < 1 || id > static_cast<int>(s.tokens.size()))
        throw std::invalid_argument("children_of: token id " + std::to_string(id) + " out of range");
    std::vector<int> out;
    for (const Token& t : s.tokens)
        if (t.head == id) out.push_back(t.id);
    return out;
}

// ---------------------------------------------------------------------------
// Corpus loading

std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& root,
                                                     const std::string& glob) {
    namespace fs = std::filesystem;
    if (!fs::exists(root)) throw Error("path does not exist: " + root.string());
    if (fs::is_regular_file(root)) return {root};
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (fnmatch(glob.c_str(), entry.path().filename().string().c_str(), 0) == 0)
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    return files;
}

LoadResult load_corpus(const std::filesystem::path& root, const LoadOptions& opts) {
    LoadResult result;
    result.treebank.source_label = root.generic_string();
    for (const std::filesystem::path& file : list_corpus_files(root, opts.glob)) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            std::string msg = "cannot read " + file.generic_string();
            if (opts.skip_bad_files) {
                result.warnings.push_back(std::move(msg));
                continue;
            }
            throw Error(msg);
        }
        ConlluReader reader(in, file.generic_string());
        std::vector<Sentence> parsed;
        try {
            while (std::optional<Sentence> s = reader.next())
                parsed.push_back(std::move(*s));
        } catch (const ParseError& e) {
            std::string msg = file.generic_string() + ": " + e.what();
            if (opts.skip_bad_files) {
                result.warnings.push_back(std::move(msg));
                continue;
            }
            throw Error(msg);
        }
        for (Sentence& s : parsed)
            result.treebank.sentences.push_back(std::move(s));
    }
    return result;
}

}  // namespace tbkit
