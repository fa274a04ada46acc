#include "tbkit/harmonizer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tbkit/validator.hpp"

namespace tbkit {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Column rendering shared by the change log and its replay.

std::string join_pipe(const std::vector<std::string>& items) {
    if (items.empty()) return "_";
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += '|';
        out += items[i];
    }
    return out;
}

std::vector<std::string> split_pipe(std::string_view column) {
    std::vector<std::string> items;
    if (column == "_") return items;
    std::size_t start = 0;
    while (start <= column.size()) {
        std::size_t bar = column.find('|', start);
        if (bar == std::string_view::npos) bar = column.size();
        items.emplace_back(column.substr(start, bar - start));
        start = bar + 1;
    }
    return items;
}

std::string render_deps(const std::vector<std::pair<int, std::string>>& deps) {
    if (deps.empty()) return "_";
    std::string out;
    for (std::size_t i = 0; i < deps.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(deps[i].first) + ":" + deps[i].second;
    }
    return out;
}

std::vector<std::pair<int, std::string>> parse_deps(std::string_view column) {
    std::vector<std::pair<int, std::string>> deps;
    for (const std::string& item : split_pipe(column)) {
        std::size_t colon = item.find(':');
        if (colon == std::string::npos) throw Error("bad DEPS item '" + item + "' in change log");
        int head = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + colon, head);
        if (ec != std::errc() || p != item.data() + colon || head < 0)
            throw Error("bad DEPS head in '" + item + "' in change log");
        deps.emplace_back(head, item.substr(colon + 1));
    }
    return deps;
}

std::string token_line(const Token& t) {
    std::string out = std::to_string(t.id);
    out += '\t';
    out += t.form;
    out += '\t';
    out += t.lemma;
    out += '\t';
    out += t.upos;
    out += '\t';
    out += t.xpos;
    out += '\t';
    out += join_pipe(t.feats);
    out += '\t';
    out += std::to_string(t.head);
    out += '\t';
    out += t.deprel;
    out += '\t';
    out += render_deps(t.deps);
    out += '\t';
    out += join_pipe(t.misc);
    return out;
}

Token parse_token_line(std::string_view line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) tab = line.size();
        cols.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (cols.size() != 10) throw Error("bad token line in change log: '" + std::string(line) + "'");
    auto to_int = [](const std::string& s) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || v < 0)
            throw Error("bad number '" + s + "' in change log token line");
        return v;
    };
    Token t;
    t.id = to_int(cols[0]);
    t.form = cols[1];
    t.lemma = cols[2];
    t.upos = cols[3];
    t.xpos = cols[4];
    t.feats = split_pipe(cols[5]);
    t.head = to_int(cols[6]);
    t.deprel = cols[7];
    t.deps = parse_deps(cols[8]);
    t.misc = split_pipe(cols[9]);
    return t;
}

std::vector<std::string> with_misc_item(std::vector<std::string> misc, std::string_view key,
                                        std::string_view value) {
    const std::string item = std::string(key) + "=" + std::string(value);
    const std::string prefix = std::string(key) + "=";
    for (std::string& existing : misc) {
        if (existing.rfind(prefix, 0) == 0 || existing == key) {
            existing = item;
            return misc;
        }
    }
    misc.push_back(item);
    return misc;
}

// Records one entry per real mutation; no-op assignments leave no trace.
class Recorder {
  public:
    Recorder(std::string sent_id, std::string pass, std::vector<ChangeLogEntry>& out)
        : sent_id_(std::move(sent_id)), pass_(std::move(pass)), out_(out) {}

    void set_form(Token& t, std::string v) { set_string(t.id, "form", t.form, std::move(v)); }
    void set_lemma(Token& t, std::string v) { set_string(t.id, "lemma", t.lemma, std::move(v)); }
    void set_upos(Token& t, std::string v) { set_string(t.id, "upos", t.upos, std::move(v)); }
    void set_deprel(Token& t, std::string v) { set_string(t.id, "deprel", t.deprel, std::move(v)); }

    void set_head(Token& t, int v) {
        if (t.head == v) return;
        record(t.id, "head", std::to_string(t.head), std::to_string(v));
        t.head = v;
    }

    void set_misc(Token& t, std::vector<std::string> v) {
        if (t.misc == v) return;
        record(t.id, "misc", join_pipe(t.misc), join_pipe(v));
        t.misc = std::move(v);
    }

    void set_deps(Token& t, std::vector<std::pair<int, std::string>> v) {
        if (t.deps == v) return;
        record(t.id, "deps", render_deps(t.deps), render_deps(v));
        t.deps = std::move(v);
    }

    void set_mwt_form(MultiwordToken& m, std::string v) {
        if (m.form == v) return;
        record(m.start, "mwt_form", m.form, v);
        m.form = std::move(v);
    }

    void set_mwt_misc(MultiwordToken& m, std::vector<std::string> v) {
        if (m.misc == v) return;
        record(m.start, "mwt_misc", join_pipe(m.misc), join_pipe(v));
        m.misc = std::move(v);
    }

    void set_meta_text(Sentence& s, std::string v) {
        const std::string old = s.meta.text();
        if (old == v) return;
        record(0, "meta:text", old, v);
        s.meta.set("text", v);
    }

    void insert_token(Sentence& s, Token t) {
        record(t.id, "insert_token", "", token_line(t));
        s.tokens.push_back(std::move(t));
    }

  private:
    void set_string(int id, const char* field, std::string& slot, std::string v) {
        if (slot == v) return;
        record(id, field, slot, v);
        slot = std::move(v);
    }

    void record(int token_id, const char* field, std::string old_v, std::string new_v) {
        out_.push_back(ChangeLogEntry{sent_id_, token_id, pass_, field, std::move(old_v), std::move(new_v)});
    }

    std::string sent_id_;
    std::string pass_;
    std::vector<ChangeLogEntry>& out_;
};

MultiwordToken* mwt_covering(Sentence& s, int id) {
    for (MultiwordToken& m : s.mwts)
        if (m.start <= id && id <= m.end) return &m;
    return nullptr;
}

// Position of the first ASCII letter, or npos.
std::size_t first_alpha(std::string_view form) {
    for (std::size_t i = 0; i < form.size(); ++i)
        if (std::isalpha(static_cast<unsigned char>(form[i]))) return i;
    return std::string_view::npos;
}

}  // namespace

// ---------------------------------------------------------------------------
// Contraction table

const std::string* ContractionTable::lookup(std::string_view surface_lower,
                                            std::string_view xpos) const {
    for (const ContractionRule& r : rules)
        if (r.surface == surface_lower && (r.xpos == "*" || r.xpos == xpos)) return &r.lemma;
    return nullptr;
}

const ContractionTable& ContractionTable::builtin() {
    static const ContractionTable table{{
        {"'s", "VBZ", "be"},
        {"'s", "*", "be"},
        {"'re", "*", "be"},
        {"'m", "*", "be"},
        {"'ve", "*", "have"},
        {"'d", "MD", "would"},
        {"'d", "VBD", "have"},
        {"'d", "*", "would"},
        {"'ll", "*", "will"},
    }};
    return table;
}

ContractionTable ContractionTable::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read contraction table " + path.string());
    ContractionTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        ContractionRule rule;
        fields >> rule.surface >> rule.xpos >> rule.lemma;
        if (rule.lemma.empty())
            throw Error(path.string() + ":" + std::to_string(line_no) +
                        ": expected: surface xpos lemma");
        table.rules.push_back(std::move(rule));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& HarmonizeConfig::all_pass_names() {
    static const std::vector<std::string> names = {
        "flip_flat_direction",
        "relocate_subrelations",
        "reattach_function_word_dependents",
        "fix_particles",
        "fix_auxiliaries",
        "interjections_to_flat",
        "infer_terminal_punctuation",
        "project_enhanced",
    };
    return names;
}

std::map<std::string, std::string> HarmonizeConfig::default_punctuation_map() {
    return {{"declarative", "."}, {"imperative emphatic", "!"}};
}

bool HarmonizeConfig::pass_enabled(std::string_view name) const {
    return std::find(passes.begin(), passes.end(), name) != passes.end();
}

std::string HarmonizeConfig::terminal_mark(std::string_view sentence_type) const {
    auto it = punctuation_map.find(std::string(sentence_type));
    if (it != punctuation_map.end()) return it->second;
    if (sentence_type.find("question") != std::string_view::npos) return "?";
    return default_mark;
}

HarmonizeConfig HarmonizeConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file " + path.string());
    HarmonizeConfig cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    auto bad = [&](const std::string& why) {
        throw Error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']') bad("unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            const auto& names = all_pass_names();
            if (std::find(names.begin(), names.end(), section) == names.end())
                bad("unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) bad("expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) bad("empty key");
        if (section.empty()) {
            if (key == "passes") {
                std::vector<std::string> enabled;
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ',')) {
                    const std::string name = trim(item);
                    if (name.empty()) continue;
                    const auto& names = all_pass_names();
                    if (std::find(names.begin(), names.end(), name) == names.end())
                        bad("unknown pass '" + name + "'");
                    enabled.push_back(name);
                }
                cfg.passes = std::move(enabled);
            } else if (key == "source_guidelines_version") {
                if (value == "v1")
                    cfg.source_guidelines_version = GuidelinesVersion::v1;
                else if (value == "v2")
                    cfg.source_guidelines_version = GuidelinesVersion::v2;
                else
                    bad("source_guidelines_version must be v1 or v2");
            } else if (key == "subrel_misc_key") {
                cfg.subrel_misc_key = value;
            } else {
                bad("unknown key '" + key + "'");
            }
        } else if (section == "relocate_subrelations") {
            if (key == "misc_key")
                cfg.subrel_misc_key = value;
            else
                bad("unknown key '" + key + "' in [" + section + "]");
        } else if (section == "infer_terminal_punctuation") {
            if (key == "default")
                cfg.default_mark = value;
            else
                cfg.punctuation_map[key] = value;
        } else if (section == "fix_auxiliaries") {
            if (key == "contractions") {
                std::filesystem::path table{value};
                if (table.is_relative()) table = path.parent_path() / table;
                cfg.contractions = ContractionTable::load_file(table);
            } else {
                bad("unknown key '" + key + "' in [" + section + "]");
            }
        } else if (section == "flip_flat_direction") {
            if (key == "source_guidelines_version") {
                if (value == "v1")
                    cfg.source_guidelines_version = GuidelinesVersion::v1;
                else if (value == "v2")
                    cfg.source_guidelines_version = GuidelinesVersion::v2;
                else
                    bad("source_guidelines_version must be v1 or v2");
            } else {
                bad("unknown key '" + key + "' in [" + section + "]");
            }
        } else {
            bad("section [" + section + "] takes no keys");
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Passes

PassOutput fix_particles(const Sentence& s) {
    PassOutput out{s, {}};
    Recorder rec(s.meta.sent_id(), "fix_particles", out.second);
    for (Token& t : out.first.tokens) {
        if (t.upos != "ADP" || t.deprel != "advmod") continue;
        const Token* head = out.first.token(t.head);
        if (head && head->upos == "VERB") rec.set_deprel(t, "compound:prt");
    }
    return out;
}

PassOutput fix_auxiliaries(const Sentence& s, const ContractionTable& table) {
    PassOutput out{s, {}};
    Recorder rec(s.meta.sent_id(), "fix_auxiliaries", out.second);
    for (Token& t : out.first.tokens) {
        const std::string_view base = deprel_base(t.deprel);
        if (base != "aux" && base != "cop") continue;
        if (t.upos != "AUX") rec.set_upos(t, "AUX");
        const std::string form_l = lower(t.form);
        if (lower(t.lemma) == form_l)
            if (const std::string* lemma = table.lookup(form_l, t.xpos)) rec.set_lemma(t, *lemma);
    }
    return out;
}

PassOutput relocate_subrelations(const Sentence& s, std::string_view misc_key) {
    PassOutput out{s, {}};
    Recorder rec(s.meta.sent_id(), "relocate_subrelations", out.second);
    for (Token& t : out.first.tokens) {
        const std::size_t colon = t.deprel.find(':');
        if (colon == std::string::npos || deprel_in_inventory(t.deprel)) continue;
        const std::string base = t.deprel.substr(0, colon);
        if (!is_universal_relation(base)) continue;
        const std::string subtype = t.deprel.substr(colon + 1);
        rec.set_deprel(t, base);
        rec.set_misc(t, with_misc_item(t.misc, misc_key, subtype));
    }
    return out;
}

PassOutput flip_flat_direction(const Sentence& s) {
    PassOutput out{s, {}};
    Sentence& sent = out.first;
    Recorder rec(s.meta.sent_id(), "flip_flat_direction", out.second);
    const int n = static_cast<int>(sent.tokens.size());

    std::vector<int> comp(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) comp[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    bool any_flat = false;
    for (const Token& t : sent.tokens)
        if (deprel_base(t.deprel) == "flat" && t.head >= 1) {
            comp[find(t.id)] = find(t.head);
            any_flat = true;
        }
    if (!any_flat) return out;

    std::unordered_map<int, std::vector<int>> chains;
    for (const Token& t : sent.tokens) {
        const bool in_chain = deprel_base(t.deprel) == "flat" ||
                              std::any_of(sent.tokens.begin(), sent.tokens.end(), [&](const Token& d) {
                                  return d.head == t.id && deprel_base(d.deprel) == "flat";
                              });
        if (in_chain) chains[find(t.id)].push_back(t.id);
    }

    std::vector<int> ordered_roots;
    for (const auto& [root, members] : chains)
        if (members.size() >= 2) ordered_roots.push_back(members.front());
    std::sort(ordered_roots.begin(), ordered_roots.end());

    for (int first_member : ordered_roots) {
        const std::vector<int>& members = chains[find(first_member)];
        auto is_member = [&](int id) {
            return std::binary_search(members.begin(), members.end(), id);
        };
        std::vector<int> externals;
        for (int id : members) {
            const int h = sent.token(id)->head;
            if (h == 0 || !is_member(h)) externals.push_back(id);
        }
        if (externals.size() != 1) {
            std::string ids;
            for (int id : members) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
            throw Error("flat chain {" + ids + "} has " +
                        (externals.empty() ? std::string("no external attachment")
                                           : std::to_string(externals.size()) + " external attachments"));
        }
        const int old_head = externals.front();
        const int leftmost = members.front();
        if (leftmost == old_head) continue;

        const int ext_head = sent.token(old_head)->head;
        const std::string ext_rel = sent.token(old_head)->deprel;
        for (Token& t : sent.tokens)
            if (t.head == old_head && !is_member(t.id)) rec.set_head(t, leftmost);
        rec.set_head(*sent.token(leftmost), ext_head);
        rec.set_deprel(*sent.token(leftmost), ext_rel);
        for (int id : members) {
            if (id == leftmost) continue;
            Token& t = *sent.token(id);
            rec.set_head(t, leftmost);
            if (id == old_head) rec.set_deprel(t, "flat");
        }
    }
    return out;
}

PassOutput infer_terminal_punctuation(const Sentence& s, const HarmonizeConfig& cfg) {
    PassOutput out{s, {}};
    Sentence& sent = out.first;
    Recorder rec(s.meta.sent_id(), "infer_terminal_punctuation", out.second);
    bool changed = false;

    for (Token& t : sent.tokens) {
        const std::size_t pos = first_alpha(t.form);
        if (pos == std::string_view::npos) continue;
        if (std::islower(static_cast<unsigned char>(t.form[pos]))) {
            std::string fixed = t.form;
            fixed[pos] = static_cast<char>(std::toupper(static_cast<unsigned char>(fixed[pos])));
            rec.set_form(t, std::move(fixed));
            changed = true;
            if (MultiwordToken* m = mwt_covering(sent, t.id)) {
                const std::size_t mpos = first_alpha(m->form);
                if (mpos != std::string_view::npos &&
                    std::islower(static_cast<unsigned char>(m->form[mpos]))) {
                    std::string mfixed = m->form;
                    mfixed[mpos] =
                        static_cast<char>(std::toupper(static_cast<unsigned char>(mfixed[mpos])));
                    rec.set_mwt_form(*m, std::move(mfixed));
                }
            }
        }
        break;
    }

    if (!sent.tokens.empty() && sent.tokens.back().upos != "PUNCT") {
        const int root = sent.root_id();
        if (root == 0) throw Error("cannot attach inferred punctuation: sentence has no root");
        Token& last = sent.tokens.back();
        if (MultiwordToken* m = mwt_covering(sent, last.id)) {
            if (m->space_after()) rec.set_mwt_misc(*m, with_misc_item(m->misc, "SpaceAfter", "No"));
        } else if (last.space_after()) {
            rec.set_misc(last, with_misc_item(last.misc, "SpaceAfter", "No"));
        }
        const std::string mark = cfg.terminal_mark(sent.meta.type());
        Token punct;
        punct.id = static_cast<int>(sent.tokens.size()) + 1;
        punct.form = mark;
        punct.lemma = mark;
        punct.upos = "PUNCT";
        punct.xpos = mark;
        punct.head = root;
        punct.deprel = "punct";
        rec.insert_token(sent, std::move(punct));
        changed = true;
    }

    if (changed && sent.meta.has("text")) rec.set_meta_text(sent, reconstruct_text(sent));
    return out;
}

PassOutput reattach_function_word_dependents(const Sentence& s) {
    PassOutput out{s, {}};
    Sentence& sent = out.first;
    Recorder rec(s.meta.sent_id(), "reattach_function_word_dependents", out.second);
    const std::size_t max_sweeps = sent.tokens.size() + 1;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (Token& t : sent.tokens) {
            if (t.head == 0) continue;
            const Token* head = sent.token(t.head);
            if (!head || !is_function_deprel_base(deprel_base(head->deprel))) continue;
            if (is_leaf_exception_base(deprel_base(t.deprel))) continue;
            if (head->head == 0 || head->head == t.id) continue;
            rec.set_head(t, head->head);
            moved = true;
        }
        if (!moved) return out;
    }
    throw Error("function word reattachment did not converge (cyclic heads?)");
}

PassOutput interjections_to_flat(const Sentence& s) {
    PassOutput out{s, {}};
    Sentence& sent = out.first;
    Recorder rec(s.meta.sent_id(), "interjections_to_flat", out.second);

    int first_intj = 0;
    for (const Token& t : sent.tokens) {
        if (t.upos == "PUNCT") continue;
        if (t.upos != "INTJ") return out;
        if (first_intj == 0) first_intj = t.id;
    }
    if (first_intj == 0) return out;

    for (Token& t : sent.tokens) {
        if (t.id == first_intj) {
            rec.set_head(t, 0);
            rec.set_deprel(t, "root");
        } else if (t.upos == "INTJ") {
            rec.set_head(t, first_intj);
            rec.set_deprel(t, "flat");
        } else {
            rec.set_head(t, first_intj);
            rec.set_deprel(t, "punct");
        }
    }
    return out;
}

PassOutput project_enhanced(const Sentence& s) {
    PassOutput out{s, {}};
    Recorder rec(s.meta.sent_id(), "project_enhanced", out.second);
    for (Token& t : out.first.tokens)
        rec.set_deps(t, {{t.head, t.deprel}});
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

PassOutput run_pass(std::string_view name, const Sentence& s, const HarmonizeConfig& cfg) {
    if (name == "flip_flat_direction") return flip_flat_direction(s);
    if (name == "relocate_subrelations") return relocate_subrelations(s, cfg.subrel_misc_key);
    if (name == "reattach_function_word_dependents") return reattach_function_word_dependents(s);
    if (name == "fix_particles") return fix_particles(s);
    if (name == "fix_auxiliaries") return fix_auxiliaries(s, cfg.contractions);
    if (name == "interjections_to_flat") return interjections_to_flat(s);
    if (name == "infer_terminal_punctuation") return infer_terminal_punctuation(s, cfg);
    if (name == "project_enhanced") return project_enhanced(s);
    throw Error("unknown pass '" + std::string(name) + "'");
}

namespace {

void require_known_passes(const HarmonizeConfig& cfg) {
    const auto& names = HarmonizeConfig::all_pass_names();
    for (const std::string& pass : cfg.passes)
        if (std::find(names.begin(), names.end(), pass) == names.end())
            throw Error("unknown pass '" + pass + "'");
}

PassOutput harmonize_one(const Sentence& s, const HarmonizeConfig& cfg, std::string* failed_pass) {
    PassOutput result{s, {}};
    for (const std::string& pass : HarmonizeConfig::all_pass_names()) {
        if (!cfg.pass_enabled(pass)) continue;
        if (pass == "flip_flat_direction" && cfg.source_guidelines_version != GuidelinesVersion::v1)
            continue;
        if (failed_pass) *failed_pass = pass;
        PassOutput step = run_pass(pass, result.first, cfg);
        result.first = std::move(step.first);
        for (ChangeLogEntry& e : step.second) result.second.push_back(std::move(e));
    }
    return result;
}

}  // namespace

PassOutput harmonize_sentence(const Sentence& s, const HarmonizeConfig& cfg) {
    require_known_passes(cfg);
    std::string failed_pass;
    try {
        return harmonize_one(s, cfg, &failed_pass);
    } catch (const Error& e) {
        throw Error("pass " + failed_pass + ": " + e.what());
    }
}

HarmonizeResult harmonize(const Treebank& tb, const HarmonizeConfig& cfg) {
    require_known_passes(cfg);
    HarmonizeResult result;
    result.treebank.source_label = tb.source_label;
    for (const Sentence& s : tb.sentences) {
        std::string failed_pass;
        try {
            PassOutput one = harmonize_one(s, cfg, &failed_pass);
            result.treebank.sentences.push_back(std::move(one.first));
            for (ChangeLogEntry& e : one.second) result.changes.push_back(std::move(e));
        } catch (const Error& e) {
            result.treebank.sentences.push_back(s);
            result.errors.push_back(HarmonizeError{s.meta.sent_id(), failed_pass, e.what()});
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Change log replay

Treebank replay_changes(const Treebank& tb, const std::vector<ChangeLogEntry>& changes) {
    Treebank out = tb;
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_set<std::string> ambiguous;
    for (std::size_t i = 0; i < out.sentences.size(); ++i) {
        const std::string id = out.sentences[i].meta.sent_id();
        if (!index.emplace(id, i).second) ambiguous.insert(id);
    }

    for (const ChangeLogEntry& e : changes) {
        auto where = [&] {
            return "sent " + (e.sent_id.empty() ? std::string("?") : e.sent_id) + " tok " +
                   std::to_string(e.token_id) + " field " + e.field;
        };
        if (ambiguous.count(e.sent_id))
            throw Error("cannot replay: sent_id '" + e.sent_id + "' is not unique in the input");
        auto it = index.find(e.sent_id);
        if (it == index.end())
            throw Error("cannot replay: no sentence with sent_id '" + e.sent_id + "'");
        Sentence& s = out.sentences[it->second];

        auto check_old = [&](const std::string& current) {
            if (current != e.old_value)
                throw Error("change log mismatch at " + where() + ": expected '" + e.old_value +
                            "', found '" + current + "'");
        };
        auto need_token = [&]() -> Token& {
            Token* t = s.token(e.token_id);
            if (!t) throw Error("cannot replay: no token for " + where());
            return *t;
        };
        auto need_mwt = [&]() -> MultiwordToken& {
            MultiwordToken* m = s.mwt_starting_at(e.token_id);
            if (!m) throw Error("cannot replay: no multiword token for " + where());
            return *m;
        };

        if (e.field == "form") {
            Token& t = need_token();
            check_old(t.form);
            t.form = e.new_value;
        } else if (e.field == "lemma") {
            Token& t = need_token();
            check_old(t.lemma);
            t.lemma = e.new_value;
        } else if (e.field == "upos") {
            Token& t = need_token();
            check_old(t.upos);
            t.upos = e.new_value;
        } else if (e.field == "xpos") {
            Token& t = need_token();
            check_old(t.xpos);
            t.xpos = e.new_value;
        } else if (e.field == "deprel") {
            Token& t = need_token();
            check_old(t.deprel);
            t.deprel = e.new_value;
        } else if (e.field == "head") {
            Token& t = need_token();
            check_old(std::to_string(t.head));
            int head = 0;
            auto [p, ec] = std::from_chars(e.new_value.data(), e.new_value.data() + e.new_value.size(), head);
            if (ec != std::errc() || p != e.new_value.data() + e.new_value.size() || head < 0)
                throw Error("bad head value '" + e.new_value + "' at " + where());
            t.head = head;
        } else if (e.field == "feats") {
            Token& t = need_token();
            check_old(join_pipe(t.feats));
            t.feats = split_pipe(e.new_value);
        } else if (e.field == "misc") {
            Token& t = need_token();
            check_old(join_pipe(t.misc));
            t.misc = split_pipe(e.new_value);
        } else if (e.field == "deps") {
            Token& t = need_token();
            check_old(render_deps(t.deps));
            t.deps = parse_deps(e.new_value);
        } else if (e.field == "mwt_form") {
            MultiwordToken& m = need_mwt();
            check_old(m.form);
            m.form = e.new_value;
        } else if (e.field == "mwt_misc") {
            MultiwordToken& m = need_mwt();
            check_old(join_pipe(m.misc));
            m.misc = split_pipe(e.new_value);
        } else if (e.field == "meta:text") {
            check_old(s.meta.text());
            s.meta.set("text", e.new_value);
        } else if (e.field == "insert_token") {
            Token t = parse_token_line(e.new_value);
            if (t.id != e.token_id || t.id != static_cast<int>(s.tokens.size()) + 1)
                throw Error("cannot replay: token id out of sequence at " + where());
            s.tokens.push_back(std::move(t));
        } else {
            throw Error("unknown change log field '" + e.field + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Change log rendering

std::string change_to_jsonl(const ChangeLogEntry& entry) {
    nlohmann::ordered_json j;
    j["sent_id"] = entry.sent_id;
    j["token_id"] = entry.token_id;
    j["pass"] = entry.pass;
    j["field"] = entry.field;
    j["old"] = entry.old_value;
    j["new"] = entry.new_value;
    return j.dump();
}

std::string change_to_text(const ChangeLogEntry& entry) {
    std::string out = "sent=" + (entry.sent_id.empty() ? "?" : entry.sent_id);
    if (entry.token_id > 0) out += " tok=" + std::to_string(entry.token_id);
    out += " " + entry.pass + " " + entry.field + ": '" + entry.old_value + "' -> '" +
           entry.new_value + "'";
    return out;
}

}  // namespace tbkit
