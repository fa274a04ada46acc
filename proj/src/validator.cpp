#include "tbkit/validator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace tbkit {

namespace {

constexpr std::array<std::string_view, 37> kUniversalRelations = {
    "acl",       "advcl",     "advmod",  "amod",     "appos",      "aux",    "case",
    "cc",        "ccomp",     "clf",     "compound", "conj",       "cop",    "csubj",
    "dep",       "det",       "discourse", "dislocated", "expl",   "fixed",  "flat",
    "goeswith",  "iobj",      "list",    "mark",     "nmod",       "nsubj",  "nummod",
    "obj",       "obl",       "orphan",  "parataxis", "punct",     "reparandum", "root",
    "vocative",  "xcomp"};

constexpr std::array<std::string_view, 14> kAllowedSubtypes = {
    "compound:prt", "obl:tmod",   "nmod:poss",  "cc:preconj", "det:predet",
    "obl:npmod",    "nmod:npmod", "aux:pass",   "nsubj:pass", "csubj:pass",
    "acl:relcl",    "advcl:relcl", "obl:agent", "flat:foreign"};

constexpr std::array<std::string_view, 5> kFunctionBases = {"aux", "case", "cc", "cop", "mark"};
constexpr std::array<std::string_view, 4> kLeafExceptions = {"conj", "fixed", "goeswith", "punct"};

// Contracted auxiliary surface forms whose lemma must be canonicalized.
constexpr std::array<std::string_view, 6> kAuxContractions = {"'s", "'re", "'m", "'ve", "'d", "'ll"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string join_values(const std::vector<std::string>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += '|';
        out += vs[i];
    }
    return out;
}

ValidationIssue make_issue(IssueCode code, const Sentence& s, int token_id, std::string message) {
    return ValidationIssue{code, severity_of(code), s.meta.sent_id(), token_id, std::move(message)};
}

}  // namespace

std::string_view to_string(IssueCode code) {
    switch (code) {
        case IssueCode::CYCLE: return "CYCLE";
        case IssueCode::MULTI_ROOT: return "MULTI_ROOT";
        case IssueCode::FUNC_LEAF: return "FUNC_LEAF";
        case IssueCode::UPOS_DEPREL: return "UPOS_DEPREL";
        case IssueCode::PUNCT_FORM: return "PUNCT_FORM";
        case IssueCode::AUX_LEMMA: return "AUX_LEMMA";
        case IssueCode::DEPRECATED_REL: return "DEPRECATED_REL";
        case IssueCode::META_MISSING: return "META_MISSING";
        case IssueCode::TEXT_MISMATCH: return "TEXT_MISMATCH";
        case IssueCode::DUPLICATE_SENT_ID: return "DUPLICATE_SENT_ID";
    }
    return "?";
}

std::string_view to_string(Severity severity) {
    return severity == Severity::error ? "error" : "warning";
}

Severity severity_of(IssueCode code) {
    switch (code) {
        case IssueCode::UPOS_DEPREL:
        case IssueCode::PUNCT_FORM:
        case IssueCode::AUX_LEMMA:
            return Severity::warning;
        default:
            return Severity::error;
    }
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const ValidationIssue& i) {
        return i.severity == Severity::error;
    }));
}

std::size_t ValidationReport::warning_count() const {
    return issues.size() - error_count();
}

bool is_universal_relation(std::string_view base) {
    return std::find(kUniversalRelations.begin(), kUniversalRelations.end(), base) !=
           kUniversalRelations.end();
}

bool deprel_in_inventory(std::string_view deprel) {
    if (deprel.find(':') != std::string_view::npos)
        return std::find(kAllowedSubtypes.begin(), kAllowedSubtypes.end(), deprel) != kAllowedSubtypes.end();
    return is_universal_relation(deprel);
}

bool is_function_deprel_base(std::string_view base) {
    return std::find(kFunctionBases.begin(), kFunctionBases.end(), base) != kFunctionBases.end();
}

bool is_leaf_exception_base(std::string_view base) {
    return std::find(kLeafExceptions.begin(), kLeafExceptions.end(), base) != kLeafExceptions.end();
}

// ---------------------------------------------------------------------------
// Compatibility matrix

const UposDeprelMatrix& UposDeprelMatrix::builtin() {
    using Kind = UposDeprelRule::Kind;
    static const UposDeprelMatrix matrix{{
        {Kind::require_upos, "punct", {"PUNCT"}, Severity::warning},
        {Kind::require_deprel, "PUNCT", {"punct"}, Severity::warning},
        {Kind::require_upos, "aux", {"AUX"}, Severity::warning},
        {Kind::require_upos, "cop", {"AUX"}, Severity::warning},
        {Kind::require_upos, "det", {"DET", "PRON"}, Severity::warning},
        {Kind::require_upos, "nummod", {"NUM"}, Severity::warning},
        {Kind::flag_pair, "advmod", {"ADP"}, Severity::warning},
    }};
    return matrix;
}

UposDeprelMatrix UposDeprelMatrix::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read matrix file " + path.string());
    UposDeprelMatrix matrix;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string kind, key, values, severity;
        fields >> kind >> key >> values >> severity;
        auto bad = [&](const std::string& why) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + why);
        };
        if (values.empty()) bad("expected: kind key values [severity]");
        UposDeprelRule rule;
        if (kind == "require_upos")
            rule.kind = UposDeprelRule::Kind::require_upos;
        else if (kind == "require_deprel")
            rule.kind = UposDeprelRule::Kind::require_deprel;
        else if (kind == "flag_pair")
            rule.kind = UposDeprelRule::Kind::flag_pair;
        else
            bad("unknown rule kind '" + kind + "'");
        rule.key = key;
        std::istringstream vs(values);
        std::string v;
        while (std::getline(vs, v, ','))
            if (!v.empty()) rule.values.push_back(v);
        if (rule.values.empty()) bad("empty value list");
        if (!severity.empty()) {
            if (severity == "error")
                rule.severity = Severity::error;
            else if (severity == "warning")
                rule.severity = Severity::warning;
            else
                bad("unknown severity '" + severity + "'");
        }
        matrix.rules.push_back(std::move(rule));
    }
    return matrix;
}

RuleSet RuleSet::none() {
    RuleSet r;
    r.tree = r.func_leaf = r.upos_deprel = r.deprel_inventory = r.metadata = r.duplicate_sent_id = false;
    return r;
}

RuleSet RuleSet::from_csv(std::string_view csv) {
    RuleSet r = RuleSet::none();
    std::string item;
    std::istringstream in{std::string(csv)};
    while (std::getline(in, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        item = item.substr(begin, item.find_last_not_of(" \t") - begin + 1);
        if (item == "tree")
            r.tree = true;
        else if (item == "func_leaf")
            r.func_leaf = true;
        else if (item == "upos_deprel")
            r.upos_deprel = true;
        else if (item == "deprel_inventory")
            r.deprel_inventory = true;
        else if (item == "metadata")
            r.metadata = true;
        else if (item == "duplicate_sent_id")
            r.duplicate_sent_id = true;
        else
            throw Error("unknown rule name '" + item + "'");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Per-sentence checks

std::vector<ValidationIssue> check_tree(const Sentence& s) {
    std::vector<ValidationIssue> issues;
    const int n = static_cast<int>(s.tokens.size());

    std::vector<int> roots;
    for (const Token& t : s.tokens)
        if (t.head == 0) roots.push_back(t.id);
    if (roots.size() != 1) {
        std::string msg;
        if (roots.empty()) {
            msg = "no root token";
        } else {
            msg = std::to_string(roots.size()) + " root tokens (";
            for (std::size_t i = 0; i < roots.size(); ++i) {
                if (i) msg += ", ";
                msg += std::to_string(roots[i]);
            }
            msg += ")";
        }
        issues.push_back(make_issue(IssueCode::MULTI_ROOT, s, 0, std::move(msg)));
    }

    // Walk parent pointers; a node revisited while on the current path
    // closes a cycle.
    std::vector<char> color(static_cast<std::size_t>(n) + 1, 0);  // 0 new, 1 on path, 2 done
    for (int start = 1; start <= n; ++start) {
        if (color[start] != 0) continue;
        std::vector<int> path;
        int cur = start;
        while (cur != 0 && color[cur] == 0) {
            color[cur] = 1;
            path.push_back(cur);
            cur = s.tokens[cur - 1].head;
        }
        if (cur != 0 && color[cur] == 1) {
            std::vector<int> cycle;
            for (int node = cur;;) {
                cycle.push_back(node);
                node = s.tokens[node - 1].head;
                if (node == cur) break;
            }
            int lowest = *std::min_element(cycle.begin(), cycle.end());
            std::rotate(cycle.begin(), std::find(cycle.begin(), cycle.end(), lowest), cycle.end());
            std::string msg = "head cycle: ";
            for (int node : cycle) msg += std::to_string(node) + " -> ";
            msg += std::to_string(lowest);
            issues.push_back(make_issue(IssueCode::CYCLE, s, lowest, std::move(msg)));
        }
        for (int node : path) color[node] = 2;
    }
    return issues;
}

std::vector<ValidationIssue> check_function_word_leaves(const Sentence& s) {
    std::vector<ValidationIssue> issues;
    for (const Token& t : s.tokens) {
        if (!is_function_deprel_base(deprel_base(t.deprel))) continue;
        std::string offending;
        for (const Token& c : s.tokens) {
            if (c.head != t.id || is_leaf_exception_base(deprel_base(c.deprel))) continue;
            if (!offending.empty()) offending += ", ";
            offending += std::to_string(c.id) + " (" + c.deprel + ")";
        }
        if (!offending.empty())
            issues.push_back(make_issue(IssueCode::FUNC_LEAF, s, t.id,
                                        "function word '" + t.form + "' (" + t.deprel +
                                            ") heads dependents: " + offending));
    }
    return issues;
}

std::vector<ValidationIssue> check_upos_deprel(const Sentence& s, const UposDeprelMatrix& matrix) {
    std::vector<ValidationIssue> issues;
    for (const Token& t : s.tokens) {
        const std::string base{deprel_base(t.deprel)};
        for (const UposDeprelRule& rule : matrix.rules) {
            switch (rule.kind) {
                case UposDeprelRule::Kind::require_upos:
                    if (base == rule.key &&
                        std::find(rule.values.begin(), rule.values.end(), t.upos) == rule.values.end())
                        issues.push_back(ValidationIssue{
                            IssueCode::UPOS_DEPREL, rule.severity, s.meta.sent_id(), t.id,
                            "deprel '" + t.deprel + "' expects upos " + join_values(rule.values) +
                                ", got '" + t.upos + "'"});
                    break;
                case UposDeprelRule::Kind::require_deprel:
                    if (t.upos == rule.key &&
                        std::find(rule.values.begin(), rule.values.end(), base) == rule.values.end())
                        issues.push_back(ValidationIssue{
                            IssueCode::UPOS_DEPREL, rule.severity, s.meta.sent_id(), t.id,
                            "upos " + t.upos + " expects deprel " + join_values(rule.values) + ", got '" +
                                t.deprel + "'"});
                    break;
                case UposDeprelRule::Kind::flag_pair:
                    if (base == rule.key && !rule.values.empty() && t.upos == rule.values[0])
                        issues.push_back(ValidationIssue{
                            IssueCode::UPOS_DEPREL, rule.severity, s.meta.sent_id(), t.id,
                            "deprel '" + t.deprel + "' with upos '" + t.upos + "' matches a flagged pattern"});
                    break;
            }
        }
        if (t.upos == "PUNCT" &&
            std::any_of(t.form.begin(), t.form.end(), [](unsigned char c) { return std::isalnum(c); }))
            issues.push_back(make_issue(IssueCode::PUNCT_FORM, s, t.id,
                                        "PUNCT-tagged token has lexical form '" + t.form + "'"));
        if (base == "aux" || base == "cop") {
            const std::string form_l = lower(t.form);
            if (std::find(kAuxContractions.begin(), kAuxContractions.end(), form_l) !=
                    kAuxContractions.end() &&
                lower(t.lemma) == form_l)
                issues.push_back(make_issue(IssueCode::AUX_LEMMA, s, t.id,
                                            "contracted " + base + " '" + t.form +
                                                "' still has surface lemma '" + t.lemma + "'"));
        }
    }
    return issues;
}

std::vector<ValidationIssue> check_deprel_inventory(const Sentence& s) {
    std::vector<ValidationIssue> issues;
    for (const Token& t : s.tokens)
        if (!deprel_in_inventory(t.deprel))
            issues.push_back(make_issue(IssueCode::DEPRECATED_REL, s, t.id,
                                        "deprel '" + t.deprel + "' is not in the allowed inventory"));
    return issues;
}

std::vector<ValidationIssue> check_metadata(const Sentence& s) {
    static const std::array<std::string_view, 9> required = {
        "sent_id",     "original_sent_id", "childes_toks", "child_name", "corpus_name",
        "gold_annotation", "speaker_role", "type",         "text"};
    std::vector<ValidationIssue> issues;
    for (std::string_view key : required)
        if (s.meta.get(key).empty())
            issues.push_back(make_issue(IssueCode::META_MISSING, s, 0,
                                        "metadata key '" + std::string(key) + "' is missing or empty"));
    const std::string text = s.meta.text();
    if (!text.empty()) {
        const std::string rebuilt = reconstruct_text(s);
        if (rebuilt != text)
            issues.push_back(make_issue(IssueCode::TEXT_MISMATCH, s, 0,
                                        "metadata text '" + text + "' differs from detokenized '" +
                                            rebuilt + "'"));
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Treebank validation

StreamingValidator::StreamingValidator(RuleSet rules, const UposDeprelMatrix& matrix)
    : rules_(rules), matrix_(matrix) {}

std::vector<ValidationIssue> StreamingValidator::check(const Sentence& s) {
    std::vector<ValidationIssue> issues;
    bool tree_ok = true;
    if (rules_.tree || rules_.func_leaf) {
        std::vector<ValidationIssue> tree_issues = check_tree(s);
        tree_ok = tree_issues.empty();
        if (rules_.tree)
            for (ValidationIssue& i : tree_issues) issues.push_back(std::move(i));
    }
    if (rules_.func_leaf && tree_ok)
        for (ValidationIssue& i : check_function_word_leaves(s)) issues.push_back(std::move(i));
    if (rules_.upos_deprel)
        for (ValidationIssue& i : check_upos_deprel(s, matrix_)) issues.push_back(std::move(i));
    if (rules_.deprel_inventory)
        for (ValidationIssue& i : check_deprel_inventory(s)) issues.push_back(std::move(i));
    if (rules_.metadata)
        for (ValidationIssue& i : check_metadata(s)) issues.push_back(std::move(i));
    if (rules_.duplicate_sent_id) {
        const std::string sent_id = s.meta.sent_id();
        if (!sent_id.empty() && !seen_sent_ids_.insert(std::hash<std::string>{}(sent_id)).second)
            issues.push_back(make_issue(IssueCode::DUPLICATE_SENT_ID, s, 0,
                                        "sent_id '" + sent_id + "' already used by an earlier sentence"));
    }
    std::stable_sort(issues.begin(), issues.end(), [](const ValidationIssue& a, const ValidationIssue& b) {
        if (a.token_id != b.token_id) return a.token_id < b.token_id;
        return a.code < b.code;
    });
    ++sentences_checked_;
    for (const ValidationIssue& i : issues) {
        ++counts_[i.code];
        if (i.severity == Severity::error)
            ++errors_;
        else
            ++warnings_;
    }
    return issues;
}

ValidationReport validate(const Treebank& tb, const RuleSet& rules, const UposDeprelMatrix& matrix) {
    StreamingValidator checker(rules, matrix);
    ValidationReport report;
    for (const Sentence& s : tb.sentences)
        for (ValidationIssue& i : checker.check(s)) report.issues.push_back(std::move(i));
    report.counts = checker.counts();
    report.sentences_checked = checker.sentences_checked();
    return report;
}

std::string issue_to_jsonl(const ValidationIssue& issue) {
    nlohmann::ordered_json j;
    j["code"] = to_string(issue.code);
    j["severity"] = to_string(issue.severity);
    j["sent_id"] = issue.sent_id;
    j["token_id"] = issue.token_id;
    j["message"] = issue.message;
    return j.dump();
}

std::string issue_to_text(const ValidationIssue& issue) {
    std::string out{to_string(issue.severity)};
    out += ' ';
    out += to_string(issue.code);
    out += " sent=";
    out += issue.sent_id.empty() ? "?" : issue.sent_id;
    if (issue.token_id > 0) {
        out += " tok=";
        out += std::to_string(issue.token_id);
    }
    out += ' ';
    out += issue.message;
    return out;
}

}  // namespace tbkit
