// tbkit command line: validate | harmonize | merge | split | stats | eval | fetch.
// Exit codes: 0 success, 1 validation errors found, 2 I/O or format failure,
// 3 usage error.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "tbkit/conllu.hpp"
#include "tbkit/corpus_ops.hpp"
#include "tbkit/evaluator.hpp"
#include "tbkit/harmonizer.hpp"
#include "tbkit/validator.hpp"

namespace fs = std::filesystem;
using namespace tbkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 3;

bool g_quiet = false;

void note(const std::string& message) {
    if (!g_quiet) std::cerr << message << "\n";
}

// Files behind a path argument: a directory expands to its *.conllu files.
std::vector<fs::path> expand_path(const std::string& arg) {
    const fs::path p{arg};
    if (fs::is_directory(p)) return list_corpus_files(p, "*.conllu");
    if (fs::exists(p)) return {p};
    throw Error("no such file or directory: " + arg);
}

std::vector<fs::path> expand_paths(const std::vector<std::string>& args) {
    std::vector<fs::path> files;
    for (const std::string& arg : args)
        for (fs::path& p : expand_path(arg)) files.push_back(std::move(p));
    return files;
}

// Runs `fn(sentence)` over every sentence of every file, rethrowing parse
// failures with the file name attached.
template <typename Fn>
void for_each_sentence(const std::vector<fs::path>& files, Fn&& fn) {
    for (const fs::path& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw Error("cannot open " + file.string());
        ConlluReader reader(in, file.string());
        try {
            while (std::optional<Sentence> s = reader.next()) fn(*s);
        } catch (const ParseError& e) {
            throw Error(file.string() + ": " + e.what());
        }
    }
}

Treebank load_paths(const std::vector<std::string>& args) {
    Treebank tb;
    for_each_sentence(expand_paths(args),
                      [&](Sentence& s) { tb.sentences.push_back(std::move(s)); });
    return tb;
}

// Output stream that is either standard output or a freshly created file.
class OutStream {
  public:
    explicit OutStream(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot write " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

// --------------------------------------------------------------------------
// validate

struct ValidateArgs {
    std::vector<std::string> paths;
    std::string rules;
    std::string matrix;
};

int run_validate(const ValidateArgs& args, const std::string& format) {
    const RuleSet rules = args.rules.empty() ? RuleSet{} : RuleSet::from_csv(args.rules);
    const UposDeprelMatrix matrix =
        args.matrix.empty() ? UposDeprelMatrix::builtin() : UposDeprelMatrix::load_file(args.matrix);
    StreamingValidator checker(rules, matrix);
    const bool jsonl = format == "jsonl";
    for_each_sentence(expand_paths(args.paths), [&](const Sentence& s) {
        for (const ValidationIssue& issue : checker.check(s))
            std::cout << (jsonl ? issue_to_jsonl(issue) : issue_to_text(issue)) << "\n";
    });
    note("checked " + std::to_string(checker.sentences_checked()) + " sentences: " +
         std::to_string(checker.errors()) + " errors, " + std::to_string(checker.warnings()) +
         " warnings");
    return checker.errors() > 0 ? kExitValidation : kExitOk;
}

// --------------------------------------------------------------------------
// harmonize

struct HarmonizeArgs {
    std::vector<std::string> paths;
    std::string config;
    std::string out;
    std::string changelog;
    std::string passes;
    std::string source_version;
};

int run_harmonize(const HarmonizeArgs& args) {
    HarmonizeConfig cfg =
        args.config.empty() ? HarmonizeConfig{} : HarmonizeConfig::load_file(args.config);
    if (!args.passes.empty()) {
        cfg.passes.clear();
        std::istringstream items(args.passes);
        std::string item;
        while (std::getline(items, item, ','))
            if (!item.empty()) cfg.passes.push_back(item);
    }
    if (!args.source_version.empty())
        cfg.source_guidelines_version =
            args.source_version == "v1" ? GuidelinesVersion::v1 : GuidelinesVersion::v2;

    OutStream out(args.out);
    std::ofstream changelog;
    if (!args.changelog.empty()) {
        changelog.open(args.changelog, std::ios::binary);
        if (!changelog) throw Error("cannot write " + args.changelog);
    }

    std::size_t sentences = 0, changes = 0, failures = 0;
    for_each_sentence(expand_paths(args.paths), [&](const Sentence& s) {
        ++sentences;
        try {
            auto [harmonized, log] = harmonize_sentence(s, cfg);
            out.get() << serialize_sentence(harmonized) << "\n";
            changes += log.size();
            if (changelog.is_open())
                for (const ChangeLogEntry& e : log) changelog << change_to_jsonl(e) << "\n";
        } catch (const Error& e) {
            ++failures;
            std::cerr << "sent " << (s.meta.sent_id().empty() ? "?" : s.meta.sent_id())
                      << " left unchanged: " << e.what() << "\n";
            out.get() << serialize_sentence(s) << "\n";
        }
    });
    note("harmonized " + std::to_string(sentences) + " sentences: " + std::to_string(changes) +
         " changes, " + std::to_string(failures) + " failures");
    return kExitOk;
}

// --------------------------------------------------------------------------
// merge

struct MergeArgs {
    std::vector<std::string> paths;
    std::string priority;
    std::string out;
    bool renumber = false;
};

int run_merge(const MergeArgs& args) {
    Treebank all;
    for (const std::string& arg : args.paths)
        for_each_sentence(expand_path(arg), [&](Sentence& s) {
            all.sentences.push_back(std::move(s));
        });

    std::vector<std::string> priority;
    std::istringstream items(args.priority);
    std::string item;
    while (std::getline(items, item, ','))
        if (!item.empty()) priority.push_back(item);

    DedupResult dedup = deduplicate(all, priority);
    for (const std::string& w : dedup.warnings) std::cerr << "warning: " << w << "\n";
    Treebank merged = args.renumber ? renumber(dedup.treebank) : std::move(dedup.treebank);

    OutStream out(args.out);
    out.get() << serialize_conllu(merged);
    note("kept " + std::to_string(merged.sentences.size()) + " sentences, removed " +
         std::to_string(dedup.removed) + " duplicates");
    return kExitOk;
}

// --------------------------------------------------------------------------
// split

struct SplitArgs {
    std::string path;
    std::string test_children;
    double dev_fraction = 0.10;
    std::string prefix = "split";
};

int run_split(const SplitArgs& args) {
    Treebank tb = load_paths({args.path});
    SplitSpec spec;
    spec.dev_fraction = args.dev_fraction;
    if (!args.test_children.empty()) {
        spec.test_children.clear();
        std::istringstream items(args.test_children);
        std::string item;
        while (std::getline(items, item, ','))
            if (!item.empty()) spec.test_children.push_back(item);
    }
    SplitResult result = split(tb, spec);
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

    const struct {
        const char* name;
        const Treebank* tb;
    } parts[] = {{"train", &result.train}, {"dev", &result.dev}, {"test", &result.test}};
    for (const auto& part : parts) {
        const std::string path = args.prefix + "-" + part.name + ".conllu";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        out << serialize_conllu(*part.tb);
        std::cout << part.name << " " << part.tb->sentences.size() << "\n";
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// stats

struct StatsArgs {
    std::string path;
    std::string by = "type";
};

int run_stats(const StatsArgs& args, const std::string& format) {
    Treebank tb = load_paths({args.path});
    const StatsTable table = args.by == "child" ? corpus_profile(tb) : sentence_type_stats(tb);
    std::cout << (format == "csv" ? table.to_csv() : table.to_text());
    return kExitOk;
}

// --------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string gold;
    std::string pred;
    std::string group_by = "speaker";
    bool exclude_punct = false;
};

int run_eval(const EvalArgs& args, const std::string& format) {
    const Treebank gold = load_paths({args.gold});
    const Treebank pred = load_paths({args.pred});
    const Grouping grouping = args.group_by == "none" ? Grouping::none : Grouping::speaker;
    const GroupedScores scores = score(gold, pred, grouping, !args.exclude_punct);
    std::cout << (format == "csv" ? scores_to_csv(scores) : scores_to_text(scores));
    return kExitOk;
}

// --------------------------------------------------------------------------
// fetch

struct FetchItem {
    std::string url;
    std::string name;
    std::string sha256;
};

struct FetchArgs {
    std::vector<std::string> urls;
    std::string manifest;
    std::string dest = ".";
};

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr))
        throw Error("sha256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string basename_of_url(const std::string& url) {
    std::string path = url;
    const std::size_t scheme = path.find("://");
    if (scheme != std::string::npos) path = path.substr(scheme + 3);
    const std::size_t slash = path.find('/');
    path = slash == std::string::npos ? "" : path.substr(slash + 1);
    const std::size_t last = path.find_last_of('/');
    if (last != std::string::npos) path = path.substr(last + 1);
    const std::size_t query = path.find_first_of("?#");
    if (query != std::string::npos) path = path.substr(0, query);
    return path.empty() ? "download" : path;
}

bool fetch_url(const std::string& url, std::string& body, std::string& error) {
    if (url.rfind("https://", 0) != 0 && url.rfind("http://", 0) != 0) {
        error = "unsupported URL scheme: " + url;
        return false;
    }
    const std::size_t host_start = url.find("://") + 3;
    const std::size_t slash = url.find('/', host_start);
    const std::string base = slash == std::string::npos ? url : url.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url.substr(slash);

    httplib::Client client(base);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Result res = client.Get(path);
    if (!res) {
        error = "request failed: " + httplib::to_string(res.error());
        return false;
    }
    if (res->status != 200) {
        error = "HTTP status " + std::to_string(res->status);
        return false;
    }
    body = std::move(res->body);
    return true;
}

int run_fetch(const FetchArgs& args) {
    std::vector<FetchItem> items;
    for (const std::string& url : args.urls) items.push_back({url, basename_of_url(url), ""});
    if (!args.manifest.empty()) {
        std::ifstream in(args.manifest);
        if (!in) throw Error("cannot read manifest " + args.manifest);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw Error("bad manifest " + args.manifest + ": " + e.what());
        }
        if (!doc.is_array()) throw Error("manifest must be a JSON array");
        for (const auto& entry : doc) {
            FetchItem item;
            item.url = entry.value("url", "");
            if (item.url.empty()) throw Error("manifest entry without url");
            item.name = entry.value("name", basename_of_url(item.url));
            item.sha256 = entry.value("sha256", "");
            items.push_back(std::move(item));
        }
    }

    fs::create_directories(args.dest);
    std::size_t failures = 0;
    for (const FetchItem& item : items) {
        const fs::path target = fs::path(args.dest) / item.name;
        const fs::path partial = target.string() + ".part";
        std::string body, error;
        if (!fetch_url(item.url, body, error)) {
            std::cerr << "error: " << item.url << ": " << error << "\n";
            ++failures;
            continue;
        }
        if (!item.sha256.empty() && sha256_hex(body) != item.sha256) {
            std::cerr << "error: " << item.url << ": sha256 mismatch\n";
            std::error_code ec;
            fs::remove(partial, ec);
            ++failures;
            continue;
        }
        {
            std::ofstream out(partial, std::ios::binary);
            if (!out) throw Error("cannot write " + partial.string());
            out.write(body.data(), static_cast<std::streamsize>(body.size()));
        }
        fs::rename(partial, target);
        note("fetched " + item.url + " -> " + target.string());
    }
    return failures == 0 ? kExitOk : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"treebank engineering toolkit for CHILDES-style CoNLL-U corpora"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_flag("--quiet,-q", g_quiet, "suppress summaries on standard error");
    app.add_option("--format", format, "output format for reports")
        ->check(CLI::IsMember({"text", "jsonl", "csv"}));

    ValidateArgs validate_args;
    CLI::App* validate = app.add_subcommand("validate", "check treebank files and report issues");
    validate->add_option("paths", validate_args.paths, "input files or directories")->required();
    validate->add_option("--rules", validate_args.rules,
                         "comma-separated rule names (default: all rules)");
    validate->add_option("--matrix", validate_args.matrix, "upos/deprel compatibility rule file");

    HarmonizeArgs harmonize_args;
    CLI::App* harmonize = app.add_subcommand("harmonize", "rewrite treebanks into the unified scheme");
    harmonize->add_option("paths", harmonize_args.paths, "input files or directories")->required();
    harmonize->add_option("--config", harmonize_args.config, "harmonizer config file");
    harmonize->add_option("--out,-o", harmonize_args.out, "output file (default: stdout)");
    harmonize->add_option("--changelog", harmonize_args.changelog, "write JSONL change log here");
    harmonize->add_option("--passes", harmonize_args.passes, "comma-separated pass names");
    harmonize->add_option("--source-version", harmonize_args.source_version,
                          "annotation generation of the input")
        ->check(CLI::IsMember({"v1", "v2"}));

    MergeArgs merge_args;
    CLI::App* merge = app.add_subcommand("merge", "concatenate inputs, dropping duplicates");
    merge->add_option("paths", merge_args.paths, "input files or directories")->required();
    merge->add_option("--priority", merge_args.priority,
                      "comma-separated source labels, most trusted first");
    merge->add_option("--out,-o", merge_args.out, "output file (default: stdout)");
    merge->add_flag("--renumber", merge_args.renumber, "assign sequential sent_ids");

    SplitArgs split_args;
    CLI::App* split_cmd = app.add_subcommand("split", "write train/dev/test files");
    split_cmd->add_option("path", split_args.path, "input file or directory")->required();
    split_cmd->add_option("--test-children", split_args.test_children,
                          "comma-separated child names held out for test");
    split_cmd->add_option("--dev-fraction", split_args.dev_fraction,
                          "share of the non-test pool sent to dev");
    split_cmd->add_option("--prefix", split_args.prefix, "output path prefix");

    StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand("stats", "print corpus statistics");
    stats->add_option("path", stats_args.path, "input file or directory")->required();
    stats->add_option("--by", stats_args.by, "grouping axis")
        ->check(CLI::IsMember({"type", "child"}));

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "attachment scores of pred against gold");
    eval->add_option("--gold", eval_args.gold, "gold file or directory")->required();
    eval->add_option("--pred", eval_args.pred, "predicted file or directory")->required();
    eval->add_option("--group-by", eval_args.group_by, "score grouping")
        ->check(CLI::IsMember({"speaker", "none"}));
    eval->add_flag("--exclude-punct", eval_args.exclude_punct,
                   "skip tokens whose gold relation is punct");

    FetchArgs fetch_args;
    CLI::App* fetch = app.add_subcommand("fetch", "download released treebank files");
    fetch->add_option("urls", fetch_args.urls, "URLs to download");
    fetch->add_option("--manifest", fetch_args.manifest,
                      "JSON array of {url, name, sha256} entries");
    fetch->add_option("--dest", fetch_args.dest, "output directory");

    // Lets global flags (--quiet, --format) appear after the subcommand name.
    for (CLI::App* sub : {validate, harmonize, merge, split_cmd, stats, eval, fetch})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) return run_validate(validate_args, format);
        if (harmonize->parsed()) return run_harmonize(harmonize_args);
        if (merge->parsed()) return run_merge(merge_args);
        if (split_cmd->parsed()) return run_split(split_args);
        if (stats->parsed()) return run_stats(stats_args, format);
        if (eval->parsed()) return run_eval(eval_args, format);
        if (fetch->parsed()) return run_fetch(fetch_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
