// End-to-end runs of the installed command line binary. The binary path
// comes from the TBKIT_CLI environment variable set by the test harness.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "json.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/harmonizer.hpp"

namespace fs = std::filesystem;
using namespace tbkit;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("tbkit-cli-" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args) {
    const char* cli = std::getenv("TBKIT_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "TBKIT_CLI must point at the built binary");
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout." + std::to_string(++counter));
    const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
    const std::string command =
        std::string(cli) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

fs::path write_fixture(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    spit(p, content);
    return p;
}

fs::path write_treebank(const std::string& name, const Treebank& tb) {
    return write_fixture(name, serialize_conllu(tb));
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate reports clean corpora quietly and exits 0") {
    fs::path dir = work_dir() / "clean";
    fs::create_directories(dir);
    spit(dir / "a.conllu", fixtures::kWhosThat);
    spit(dir / "b.conllu", fixtures::kGreenOne);

    CliResult res = run_cli("validate " + dir.string());
    CHECK(res.exit_code == 0);
    CHECK(res.out.empty());
    CHECK(res.err == "checked 2 sentences: 0 errors, 0 warnings\n");

    CliResult quiet = run_cli("--quiet validate " + dir.string());
    CHECK(quiet.exit_code == 0);
    CHECK(quiet.err.empty());
}

TEST_CASE("validate prints one line per issue and exits 1 on errors") {
    fs::path file = write_treebank("seeded.conllu", fixtures::seeded_defect_corpus());

    CliResult res = run_cli("validate " + file.string());
    CHECK(res.exit_code == 1);
    auto lines = lines_of(res.out);
    CHECK(lines.size() == 7);
    CHECK(lines[0] ==
          "warning UPOS_DEPREL sent=101 tok=3 deprel 'advmod' with upos 'ADP' matches a flagged "
          "pattern");
    CHECK(res.err == "checked 5 sentences: 2 errors, 5 warnings\n");

    CliResult jsonl = run_cli("--format jsonl validate " + file.string());
    CHECK(jsonl.exit_code == 1);
    for (const std::string& line : lines_of(jsonl.out)) {
        auto parsed = nlohmann::json::parse(line);
        CHECK(parsed.contains("code"));
        CHECK(parsed.contains("sent_id"));
    }

    // Global flags also work after the subcommand.
    CliResult trailing = run_cli("validate " + file.string() + " --format jsonl");
    CHECK(trailing.out == jsonl.out);
}

TEST_CASE("validate can restrict the rule set") {
    fs::path file = write_treebank("seeded2.conllu", fixtures::seeded_defect_corpus());
    CliResult res = run_cli("validate --rules upos_deprel " + file.string());
    CHECK(res.exit_code == 0);  // only warnings remain
    CHECK(lines_of(res.out).size() == 5);
}

TEST_CASE("missing inputs and parse failures exit 2 with a message") {
    CliResult missing = run_cli("validate /nonexistent-tbkit.conllu");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("error: no such file or directory") != std::string::npos);

    fs::path bad = write_fixture("bad.conllu", "# sent_id = 1\n1\tbroken\n");
    CliResult parse = run_cli("validate " + bad.string());
    CHECK(parse.exit_code == 2);
    CHECK(parse.err.find("bad.conllu: line 2: expected 10 tab-separated columns") !=
          std::string::npos);
}

TEST_CASE("usage problems exit 3") {
    CHECK(run_cli("polish").exit_code == 3);
    CHECK(run_cli("validate").exit_code == 3);          // required path missing
    CHECK(run_cli("eval --gold x").exit_code == 3);     // required --pred missing
    CHECK(run_cli("stats --by weird x").exit_code == 3);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("harmonize writes a corpus, a change log, and the log replays") {
    Treebank original = fixtures::seeded_defect_corpus();
    fs::path in = write_treebank("h-in.conllu", original);
    fs::path out = work_dir() / "h-out.conllu";
    fs::path log = work_dir() / "h-log.jsonl";

    CliResult res = run_cli("harmonize " + in.string() + " --out " + out.string() +
                            " --changelog " + log.string());
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("harmonized 5 sentences:") != std::string::npos);
    CHECK(res.err.find("0 failures") != std::string::npos);

    Treebank harmonized = parse_conllu(slurp(out));
    REQUIRE(harmonized.size() == 5);
    CHECK(harmonized.sentences[0].tokens[2].deprel == "compound:prt");
    CHECK(harmonized.sentences[1].tokens[1].upos == "AUX");
    CHECK(harmonized.sentences[1].tokens[1].lemma == "be");

    std::vector<ChangeLogEntry> entries;
    for (const std::string& line : lines_of(slurp(log))) {
        auto j = nlohmann::json::parse(line);
        ChangeLogEntry e;
        e.sent_id = j["sent_id"].get<std::string>();
        e.token_id = j["token_id"].get<int>();
        e.pass = j["pass"].get<std::string>();
        e.field = j["field"].get<std::string>();
        e.old_value = j["old"].get<std::string>();
        e.new_value = j["new"].get<std::string>();
        entries.push_back(std::move(e));
    }
    REQUIRE(!entries.empty());
    Treebank replayed = replay_changes(original, entries);
    for (Sentence& s : replayed.sentences) s.source.clear();
    for (Sentence& s : harmonized.sentences) s.source.clear();
    CHECK(replayed.sentences == harmonized.sentences);
}

TEST_CASE("harmonize keeps failing sentences unchanged and says so") {
    Treebank tb;
    Sentence broken = fixtures::make_sentence(
        {{"sent_id", "x1"}, {"type", "declarative"}},
        {fixtures::tok(1, "Go", "go", "VERB", "VB", 0, "root", "SpaceAfter=No"),
         fixtures::tok(2, ".", ".", "PUNCT", ".", 1, "punct")});
    // A flat chain with no external attachment cannot be flipped.
    Sentence loop = fixtures::make_sentence(
        {{"sent_id", "x2"}, {"type", "declarative"}},
        {fixtures::tok(1, "Go", "go", "VERB", "VB", 0, "root"),
         fixtures::tok(2, "a", "a", "PROPN", "NNP", 3, "flat"),
         fixtures::tok(3, "b", "b", "PROPN", "NNP", 2, "flat", "SpaceAfter=No"),
         fixtures::tok(4, ".", ".", "PUNCT", ".", 1, "punct")});
    tb.sentences = {broken, loop};
    fs::path in = write_treebank("h-fail.conllu", tb);
    fs::path out = work_dir() / "h-fail-out.conllu";

    CliResult res = run_cli("harmonize " + in.string() + " --source-version v1 --out " +
                            out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("sent x2 left unchanged: pass flip_flat_direction") != std::string::npos);
    CHECK(res.err.find("1 failures") != std::string::npos);

    Treebank result = parse_conllu(slurp(out));
    REQUIRE(result.size() == 2);
    CHECK(result.sentences[1].tokens[1].head == 3);  // untouched
}

TEST_CASE("harmonize accepts a pass subset") {
    fs::path in = write_treebank("h-subset.conllu", fixtures::seeded_defect_corpus());
    CliResult res = run_cli("harmonize " + in.string() + " --passes fix_particles");
    CHECK(res.exit_code == 0);
    Treebank out = parse_conllu(res.out);
    CHECK(out.sentences[0].tokens[2].deprel == "compound:prt");
    CHECK(out.sentences[1].tokens[1].upos == "VERB");  // aux fix not requested
}

TEST_CASE("merge drops cross-source duplicates and can renumber") {
    Sentence a = fixtures::make_sentence({{"sent_id", "22497"},
                                          {"original_sent_id", "946255"},
                                          {"corpus_name", "Kuczaj"}},
                                         {fixtures::tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
    Sentence b = a;
    b.meta.set("sent_id", "900");  // same provenance, different file
    Sentence c = fixtures::make_sentence({{"sent_id", "31"},
                                          {"original_sent_id", "777"},
                                          {"corpus_name", "Kuczaj"}},
                                         {fixtures::tok(1, "yo", "yo", "INTJ", "UH", 0, "root")});
    Treebank first, second;
    first.sentences = {a};
    second.sentences = {b, c};
    fs::path f1 = write_treebank("m1.conllu", first);
    fs::path f2 = write_treebank("m2.conllu", second);
    fs::path out = work_dir() / "merged.conllu";

    CliResult res = run_cli("merge " + f1.string() + " " + f2.string() + " --out " + out.string());
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("kept 2 sentences, removed 1 duplicates") != std::string::npos);
    Treebank merged = parse_conllu(slurp(out));
    REQUIRE(merged.size() == 2);
    CHECK(merged.sentences[0].meta.sent_id() == "22497");

    // Priority by source path flips the winner.
    CliResult pri = run_cli("merge " + f1.string() + " " + f2.string() + " --priority " +
                            f2.string() + " --out " + out.string());
    CHECK(pri.exit_code == 0);
    Treebank flipped = parse_conllu(slurp(out));
    CHECK(flipped.sentences[0].meta.sent_id() == "900");

    CliResult renum = run_cli("merge " + f1.string() + " " + f2.string() + " --renumber --out " +
                              out.string());
    CHECK(renum.exit_code == 0);
    Treebank seq = parse_conllu(slurp(out));
    CHECK(seq.sentences[0].meta.sent_id() == "1");
    CHECK(seq.sentences[1].meta.sent_id() == "2");
    CHECK(seq.sentences[0].meta.original_sent_id() == "946255");
}

TEST_CASE("split writes three files and prints their sizes") {
    Treebank tb;
    for (int i = 1; i <= 8; ++i) {
        Sentence s = fixtures::make_sentence(
            {{"sent_id", std::to_string(i)}, {"child_name", i <= 2 ? "Eve" : "Adam"}},
            {fixtures::tok(1, "hi", "hi", "INTJ", "UH", 0, "root")});
        tb.sentences.push_back(std::move(s));
    }
    fs::path in = write_treebank("split-in.conllu", tb);
    fs::path prefix = work_dir() / "parts";

    CliResult res = run_cli("split " + in.string() + " --test-children Eve --dev-fraction 0.5 " +
                            "--prefix " + prefix.string());
    CHECK(res.exit_code == 0);
    CHECK(res.out == "train 3\ndev 3\ntest 2\n");
    CHECK(parse_conllu(slurp(prefix.string() + "-train.conllu")).size() == 3);
    CHECK(parse_conllu(slurp(prefix.string() + "-dev.conllu")).size() == 3);
    CHECK(parse_conllu(slurp(prefix.string() + "-test.conllu")).size() == 2);
}

TEST_CASE("stats prints type and child tables in text or csv") {
    fs::path in = write_treebank("stats-in.conllu", fixtures::stats_fixture());

    CliResult text = run_cli("stats " + in.string());
    CHECK(text.exit_code == 0);
    CHECK(text.out.find("type") != std::string::npos);
    CHECK(text.out.find("total") != std::string::npos);

    CliResult csv = run_cli("--format csv stats " + in.string());
    CHECK(csv.out ==
          "type,CDS,CS,overall\n"
          "declarative,1,1,2\n"
          "question,2,2,4\n"
          "imperative emphatic,1,1,2\n"
          "others,2,2,4\n"
          "total,6,6,12\n");

    CliResult child = run_cli("--format csv stats --by child " + in.string());
    CHECK(lines_of(child.out)[0] == "child,gold_sents,gold_toks,silver_sents,silver_toks,age_min,age_max");
}

TEST_CASE("eval prints attachment scores with optional grouping") {
    fs::path gold = write_treebank("gold.conllu", fixtures::eval_gold_example());
    fs::path pred = write_treebank("pred.conllu", fixtures::eval_pred_example());

    CliResult res = run_cli("--format csv eval --gold " + gold.string() + " --pred " + pred.string());
    CHECK(res.exit_code == 0);
    CHECK(res.out ==
          "metric,children,parents,overall\n"
          "LAS,66.7,-,66.7\n"
          "UAS,66.7,-,66.7\n");

    CliResult flat = run_cli("--format csv eval --group-by none --gold " + gold.string() +
                             " --pred " + pred.string());
    CHECK(flat.out ==
          "metric,overall\n"
          "LAS,66.7\n"
          "UAS,66.7\n");

    CliResult text = run_cli("eval --gold " + gold.string() + " --pred " + pred.string());
    CHECK(text.out.find("66.7") != std::string::npos);
}

TEST_CASE("eval can ignore punctuation attachments") {
    Treebank gold;
    gold.sentences.push_back(fixtures::make_sentence(
        {{"sent_id", "1"}, {"speaker_role", "Mother"}},
        {fixtures::tok(1, "go", "go", "VERB", "VB", 0, "root"),
         fixtures::tok(2, ".", ".", "PUNCT", ".", 1, "punct")}));
    Treebank pred = gold;
    pred.sentences[0].tokens[1].head = 0;
    pred.sentences[0].tokens[1].deprel = "root";
    fs::path g = write_treebank("pg.conllu", gold);
    fs::path p = write_treebank("pp.conllu", pred);

    CliResult with = run_cli("--format csv eval --group-by none --gold " + g.string() +
                             " --pred " + p.string());
    CHECK(with.out.find("LAS,50.0") != std::string::npos);
    CliResult without = run_cli("--format csv eval --group-by none --exclude-punct --gold " +
                                g.string() + " --pred " + p.string());
    CHECK(without.out.find("LAS,100.0") != std::string::npos);
}

TEST_CASE("fetch downloads files, follows redirects and verifies digests") {
    const std::string payload = "hello treebank\n";
    const std::string digest = "11ee395258c1388931519e2ad711326a863f69fea5a705252e18aa257ef62bdf";

    httplib::Server server;
    server.Get("/data/sample.conllu", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(payload, "text/plain");
    });
    server.Get("/jump", [&](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/data/sample.conllu");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serve([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    fs::path dest = work_dir() / "downloads";

    CliResult direct = run_cli("fetch " + base + "/data/sample.conllu --dest " + dest.string());
    CHECK(direct.exit_code == 0);
    CHECK(slurp(dest / "sample.conllu") == payload);

    CliResult redirect = run_cli("fetch " + base + "/jump --dest " + dest.string());
    CHECK(redirect.exit_code == 0);

    nlohmann::json manifest = nlohmann::json::array();
    manifest.push_back({{"url", base + "/data/sample.conllu"},
                        {"name", "renamed.conllu"},
                        {"sha256", digest}});
    manifest.push_back({{"url", base + "/data/sample.conllu"},
                        {"name", "corrupt.conllu"},
                        {"sha256", std::string(64, '0')}});
    fs::path mf = write_fixture("manifest.json", manifest.dump());

    CliResult mixed = run_cli("fetch --manifest " + mf.string() + " --dest " + dest.string());
    CHECK(mixed.exit_code == 2);  // one entry failed its digest
    CHECK(slurp(dest / "renamed.conllu") == payload);
    CHECK_FALSE(fs::exists(dest / "corrupt.conllu"));
    CHECK(mixed.err.find("sha256 mismatch") != std::string::npos);

    CliResult missing = run_cli("fetch " + base + "/absent --dest " + dest.string());
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("HTTP status 404") != std::string::npos);

    server.stop();
    serve.join();
}

}  // TEST_SUITE
