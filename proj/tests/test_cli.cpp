#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("coordnet-cli-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string binary() {
    const char* bin = std::getenv("COORDNET_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "COORDNET_BIN must point at the cli binary");
    return bin;
}

int run_cli(const std::string& args, const std::string& capture_file = "/dev/null") {
    std::string cmd = "\"" + binary() + "\" " + args + " >\"" + capture_file + "\" 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// six posts of one message ten seconds apart across three groups, plus one
// unrelated post
std::string write_corpus(const TempDir& dir) {
    auto path = dir.file("input.jsonl");
    std::ofstream out(path);
    const char* groups[] = {"g1", "g2", "g3"};
    for (int i = 0; i < 6; ++i) {
        json rec;
        rec["post_id"] = "p" + std::to_string(i);
        rec["group_id"] = groups[i % 3];
        rec["group_name"] = "Grupo " + std::to_string(i % 3 + 1);
        rec["timestamp"] = 100 + i * 10;
        rec["message"] = "mensagem coordenada repetida em varios grupos";
        rec["media_type"] = "status";
        out << rec.dump() << '\n';
    }
    json organic;
    organic["post_id"] = "p9";
    organic["group_id"] = "g1";
    organic["group_name"] = nullptr;
    organic["timestamp"] = 9000;
    organic["message"] = "um desabafo organico sem nenhuma copia";
    organic["media_type"] = "status";
    out << organic.dump() << '\n';
    return path;
}

}  // namespace

TEST_CASE("help exits zero and names the subcommands") {
    TempDir dir("help");
    auto capture = dir.file("help.txt");
    CHECK(run_cli("--help", capture) == 0);
    auto text = slurp(capture);
    for (const char* name : {"ingest", "detect", "graph", "communities", "report", "simulate", "run"}) {
        CHECK(text.find(name) != std::string::npos);
    }
}

TEST_CASE("bad invocations exit 2") {
    TempDir dir("bad");
    CHECK(run_cli("") == 2);                           // a subcommand is required
    CHECK(run_cli("--nonsense") == 2);                 // unknown flag
    CHECK(run_cli("ingest") == 2);                     // --input is required
    CHECK(run_cli("ingest --input x --format xml --output-dir " + dir.str()) == 2);
    CHECK(run_cli("detect --window-seconds 5 --estimate-threshold --output-dir " + dir.str()) == 2);
    CHECK(run_cli("ingest --input " + dir.file("absent.jsonl")) == 2);  // no output dir
}

TEST_CASE("missing input exits 3") {
    TempDir dir("io");
    CHECK(run_cli("run --input " + dir.file("absent.jsonl") + " --output-dir " + dir.str()) == 3);
    CHECK(run_cli("ingest --input " + dir.file("absent.jsonl") + " --output-dir " + dir.str()) == 3);
}

TEST_CASE("flag validation exits 2") {
    TempDir dir("flags");
    write_corpus(dir);
    CHECK(run_cli("graph --min-degree -1 --output-dir " + dir.str()) == 2);
    CHECK(run_cli("communities --resolution 0 --output-dir " + dir.str()) == 2);
    CHECK(run_cli("detect --quantile 0 --output-dir " + dir.str()) == 2);
    CHECK(run_cli("report --top-n 0 --output-dir " + dir.str()) == 2);
}

TEST_CASE("malformed config exits 2 and writes nothing") {
    TempDir dir("badconfig");
    auto input = write_corpus(dir);
    auto config = dir.file("config.json");
    std::ofstream(config) << R"({"detection": {"window": 30}})";
    auto out = dir.path / "out";
    CHECK(run_cli("run --config " + config + " --input " + input + " --output-dir " +
                  out.string()) == 2);
    CHECK_FALSE(fs::exists(out / "posts.jsonl"));
    CHECK_FALSE(fs::exists(out / "manifest.json"));
}

TEST_CASE("full run produces the artifact set") {
    TempDir dir("run");
    auto input = write_corpus(dir);
    auto out = dir.path / "out";
    CHECK(run_cli("run --input " + input + " --output-dir " + out.string()) == 0);
    for (const char* name : {"posts.jsonl", "corpus_stats.json", "chains.jsonl", "edges.csv",
                             "vertices.csv", "communities.csv", "narratives.json", "summary.json",
                             "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(out / name), name);
    }
    auto summary = json::parse(slurp((out / "summary.json").string()));
    CHECK(summary["corpus"]["unique_posts"] == 7);
    CHECK(summary["chains"]["count"] == 1);
    // default min_degree 100 empties the graph
    CHECK(summary["graph"]["vertices"] == 0);
    CHECK_FALSE(fs::exists(out / "graph.gexf"));
}

TEST_CASE("staged invocations match a single run") {
    TempDir dir("staged");
    auto input = write_corpus(dir);
    auto config = dir.file("config.json");
    std::ofstream(config) << R"({"graph": {"min_degree": 1}})";

    auto run_dir = dir.path / "run";
    CHECK(run_cli("run --config " + config + " --input " + input + " --output-dir " +
                  run_dir.string()) == 0);

    auto staged = dir.path / "staged";
    std::string tail = " --config " + config + " --output-dir " + staged.string();
    CHECK(run_cli("ingest --input " + input + tail) == 0);
    CHECK(run_cli("detect" + tail) == 0);
    CHECK(run_cli("graph" + tail) == 0);
    CHECK(run_cli("communities" + tail) == 0);
    CHECK(run_cli("report" + tail) == 0);

    for (std::string name : {"posts.jsonl", "chains.jsonl", "edges.csv", "vertices.csv",
                             "communities.csv", "narratives.json", "summary.json", "graph.gexf"}) {
        CAPTURE(name);
        CHECK(slurp((staged / name).string()) == slurp((run_dir / name).string()));
    }
    CHECK_FALSE(fs::exists(staged / "manifest.json"));
    CHECK(fs::exists(run_dir / "manifest.json"));
}

TEST_CASE("window flag changes detection") {
    TempDir dir("window");
    auto input = write_corpus(dir);
    std::string tail = " --output-dir " + dir.str();
    CHECK(run_cli("ingest --input " + input + tail) == 0);

    CHECK(run_cli("detect --window-seconds 5" + tail) == 0);
    CHECK(slurp(dir.file("chains.jsonl")).empty());

    CHECK(run_cli("detect --window-seconds 50" + tail) == 0);
    CHECK_FALSE(slurp(dir.file("chains.jsonl")).empty());
}

TEST_CASE("graph flags control the filter") {
    TempDir dir("graphflags");
    auto input = write_corpus(dir);
    std::string tail = " --output-dir " + dir.str();
    CHECK(run_cli("ingest --input " + input + tail) == 0);
    CHECK(run_cli("detect" + tail) == 0);

    CHECK(run_cli("graph --min-degree 1" + tail) == 0);
    auto vertices = slurp(dir.file("vertices.csv"));
    // header plus the three coordinated groups
    CHECK(std::count(vertices.begin(), vertices.end(), '\n') == 4);

    CHECK(run_cli("graph --min-degree 100" + tail) == 0);
    vertices = slurp(dir.file("vertices.csv"));
    CHECK(std::count(vertices.begin(), vertices.end(), '\n') == 1);
}

TEST_CASE("simulate writes a labeled corpus") {
    TempDir dir("simulate");
    auto scenario = dir.file("scenario.json");
    std::ofstream(scenario) << R"({
        "seed": 4,
        "n_groups": 6,
        "organic": {"n_posts": 20},
        "campaigns": [{"n_groups": 3, "n_keys": 1, "shares_per_key": 6,
                       "burst_interval_seconds": 5}]
    })";
    CHECK(run_cli("simulate --scenario " + scenario + " --output-dir " + dir.str()) == 0);
    CHECK(fs::exists(dir.file("posts.jsonl")));
    CHECK(fs::exists(dir.file("ground_truth.jsonl")));

    auto posts = slurp(dir.file("posts.jsonl"));
    CHECK(std::count(posts.begin(), posts.end(), '\n') == 26);

    // no scenario anywhere -> config error
    TempDir bare("simulate-bare");
    CHECK(run_cli("simulate --output-dir " + bare.str()) == 2);
}

TEST_CASE("synthetic run needs a scenario") {
    TempDir dir("synth-run");
    CHECK(run_cli("run --input synthetic --output-dir " + dir.str()) == 2);
}
