#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("FEEDAUDIT_CLI");
    REQUIRE_MESSAGE(env != nullptr, "FEEDAUDIT_CLI must point at the feedaudit binary");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("feedaudit-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run(const std::string& args, const fs::path& stderr_to = {}) {
    std::string cmd = cli_path() + " " + args + " >/dev/null";
    if (!stderr_to.empty()) cmd += " 2>" + stderr_to.string();
    else cmd += " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

const char* kHandSnapshots =
    "{\"format_version\":\"feedaudit.snapshots/1\"}\n"
    "{\"bot_id\":\"b1\",\"snapshot_time\":\"2018-01-10T07:00:00Z\",\"entries\":"
    "[{\"position\":1,\"post_id\":\"a2\",\"publisher_id\":\"A\",\"publication_time\":"
    "\"2018-01-10T06:59:00Z\"},{\"position\":2,\"post_id\":\"a1\",\"publisher_id\":\"A\","
    "\"publication_time\":\"2018-01-10T06:58:00Z\"}]}\n"
    "{\"bot_id\":\"b1\",\"snapshot_time\":\"2018-01-10T08:00:00Z\",\"entries\":"
    "[{\"position\":1,\"post_id\":\"b1\",\"publisher_id\":\"B\",\"publication_time\":"
    "\"2018-01-10T07:59:00Z\"},{\"position\":2,\"post_id\":\"a2\",\"publisher_id\":\"A\","
    "\"publication_time\":\"2018-01-10T06:59:00Z\"}]}\n";

const char* kHandMetricsGolden =
    "bot_id,publisher_id,K,occupancy,visibility,normalized_occupancy,"
    "impressions,unique_posts,snapshots\n"
    "b1,A,2,1.5,1,0.75,3,2,2\n"
    "b1,B,2,0.5,0.5,0.25,1,1,2\n";

const char* kSimConfig = R"({
  "publishers": [{"id": "p1", "rate": 1.0}, {"id": "p2", "rate": 1.0}],
  "bots": [{"id": "b1", "acceptance": {"p1": 1.0, "p2": 0.5}}],
  "k": 2,
  "snapshot_interval": 5.0,
  "snapshot_count": 60
})";

}  // namespace

TEST_CASE("help and argument errors") {
    CHECK(run("--help") == 0);
    CHECK(run("metrics --help") == 0);
    CHECK(run("") == 1);                     // a subcommand is required
    CHECK(run("metrics --bogus x") == 1);    // unknown flag
    CHECK(run("frobnicate") == 1);           // unknown subcommand
}

TEST_CASE("simulate writes a dataset and is reproducible") {
    TempDir dir;
    const auto config = dir.path / "config.json";
    write_file(config, kSimConfig);

    CHECK(run("simulate --config " + config.string() + " --seed 42 --out " +
              (dir.path / "data").string()) == 0);
    for (const char* name :
         {"snapshots.jsonl", "catalog.jsonl", "truth_rates.csv", "manifest.json"}) {
        CHECK(fs::exists(dir.path / "data" / name));
    }

    CHECK(run("simulate --config " + config.string() + " --seed 42 --out " +
              (dir.path / "data2").string()) == 0);
    for (const char* name :
         {"snapshots.jsonl", "catalog.jsonl", "truth_rates.csv", "manifest.json"}) {
        CHECK(read_file(dir.path / "data" / name) == read_file(dir.path / "data2" / name));
    }

    // a different seed changes the data
    CHECK(run("simulate --config " + config.string() + " --seed 43 --out " +
              (dir.path / "data3").string()) == 0);
    CHECK(read_file(dir.path / "data" / "snapshots.jsonl") !=
          read_file(dir.path / "data3" / "snapshots.jsonl"));
}

TEST_CASE("simulate reports a missing config as an I/O error") {
    TempDir dir;
    const auto err = dir.path / "err.txt";
    CHECK(run("simulate --config " + (dir.path / "nope.json").string() + " --seed 1 --out " +
                  (dir.path / "out").string(),
              err) == 2);
    CHECK(read_file(err).find("nope.json") != std::string::npos);
}

TEST_CASE("metrics matches the golden report for the hand dataset") {
    TempDir dir;
    const auto snaps = dir.path / "snapshots.jsonl";
    write_file(snaps, kHandSnapshots);
    const auto out = dir.path / "exposure.csv";
    CHECK(run("metrics --snapshots " + snaps.string() + " --k 2 --out " + out.string()) == 0);
    CHECK(read_file(out) == kHandMetricsGolden);
}

TEST_CASE("metrics rejects K below 1") {
    TempDir dir;
    const auto snaps = dir.path / "snapshots.jsonl";
    write_file(snaps, kHandSnapshots);
    const auto err = dir.path / "err.txt";
    CHECK(run("metrics --snapshots " + snaps.string() + " --k 0 --out " +
                  (dir.path / "x.csv").string(),
              err) == 1);
    CHECK(read_file(err).find("K must be >= 1") != std::string::npos);
}

TEST_CASE("validate writes the scatter and rejects an empty dataset") {
    TempDir dir;
    const auto snaps = dir.path / "snapshots.jsonl";
    write_file(snaps, kHandSnapshots);
    const auto out = dir.path / "scatter.csv";
    CHECK(run("validate --snapshots " + snaps.string() + " --k 2 --out " + out.string()) == 0);
    const auto text = read_file(out);
    CHECK(text.find("bot_id,publisher_id,K,n_measured,n_model") == 0);
    CHECK(text.find("b1,A,2,1.5,1.33333333333") != std::string::npos);

    const auto empty = dir.path / "empty.jsonl";
    write_file(empty, "{\"format_version\":\"feedaudit.snapshots/1\"}\n");
    CHECK(run("validate --snapshots " + empty.string() + " --k 1 --out " +
              (dir.path / "y.csv").string()) == 1);
}

TEST_CASE("curve emits one row per publisher and K") {
    TempDir dir;
    const auto snaps = dir.path / "snapshots.jsonl";
    write_file(snaps, kHandSnapshots);
    const auto out = dir.path / "curve.csv";
    CHECK(run("curve --snapshots " + snaps.string() + " --k-max 2 --out " + out.string()) == 0);
    CHECK(read_file(out) ==
          "bot_id,publisher_id,K,normalized_occupancy\n"
          "b1,A,1,0.5\n"
          "b1,A,2,0.75\n"
          "b1,B,1,0.5\n"
          "b1,B,2,0.25\n");
}

TEST_CASE("bias runs end to end and validates its flags") {
    TempDir dir;
    const auto config = dir.path / "config.json";
    write_file(config, kSimConfig);
    REQUIRE(run("simulate --config " + config.string() + " --seed 7 --out " +
                (dir.path / "data").string()) == 0);

    const auto snaps = (dir.path / "data" / "snapshots.jsonl").string();
    const auto catalog = (dir.path / "data" / "catalog.jsonl").string();
    const auto out = dir.path / "bias.csv";

    CHECK(run("bias --snapshots " + snaps + " --catalog " + catalog +
              " --k 1 --replicates 200 --level 0.95 --seed 3 --out " + out.string()) == 0);
    const auto text = read_file(out);
    CHECK(text.find("bot_id,publisher_id,K,n_model,n_unfiltered,bias,boot_mean,"
                    "ci_low,ci_high,replicates,level") == 0);

    // reruns with the same seed are byte-identical
    const auto out2 = dir.path / "bias2.csv";
    CHECK(run("bias --snapshots " + snaps + " --catalog " + catalog +
              " --k 1 --replicates 200 --level 0.95 --seed 3 --out " + out2.string()) == 0);
    CHECK(read_file(out) == read_file(out2));

    CHECK(run("bias --snapshots " + snaps + " --catalog " + catalog +
              " --k 1 --level 1.5 --seed 3 --out " + (dir.path / "z.csv").string()) == 1);
    CHECK(run("bias --snapshots " + snaps + " --catalog " + catalog +
              " --k 1 --replicates 0 --seed 3 --out " + (dir.path / "z.csv").string()) == 1);
}
