#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "avalign/manifest.hpp"
#include "avalign/video.hpp"
#include "avalign/wav.hpp"
#include "fixtures.hpp"

using namespace avalign;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;  // stdout + stderr, interleaved
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(AVALIGN_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool has(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help text covers every subcommand and knob") {
    CliResult top = run_cli("--help");
    CHECK(top.code == 0);
    for (const char* sub : {"align", "batch", "synth", "analyze", "ablate", "inspect"})
        CHECK(has(top.out, sub));

    CliResult al = run_cli("align --help");
    CHECK(al.code == 0);
    for (const char* flag : {"--audio", "--features", "--threshold", "--max-cycles", "--epsilon",
                             "--planner", "--captioner", "--scorer", "--seed", "--backend-url",
                             "--effective-config", "--config"})
        CHECK(has(al.out, flag));

    CliResult sy = run_cli("synth --help");
    CHECK(sy.code == 0);
    for (const char* flag : {"--pairs", "--duration", "--clean-fraction", "--corruptions"})
        CHECK(has(sy.out, flag));
}

TEST_CASE("usage problems exit 64") {
    CHECK(run_cli("").code == 64);                      // subcommand required
    CHECK(run_cli("align").code == 64);                 // missing required flags
    CHECK(run_cli("align --nope").code == 64);          // unknown flag
    CHECK(run_cli("frobnicate").code == 64);            // unknown subcommand
    std::string dir = fixture::scratch_dir("cli_usage");
    CHECK(run_cli("synth --out " + dir + "/c --pairs 0").code == 64);
    CHECK(run_cli("synth --out " + dir + "/c --pairs abc").code == 64);
    CHECK(run_cli("synth --out " + dir + "/c --duration 0.2").code == 64);
    CHECK(run_cli("align --audio a.wav --features f.json --planner alien --effective-config").code ==
          64);
    CHECK(run_cli("align --audio a.wav --features f.json --threshold 1.5 --effective-config").code ==
          64);
}

TEST_CASE("missing inputs exit 66") {
    CliResult r = run_cli("align --audio /definitely/not/here.wav --features /nor/this.json");
    CHECK(r.code == 66);
    CHECK(run_cli("batch --manifest /absent/m.jsonl --out /tmp/unused_cli_out").code == 66);
    CHECK(run_cli("inspect --audio /absent.wav").code == 66);
    CHECK(run_cli("align --audio a.wav --features f.json --config /absent/cfg.json").code == 66);
}

TEST_CASE("effective config obeys defaults < file < flags") {
    std::string dir = fixture::scratch_dir("cli_config");
    std::string cfg = dir + "/cfg.json";
    {
        std::ofstream f(cfg);
        f << R"({"threshold": 0.7, "seed": 9, "planner": "random"})";
    }
    std::string base = "--log error align --audio a.wav --features f.json --effective-config ";

    CliResult defaults = run_cli("--log error align --audio a.wav --features f.json "
                                 "--effective-config --backend-token hunter2");
    REQUIRE(defaults.code == 0);
    json jd = json::parse(defaults.out);
    CHECK(jd["threshold"] == doctest::Approx(0.85));
    CHECK(jd["planner"] == "rule");
    CHECK(jd["seed"] == 0);
    CHECK(jd["backend_token"] == "<set>");
    CHECK(jd["audio"] == "a.wav");

    CliResult layered = run_cli(base + "--config " + cfg);
    REQUIRE(layered.code == 0);
    json jl = json::parse(layered.out);
    CHECK(jl["threshold"] == doctest::Approx(0.7));
    CHECK(jl["seed"] == 9);
    CHECK(jl["planner"] == "random");

    CliResult overridden = run_cli(base + "--config " + cfg + " --threshold 0.95");
    REQUIRE(overridden.code == 0);
    json jo = json::parse(overridden.out);
    CHECK(jo["threshold"] == doctest::Approx(0.95));  // flag beats file
    CHECK(jo["seed"] == 9);                           // file beats default

    // wrong-typed key and non-object files are rejected
    {
        std::ofstream f(dir + "/bad_type.json");
        f << R"({"threshold": "high"})";
    }
    CHECK(run_cli(base + "--config " + dir + "/bad_type.json").code == 64);
    {
        std::ofstream f(dir + "/not_object.json");
        f << "[1, 2]";
    }
    CHECK(run_cli(base + "--config " + dir + "/not_object.json").code == 66);
}

TEST_CASE("synth is deterministic and batch consumes its corpus") {
    std::string dir = fixture::scratch_dir("cli_pipeline");

    CliResult s1 = run_cli("synth --out " + dir + "/c1 --pairs 3 --seed 5 --duration 3");
    REQUIRE(s1.code == 0);
    CHECK(has(s1.out, "wrote 3 pairs"));
    CliResult s2 = run_cli("synth --out " + dir + "/c2 --pairs 3 --seed 5 --duration 3");
    REQUIRE(s2.code == 0);
    CHECK(slurp(dir + "/c1/manifest.jsonl") == slurp(dir + "/c2/manifest.jsonl"));
    CHECK(slurp(dir + "/c1/audio/pair_0000.wav") == slurp(dir + "/c2/audio/pair_0000.wav"));

    CliResult forced = run_cli("synth --out " + dir + "/c3 --pairs 2 --seed 5 --duration 3 "
                               "--classes bell --corruptions gain --clean-fraction 1.0");
    REQUIRE(forced.code == 0);
    std::vector<AVPairRecord> recs = read_manifest(dir + "/c3/manifest.jsonl");
    REQUIRE(recs.size() == 2);
    for (const AVPairRecord& r : recs) {
        CHECK(r.ground_truth["class"] == "bell");
        CHECK(r.ground_truth["corruption"]["kind"] == "none");
    }

    CliResult b = run_cli("batch --manifest " + dir + "/c1/manifest.jsonl --out " + dir +
                          "/c1_out --max-cycles 2 --seed 4");
    REQUIRE(b.code == 0);
    CHECK(has(b.out, "pairs"));
    CHECK(has(b.out, "mean final min-score"));
    CHECK(std::filesystem::exists(dir + "/c1_out/traces.jsonl"));
    CHECK(std::filesystem::exists(dir + "/c1_out/report.json"));
}

TEST_CASE("align and inspect run end to end on one pair") {
    std::string dir = fixture::scratch_dir("cli_align");
    std::string wav = dir + "/pair.wav";
    std::string feats = dir + "/pair.json";
    write_wav(wav, fixture::pulsed_audio(2.0, 0.25, 3.0, 600.0));
    save_video_features(feats, fixture::pulsed_video(2.0, 0.25, 3.0, "dog"));

    std::string out = dir + "/pair.aligned.wav";
    std::string trace = dir + "/pair.trace.jsonl";
    CliResult r = run_cli("align --audio " + wav + " --features " + feats + " --out " + out +
                          " --trace " + trace + " --max-cycles 2");
    REQUIRE(r.code == 0);
    CHECK(has(r.out, "pair=pair"));
    CHECK(has(r.out, "terminal="));
    CHECK(has(r.out, "min="));
    CHECK(std::filesystem::exists(out));
    CHECK(std::filesystem::exists(trace));

    CliResult text = run_cli("inspect --audio " + wav + " --features " + feats);
    REQUIRE(text.code == 0);
    CHECK(text.out.size() > 0);

    CliResult js = run_cli("--log error inspect --audio " + wav + " --features " + feats + " --json");
    REQUIRE(js.code == 0);
    json j = json::parse(js.out);
    CHECK(j["audio"]["text"].is_string());
    CHECK(j["audio"]["features"].is_object());
    CHECK(j["video"]["text"].is_string());
}

TEST_CASE("analyze and ablate run at desk scale") {
    std::string dir = fixture::scratch_dir("cli_experiments");
    REQUIRE(run_cli("synth --out " + dir + "/c --pairs 8 --seed 6 --duration 3").code == 0);
    std::string manifest = dir + "/c/manifest.jsonl";

    CliResult an = run_cli("analyze --manifest " + manifest + " --true 4 --false 4 --seed 3 --out " +
                           dir + "/mix");
    REQUIRE(an.code == 0);
    CHECK(has(an.out, "true"));
    CHECK(has(an.out, "alignment"));
    CHECK(std::filesystem::exists(dir + "/mix/mixture.json"));
    CHECK(std::filesystem::exists(dir + "/mix/mixture.txt"));
    json mj = json::parse(slurp(dir + "/mix/mixture.json"));
    CHECK(mj["cells"].size() == 5);

    // a cell the corpus cannot cover
    CHECK(run_cli("analyze --manifest " + manifest + " --true 50 --false 50").code == 65);

    CliResult ab = run_cli("ablate --manifest " + manifest + " --seeds 1 --max-cycles 1 --out " +
                           dir + "/abl");
    REQUIRE(ab.code == 0);
    CHECK(has(ab.out, "agent(rule)"));
    CHECK(has(ab.out, "mean agent win rate"));
    CHECK(std::filesystem::exists(dir + "/abl/ablation.json"));
    CHECK(run_cli("ablate --manifest " + manifest + " --seeds x,y").code == 64);
}
