#include <doctest.h>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalign/corpus.hpp"
#include "avalign/errors.hpp"
#include "avalign/manifest.hpp"
#include "avalign/wav.hpp"
#include "avalign/workflow.hpp"
#include "fixtures.hpp"

using namespace avalign;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int dead_port() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    int port = ntohs(addr.sin_port);
    ::close(fd);
    return port;
}

struct Pair {
    AudioBuffer audio;
    VideoFeatureSeries video;
};

Pair clean_pair() {
    Pair p;
    p.audio = fixture::pulsed_audio(2.0, 0.25, 3.0, 600.0);
    p.video = fixture::pulsed_video(2.0, 0.25, 3.0, "dog");
    return p;
}

Pair noisy_pair() {
    Pair p = clean_pair();
    CorruptionSpec c;
    c.kind = CorruptionKind::noise;
    c.value = -2.0;
    p.audio = apply_corruption(p.audio, c, 7);
    return p;
}

EditAction make_action(ActionKind kind) {
    EditAction a;
    a.kind = kind;
    return a;
}

ActionPlan single_plan(EditAction a, const std::string& why) {
    ActionPlan p;
    p.actions.push_back(std::move(a));
    p.rationale = why;
    return p;
}

std::string dump_traces(const std::vector<WorkflowTrace>& ts) {
    std::string s;
    for (const WorkflowTrace& t : ts) s += trace_to_json(t).dump() + "\n";
    return s;
}

}  // namespace

TEST_CASE("pair already above threshold never plans") {
    Pair p = clean_pair();
    WorkflowConfig cfg;
    cfg.threshold = 0.1;  // any sane baseline clears this
    Scorer scorer;

    int planner_calls = 0;
    PlannerFn counting = [&](const PlanContext&) -> ActionPlan {
        ++planner_calls;
        return single_plan(make_action(ActionKind::wiener_filter), "should not run");
    };

    PairResult res = run_pair(p.audio, p.video, "clean_0", cfg, scorer, counting);
    CHECK(planner_calls == 0);
    CHECK(res.trace.terminal == "threshold_met");
    CHECK(res.trace.cycles.empty());
    CHECK(res.audio.samples == p.audio.samples);
    CHECK(res.trace.input_hash == audio_hash(p.audio));
    CHECK(res.trace.output_hash == res.trace.input_hash);
    CHECK(res.trace.final_scores.alignment == res.trace.baseline.alignment);
    CHECK(res.trace.final_scores.temporal == res.trace.baseline.temporal);
    CHECK(res.trace.audio_caption.text.size() > 0);
    CHECK(res.trace.video_caption.labels == std::vector<std::string>{"dog"});
}

TEST_CASE("destructive plans are all reverted and the original survives") {
    Pair p = noisy_pair();
    WorkflowConfig cfg;
    cfg.threshold = 0.99;
    cfg.max_cycles = 4;
    Scorer scorer;

    // Distinct fully-closed gates: each candidate is exact silence, which can
    // never clear the acceptance margin over a non-silent baseline.
    PlannerFn adversary = [](const PlanContext& ctx) -> ActionPlan {
        EditAction a = make_action(ActionKind::spectral_gate);
        a.params.gate_threshold_db = 60.0 + 10.0 * ctx.cycle_index;
        return single_plan(a, "sabotage");
    };

    PairResult res = run_pair(p.audio, p.video, "hostile", cfg, scorer, adversary);
    REQUIRE(res.trace.cycles.size() == 4);
    for (const CycleRecord& c : res.trace.cycles) CHECK_FALSE(c.accepted);
    CHECK(res.trace.terminal == "budget_exhausted");
    // untouched, bit for bit
    CHECK(res.audio.samples == p.audio.samples);
    CHECK(res.trace.output_hash == res.trace.input_hash);
    CHECK(res.trace.final_scores.alignment == res.trace.baseline.alignment);
    CHECK(res.trace.final_scores.temporal == res.trace.baseline.temporal);
}

TEST_CASE("identity plan is accepted when epsilon is zero") {
    Pair p = noisy_pair();
    WorkflowConfig cfg;
    cfg.threshold = 0.999;
    cfg.max_cycles = 1;
    cfg.improvement_epsilon = 0.0;
    Scorer scorer;

    PlannerFn identity = [](const PlanContext&) {
        EditAction a = make_action(ActionKind::volume_adjust);
        a.params.gain_db = 0.0;
        return single_plan(a, "noop");
    };

    PairResult res = run_pair(p.audio, p.video, "ident", cfg, scorer, identity);
    REQUIRE(res.trace.cycles.size() == 1);
    CHECK(res.trace.cycles[0].accepted);
    CHECK(res.audio.samples == p.audio.samples);
    CHECK(res.trace.output_hash == res.trace.input_hash);
    CHECK(res.trace.cycles[0].audio_hash == res.trace.input_hash);
    CHECK(res.trace.terminal == "budget_exhausted");
}

TEST_CASE("a repeated plan exhausts the planner") {
    Pair p = noisy_pair();
    WorkflowConfig cfg;
    cfg.threshold = 0.999;
    cfg.max_cycles = 5;
    Scorer scorer;

    PlannerFn stuck = [](const PlanContext&) {
        return single_plan(make_action(ActionKind::wiener_filter), "same thing again");
    };

    PairResult res = run_pair(p.audio, p.video, "loop", cfg, scorer, stuck);
    CHECK(res.trace.cycles.size() == 1);
    CHECK(res.trace.terminal == "planner_exhausted");
}

TEST_CASE("rule planner lifts a noisy pair") {
    Pair p = noisy_pair();
    WorkflowConfig cfg;  // defaults: threshold 0.85, rule planner
    Scorer scorer;

    PairResult res = run_pair(p.audio, p.video, "noisy_0", cfg, scorer);
    CHECK(res.trace.final_scores.min_score() >= res.trace.baseline.min_score());
    int accepted = 0;
    for (const CycleRecord& c : res.trace.cycles) accepted += c.accepted ? 1 : 0;
    CHECK(accepted >= 1);
    CHECK(res.trace.final_scores.min_score() > res.trace.baseline.min_score());
    CHECK(res.trace.output_hash == audio_hash(res.audio));
    if (res.trace.terminal == "threshold_met") {
        CHECK(res.trace.final_scores.alignment >= cfg.threshold);
        CHECK(res.trace.final_scores.temporal >= cfg.threshold);
    }
}

TEST_CASE("invalid input becomes an error terminal") {
    WorkflowConfig cfg;
    Scorer scorer;
    AudioBuffer empty;
    VideoFeatureSeries video = fixture::pulsed_video(2.0, 0.25, 3.0, "dog");

    PairResult res = run_pair(empty, video, "broken", cfg, scorer);
    CHECK(res.trace.terminal == "error");
    CHECK_FALSE(res.trace.error.empty());
    CHECK(res.audio.samples.empty());
    CHECK(res.trace.output_hash == res.trace.input_hash);

    Pair p = clean_pair();
    VideoFeatureSeries no_frames;
    PairResult res2 = run_pair(p.audio, no_frames, "novideo", cfg, scorer);
    CHECK(res2.trace.terminal == "error");
    CHECK(res2.audio.samples == p.audio.samples);
}

TEST_CASE("trace json survives a round trip byte for byte") {
    Pair p = noisy_pair();
    WorkflowConfig cfg;
    cfg.max_cycles = 3;
    Scorer scorer;
    WorkflowTrace tr = run_pair(p.audio, p.video, "rt_0", cfg, scorer).trace;

    std::string once = trace_to_json(tr).dump();
    WorkflowTrace back = trace_from_json(json::parse(once));
    CHECK(trace_to_json(back).dump() == once);

    // error traces too
    AudioBuffer empty;
    WorkflowTrace err = run_pair(empty, p.video, "rt_err", cfg, scorer).trace;
    std::string err_once = trace_to_json(err).dump();
    CHECK(trace_to_json(trace_from_json(json::parse(err_once))).dump() == err_once);

    std::string dir = fixture::scratch_dir("traces_rt");
    std::string first = dir + "/t.jsonl";
    std::string second = dir + "/t2.jsonl";
    write_traces(first, {tr, err});
    std::vector<WorkflowTrace> loaded = read_traces(first);
    REQUIRE(loaded.size() == 2);
    write_traces(second, loaded);
    CHECK(slurp(first) == slurp(second));

    CHECK_THROWS_AS(read_traces(dir + "/absent.jsonl"), IoError);
    std::ofstream bad(dir + "/bad.jsonl");
    bad << "{broken\n";
    bad.close();
    CHECK_THROWS_WITH_AS(read_traces(dir + "/bad.jsonl"), doctest::Contains("line 1"), ParseError);
}

TEST_CASE("batch runs a corpus with exact error accounting") {
    std::string dir = fixture::scratch_dir("batch_corpus");
    SynthConfig scfg;
    scfg.n_pairs = 8;
    scfg.seed = 11;
    scfg.duration_s = 3.0;
    scfg.clean_fraction = 0.25;
    std::vector<AVPairRecord> records = synth_corpus(dir, scfg);
    REQUIRE(records.size() == 8);
    records[2].audio_path = "audio/definitely_missing.wav";

    WorkflowConfig cfg;
    cfg.max_cycles = 3;
    cfg.seed = 5;
    std::string out = dir + "/out";
    BatchResult br = run_batch(records, dir, cfg, out, 1);

    CHECK(br.report.n_pairs == 8);
    CHECK(br.report.n_errored == 1);
    CHECK(br.report.n_completed == 7);
    CHECK(br.report.terminal_counts.at("error") == 1);
    std::size_t total = 0;
    for (const auto& [k, v] : br.report.terminal_counts) total += v;
    CHECK(total == 8);
    CHECK(br.report.mean_delta ==
          doctest::Approx(br.report.mean_final_min - br.report.mean_baseline_min).epsilon(1e-12));

    REQUIRE(br.traces.size() == 8);
    for (std::size_t i = 1; i < br.traces.size(); ++i)
        CHECK(br.traces[i - 1].pair_id < br.traces[i].pair_id);
    int errors_seen = 0;
    for (const WorkflowTrace& t : br.traces) {
        if (t.terminal == "error") {
            ++errors_seen;
            CHECK_FALSE(t.error.empty());
            continue;
        }
        CHECK(t.final_scores.min_score() >= t.baseline.min_score());
    }
    CHECK(errors_seen == 1);

    namespace fs = std::filesystem;
    std::size_t wavs = 0;
    for (const auto& e : fs::directory_iterator(out + "/aligned")) {
        CHECK(e.path().extension() == ".wav");
        ++wavs;
    }
    CHECK(wavs == 7);

    std::vector<AVPairRecord> out_records = read_manifest(out + "/manifest.jsonl");
    REQUIRE(out_records.size() == 7);
    for (const AVPairRecord& r : out_records) {
        CHECK(r.extra.contains("final_scores"));
        CHECK(r.extra["final_scores"]["alignment"].is_number());
        CHECK(r.extra.contains("terminal"));
        AudioBuffer a = load_audio((fs::path(out) / r.audio_path).string());
        CHECK(a.samples.size() > 0);
    }

    std::vector<WorkflowTrace> disk_traces = read_traces(out + "/traces.jsonl");
    CHECK(disk_traces.size() == 8);
    json rep = json::parse(slurp(out + "/report.json"));
    CHECK(rep["n_pairs"] == 8);
    CHECK(rep["n_errored"] == 1);
    std::string txt = slurp(out + "/report.txt");
    CHECK(txt.find("pairs") != std::string::npos);
    CHECK(txt.find("mean final min-score") != std::string::npos);
    CHECK(txt.find("terminal error") != std::string::npos);
}

TEST_CASE("parallel batch matches the serial batch byte for byte") {
    std::string dir = fixture::scratch_dir("batch_parallel");
    SynthConfig scfg;
    scfg.n_pairs = 6;
    scfg.seed = 23;
    scfg.duration_s = 3.0;
    std::vector<AVPairRecord> records = synth_corpus(dir, scfg);

    WorkflowConfig cfg;
    cfg.max_cycles = 2;
    cfg.seed = 5;

    BatchResult serial = run_batch(records, dir, cfg, "", 1);
    BatchResult wide = run_batch(records, dir, cfg, "", 8);
    BatchResult again = run_batch(records, dir, cfg, "", 1);

    CHECK(dump_traces(serial.traces) == dump_traces(wide.traces));
    CHECK(dump_traces(serial.traces) == dump_traces(again.traces));
    CHECK(report_to_json(serial.report).dump() == report_to_json(wide.report).dump());

    CHECK_THROWS_AS(run_batch(records, dir, cfg, "", 0), ParamOutOfRange);

    BatchResult none = run_batch({}, dir, cfg, "", 1);
    CHECK(none.report.n_pairs == 0);
    CHECK(none.traces.empty());
}

TEST_CASE("backend failures fall back to builtin when allowed") {
    Pair p = noisy_pair();
    Scorer scorer;

    WorkflowConfig cfg;
    cfg.max_cycles = 2;
    cfg.backend.url = "http://127.0.0.1:" + std::to_string(dead_port()) + "/task";
    cfg.backend.timeout_ms = 300;
    cfg.backend.max_retries = 0;
    cfg.backend.retry_backoff_ms = 1;

    SUBCASE("remote captioner") {
        cfg.captioner = CaptionerKind::remote;
        PairResult res = run_pair(p.audio, p.video, "fb_cap", cfg, scorer);
        CHECK(res.trace.backend_fallback);
        CHECK(res.trace.terminal != "error");
        CHECK(res.trace.audio_caption.source == CaptionSource::builtin);
    }

    SUBCASE("remote captioner, fallback disabled") {
        cfg.captioner = CaptionerKind::remote;
        cfg.fallback_builtin = false;
        PairResult res = run_pair(p.audio, p.video, "fb_cap_off", cfg, scorer);
        CHECK(res.trace.terminal == "error");
        CHECK(res.trace.error.find("cannot reach") != std::string::npos);
        CHECK(res.audio.samples == p.audio.samples);
    }

    SUBCASE("remote planner falls back to the rule planner") {
        WorkflowConfig rule_cfg = cfg;
        rule_cfg.backend = BackendEndpoint{};
        rule_cfg.planner = PlannerKind::rule;
        PairResult want = run_pair(p.audio, p.video, "fb_plan", rule_cfg, scorer);

        cfg.planner = PlannerKind::remote;
        PairResult got = run_pair(p.audio, p.video, "fb_plan", cfg, scorer);
        CHECK(got.trace.backend_fallback);
        CHECK(got.trace.terminal != "error");
        CHECK(trace_to_json(got.trace)["cycles"] == trace_to_json(want.trace)["cycles"]);
        CHECK(got.trace.output_hash == want.trace.output_hash);
    }

    SUBCASE("remote scorer") {
        cfg.scorer = ScorerKind::remote;
        PairResult res = run_pair(p.audio, p.video, "fb_score", cfg, scorer);
        CHECK(res.trace.backend_fallback);
        CHECK(res.trace.terminal != "error");
    }
}
