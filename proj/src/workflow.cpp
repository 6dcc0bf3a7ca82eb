#include "avalign/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "avalign/errors.hpp"
#include "avalign/util.hpp"
#include "avalign/wav.hpp"

namespace avalign {

namespace {

nlohmann::json scores_to_json(const ReflectionScores& s) {
    nlohmann::json j;
    j["alignment"] = s.alignment;
    j["temporal"] = s.temporal;
    if (s.degenerate) j["degenerate"] = true;
    return j;
}

ReflectionScores scores_from_json(const nlohmann::json& j) {
    ReflectionScores s;
    s.alignment = j.value("alignment", 0.0);
    s.temporal = j.value("temporal", 0.0);
    s.degenerate = j.value("degenerate", false);
    return s;
}

// Caption with optional remote backend and builtin fallback.
Caption caption_audio_for(const AudioBuffer& audio, const WorkflowConfig& cfg,
                          BackendClient* client, bool* fell_back) {
    if (cfg.captioner == CaptionerKind::remote && client != nullptr) {
        try {
            return client->caption_audio(audio);
        } catch (const AvalignError&) {
            if (!cfg.fallback_builtin) throw;
            *fell_back = true;
        }
    }
    return describe_audio(audio, cfg.caption_cfg);
}

Caption caption_video_for(const VideoFeatureSeries& video, const WorkflowConfig& cfg,
                          BackendClient* client, bool* fell_back) {
    if (cfg.captioner == CaptionerKind::remote && client != nullptr) {
        try {
            return client->caption_video(video);
        } catch (const AvalignError&) {
            if (!cfg.fallback_builtin) throw;
            *fell_back = true;
        }
    }
    return describe_video(video, cfg.caption_cfg);
}

ReflectionScores score_for(const AudioBuffer& audio, const VideoFeatureSeries& video,
                           const WorkflowConfig& cfg, const Scorer& scorer, BackendClient* client,
                           bool* fell_back) {
    if (cfg.scorer == ScorerKind::remote && client != nullptr) {
        try {
            return client->score(audio, video);
        } catch (const AvalignError&) {
            if (!cfg.fallback_builtin) throw;
            *fell_back = true;
        }
    }
    return scorer.reflect(audio, video);
}

}  // namespace

PairResult run_pair(const AudioBuffer& audio, const VideoFeatureSeries& video,
                    const std::string& pair_id, const WorkflowConfig& cfg, const Scorer& scorer,
                    PlannerFn planner_override) {
    PairResult res;
    WorkflowTrace& tr = res.trace;
    tr.pair_id = pair_id;
    res.audio = audio;
    tr.input_hash = audio_hash(audio);
    tr.output_hash = tr.input_hash;

    std::unique_ptr<BackendClient> client;
    const bool wants_remote = cfg.captioner == CaptionerKind::remote ||
                              cfg.planner == PlannerKind::remote || cfg.scorer == ScorerKind::remote;
    if (wants_remote && cfg.backend.configured()) client.reset(new BackendClient(cfg.backend));

    try {
        check_audio(audio);
        check_video(video);

        bool fell_back = false;
        tr.audio_caption = caption_audio_for(audio, cfg, client.get(), &fell_back);
        tr.video_caption = caption_video_for(video, cfg, client.get(), &fell_back);
        if (tr.video_caption.labels.empty()) tr.video_caption.labels = video.labels;

        tr.baseline = score_for(audio, video, cfg, scorer, client.get(), &fell_back);
        tr.final_scores = tr.baseline;

        AudioBuffer best = audio;
        ReflectionScores best_scores = tr.baseline;
        ReflectionScores last_scores = tr.baseline;
        std::vector<ActionPlan> history;

        PlannerConfig planner_cfg = cfg.planner_cfg;
        if (planner_cfg.class_centroid_hz.empty()) {
            for (const std::string& l : scorer.profiles().labels())
                planner_cfg.class_centroid_hz[l] = scorer.profiles().centroid_hz(l);
        }

        auto next_plan = [&](const PlanContext& ctx) -> ActionPlan {
            if (planner_override) return planner_override(ctx);
            switch (cfg.planner) {
                case PlannerKind::rule: return plan_rule(ctx, planner_cfg);
                case PlannerKind::random:
                    return plan_random(ctx, derive_seed(cfg.seed, pair_id + "#cycle" +
                                                                      std::to_string(ctx.cycle_index)));
                case PlannerKind::remote:
                    if (client) {
                        try {
                            return client->plan(ctx);
                        } catch (const AvalignError&) {
                            if (!cfg.fallback_builtin) throw;
                            tr.backend_fallback = true;
                        }
                    }
                    return plan_rule(ctx, planner_cfg);
            }
            return plan_rule(ctx, planner_cfg);
        };

        tr.terminal = best_scores.min_score() >= cfg.threshold ? "threshold_met" : "";

        for (int cycle = 1; tr.terminal.empty() && cycle <= cfg.max_cycles; ++cycle) {
            PlanContext ctx;
            ctx.audio_caption = tr.audio_caption;
            ctx.video_caption = tr.video_caption;
            ctx.feedback = last_scores;
            ctx.cycle_index = cycle - 1;
            ctx.history = history;
            ctx.action_seed = static_cast<std::uint32_t>(
                derive_seed(cfg.seed, pair_id + "#action" + std::to_string(cycle)));

            ActionPlan plan = next_plan(ctx);
            bool repeated = false;
            for (const ActionPlan& h : history) {
                if (same_plan(plan, h)) {
                    repeated = true;
                    break;
                }
            }
            if (repeated) {
                tr.terminal = "planner_exhausted";
                break;
            }

            // Revert policy: every candidate is rebuilt from the original
            // audio so rejected edits cannot accumulate error.
            AudioBuffer candidate = apply_plan(audio, plan);
            bool fb = false;
            ReflectionScores cand_scores = score_for(candidate, video, cfg, scorer, client.get(), &fb);
            if (fb) tr.backend_fallback = true;

            CycleRecord rec;
            rec.cycle = cycle;
            rec.plan = plan;
            rec.scores = cand_scores;
            rec.audio_hash = audio_hash(candidate);
            rec.accepted = cand_scores.min_score() >= best_scores.min_score() + cfg.improvement_epsilon;
            if (rec.accepted) {
                best = std::move(candidate);
                best_scores = cand_scores;
            }
            tr.cycles.push_back(rec);
            history.push_back(plan);
            last_scores = cand_scores;

            if (best_scores.min_score() >= cfg.threshold) {
                tr.terminal = "threshold_met";
            } else if (cycle == cfg.max_cycles) {
                tr.terminal = "budget_exhausted";
            }
        }
        if (tr.terminal.empty())
            tr.terminal =
                best_scores.min_score() >= cfg.threshold ? "threshold_met" : "budget_exhausted";

        if (fell_back) tr.backend_fallback = true;
        tr.final_scores = best_scores;
        res.audio = std::move(best);
        tr.output_hash = audio_hash(res.audio);
    } catch (const AvalignError& e) {
        tr.terminal = "error";
        tr.error = e.what();
        res.audio = audio;
        tr.output_hash = tr.input_hash;
    }
    return res;
}

nlohmann::json trace_to_json(const WorkflowTrace& t) {
    nlohmann::json j;
    j["pair_id"] = t.pair_id;
    j["audio_caption"] = caption_to_json(t.audio_caption);
    j["video_caption"] = caption_to_json(t.video_caption);
    j["baseline"] = scores_to_json(t.baseline);
    j["final"] = scores_to_json(t.final_scores);
    j["terminal"] = t.terminal;
    if (!t.error.empty()) j["error"] = t.error;
    if (t.backend_fallback) j["backend_fallback"] = true;
    j["input_hash"] = t.input_hash;
    j["output_hash"] = t.output_hash;
    j["cycles"] = nlohmann::json::array();
    for (const CycleRecord& c : t.cycles) {
        nlohmann::json cj;
        cj["cycle"] = c.cycle;
        cj["plan"] = plan_to_json(c.plan);
        cj["scores"] = scores_to_json(c.scores);
        cj["decision"] = c.accepted ? "accepted" : "reverted";
        cj["audio_hash"] = c.audio_hash;
        j["cycles"].push_back(cj);
    }
    return j;
}

WorkflowTrace trace_from_json(const nlohmann::json& j) {
    WorkflowTrace t;
    t.pair_id = j.value("pair_id", "");
    if (j.contains("audio_caption")) t.audio_caption = caption_from_json(j["audio_caption"]);
    if (j.contains("video_caption")) t.video_caption = caption_from_json(j["video_caption"]);
    if (j.contains("baseline")) t.baseline = scores_from_json(j["baseline"]);
    if (j.contains("final")) t.final_scores = scores_from_json(j["final"]);
    t.terminal = j.value("terminal", "");
    t.error = j.value("error", "");
    t.backend_fallback = j.value("backend_fallback", false);
    t.input_hash = j.value("input_hash", "");
    t.output_hash = j.value("output_hash", "");
    if (j.contains("cycles")) {
        for (const nlohmann::json& cj : j["cycles"]) {
            CycleRecord c;
            c.cycle = cj.value("cycle", 0);
            if (cj.contains("plan")) c.plan = plan_from_json(cj["plan"], false);
            if (cj.contains("scores")) c.scores = scores_from_json(cj["scores"]);
            c.accepted = cj.value("decision", "") == "accepted";
            c.audio_hash = cj.value("audio_hash", "");
            t.cycles.push_back(c);
        }
    }
    return t;
}

std::vector<WorkflowTrace> read_traces(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open traces: " + path);
    std::vector<WorkflowTrace> out;
    std::string line;
    long line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(trace_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad trace JSON: ") + e.what(), line_no);
        }
    }
    return out;
}

void write_traces(const std::string& path, const std::vector<WorkflowTrace>& traces) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write traces: " + path);
    for (const WorkflowTrace& t : traces) f << trace_to_json(t).dump() << "\n";
}

nlohmann::json report_to_json(const BatchReport& r) {
    nlohmann::json j;
    j["n_pairs"] = r.n_pairs;
    j["n_completed"] = r.n_completed;
    j["n_errored"] = r.n_errored;
    j["mean_baseline_min"] = r.mean_baseline_min;
    j["mean_final_min"] = r.mean_final_min;
    j["mean_delta"] = r.mean_delta;
    j["mean_cycles"] = r.mean_cycles;
    j["terminal_counts"] = r.terminal_counts;
    j["accepted_action_counts"] = r.accepted_action_counts;
    return j;
}

std::string report_to_text(const BatchReport& r) {
    std::string s;
    auto row = [&](const std::string& k, const std::string& v) {
        s += k;
        s.append(k.size() < 26 ? 26 - k.size() : 1, ' ');
        s += v + "\n";
    };
    row("pairs", std::to_string(r.n_pairs));
    row("completed", std::to_string(r.n_completed));
    row("errored", std::to_string(r.n_errored));
    row("mean baseline min-score", fmt_fixed(r.mean_baseline_min));
    row("mean final min-score", fmt_fixed(r.mean_final_min));
    row("mean delta", fmt_fixed(r.mean_delta));
    row("mean cycles", fmt_fixed(r.mean_cycles, 2));
    for (const auto& [k, v] : r.terminal_counts) row("terminal " + k, std::to_string(v));
    for (const auto& [k, v] : r.accepted_action_counts) row("accepted " + k, std::to_string(v));
    return s;
}

BatchResult run_batch(const std::vector<AVPairRecord>& records, const std::string& manifest_root,
                      const WorkflowConfig& cfg, const std::string& out_dir, int parallelism,
                      PlannerFn planner_override) {
    namespace fs = std::filesystem;
    if (parallelism < 1) throw ParamOutOfRange("parallelism must be >= 1");

    const Scorer scorer(cfg.scorer_cfg);
    BatchResult result;
    result.traces.resize(records.size());
    std::vector<AudioBuffer> outputs(records.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= records.size()) break;
            const AVPairRecord& rec = records[i];
            try {
                fs::path audio_path = fs::path(rec.audio_path);
                if (audio_path.is_relative() && !manifest_root.empty())
                    audio_path = fs::path(manifest_root) / audio_path;
                AudioBuffer audio = load_audio(audio_path.string());
                PairResult pr = run_pair(audio, rec.video, rec.pair_id, cfg, scorer, planner_override);
                outputs[i] = std::move(pr.audio);
                result.traces[i] = std::move(pr.trace);
            } catch (const AvalignError& e) {
                WorkflowTrace t;
                t.pair_id = rec.pair_id;
                t.terminal = "error";
                t.error = e.what();
                result.traces[i] = std::move(t);
            }
        }
    };

    const int n_workers = std::min<int>(parallelism, static_cast<int>(records.size()) > 0
                                                         ? static_cast<int>(records.size())
                                                         : 1);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Canonical order regardless of scheduling.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.traces[a].pair_id < result.traces[b].pair_id;
    });

    std::vector<WorkflowTrace> sorted;
    sorted.reserve(order.size());
    for (std::size_t i : order) sorted.push_back(std::move(result.traces[i]));
    result.traces = std::move(sorted);

    BatchReport& rep = result.report;
    rep.n_pairs = records.size();
    double acc_base = 0.0, acc_final = 0.0, acc_cycles = 0.0;
    for (const WorkflowTrace& t : result.traces) {
        rep.terminal_counts[t.terminal]++;
        if (t.terminal == "error") {
            rep.n_errored++;
            continue;
        }
        rep.n_completed++;
        acc_base += t.baseline.min_score();
        acc_final += t.final_scores.min_score();
        acc_cycles += static_cast<double>(t.cycles.size());
        for (const CycleRecord& c : t.cycles) {
            if (!c.accepted) continue;
            for (const EditAction& a : c.plan.actions)
                rep.accepted_action_counts[action_kind_name(a.kind)]++;
        }
    }
    if (rep.n_completed > 0) {
        rep.mean_baseline_min = acc_base / static_cast<double>(rep.n_completed);
        rep.mean_final_min = acc_final / static_cast<double>(rep.n_completed);
        rep.mean_delta = rep.mean_final_min - rep.mean_baseline_min;
        rep.mean_cycles = acc_cycles / static_cast<double>(rep.n_completed);
    }

    if (!out_dir.empty()) {
        fs::create_directories(fs::path(out_dir) / "aligned");
        std::vector<AVPairRecord> out_records;
        // Write outputs in canonical order; skip errored pairs.
        std::size_t k = 0;
        for (std::size_t i : order) {
            const AVPairRecord& rec = records[i];
            const WorkflowTrace& t = result.traces[k++];
            if (t.terminal == "error") continue;
            std::string rel = "aligned/" + rec.pair_id + ".wav";
            write_wav((fs::path(out_dir) / rel).string(), outputs[i]);
            AVPairRecord out_rec = rec;
            out_rec.audio_path = rel;
            out_rec.extra["final_scores"] =
                nlohmann::json{{"alignment", t.final_scores.alignment},
                               {"temporal", t.final_scores.temporal}};
            out_rec.extra["terminal"] = t.terminal;
            out_records.push_back(std::move(out_rec));
        }
        write_manifest((fs::path(out_dir) / "manifest.jsonl").string(), out_records);
        write_traces((fs::path(out_dir) / "traces.jsonl").string(), result.traces);
        std::ofstream rj((fs::path(out_dir) / "report.json").string(), std::ios::trunc);
        rj << report_to_json(rep).dump(2) << "\n";
        std::ofstream rt((fs::path(out_dir) / "report.txt").string(), std::ios::trunc);
        rt << report_to_text(rep);
    }
    return result;
}

}  // namespace avalign
