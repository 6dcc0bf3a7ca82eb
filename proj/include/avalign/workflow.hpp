#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "avalign/actions.hpp"
#include "avalign/backend.hpp"
#include "avalign/caption.hpp"
#include "avalign/manifest.hpp"
#include "avalign/planner.hpp"
#include "avalign/scoring.hpp"

namespace avalign {

enum class CaptionerKind { builtin, remote };

struct WorkflowConfig {
    double threshold = 0.85;          // stop once min(alignment, temporal) reaches this
    int max_cycles = 5;
    double improvement_epsilon = 0.01;  // min-score gain required to accept a candidate
    PlannerKind planner = PlannerKind::rule;
    CaptionerKind captioner = CaptionerKind::builtin;
    ScorerKind scorer = ScorerKind::proxy;
    bool fallback_builtin = true;     // fall back to builtin caption/score on backend errors
    std::uint64_t seed = 0;
    PlannerConfig planner_cfg;
    CaptionConfig caption_cfg;
    ScorerConfig scorer_cfg;
    BackendEndpoint backend;
};

struct CycleRecord {
    int cycle = 0;  // 1-based
    ActionPlan plan;
    ReflectionScores scores;  // scores of the candidate this cycle produced
    bool accepted = false;
    std::string audio_hash;  // hash of the candidate audio
};

struct WorkflowTrace {
    std::string pair_id;
    Caption audio_caption;
    Caption video_caption;
    ReflectionScores baseline;
    std::vector<CycleRecord> cycles;
    ReflectionScores final_scores;
    std::string terminal;  // threshold_met | budget_exhausted | planner_exhausted | error
    std::string error;
    bool backend_fallback = false;  // a remote call failed and builtin filled in
    std::string input_hash;
    std::string output_hash;
};

struct PairResult {
    AudioBuffer audio;  // best accepted audio; the unmodified input if nothing was accepted
    WorkflowTrace trace;
};

// Injection point for tests: given a context, produce the next plan.
using PlannerFn = std::function<ActionPlan(const PlanContext&)>;

// One full agentic pass over a pair: caption, score the original, then
// plan / apply-from-original / re-score until the threshold or a budget is
// hit. Candidates that fail to improve the min score by improvement_epsilon
// are reverted.
PairResult run_pair(const AudioBuffer& audio, const VideoFeatureSeries& video,
                    const std::string& pair_id, const WorkflowConfig& cfg,
                    const Scorer& scorer, PlannerFn planner_override = nullptr);

nlohmann::json trace_to_json(const WorkflowTrace& t);
WorkflowTrace trace_from_json(const nlohmann::json& j);
std::vector<WorkflowTrace> read_traces(const std::string& path);
void write_traces(const std::string& path, const std::vector<WorkflowTrace>& traces);

struct BatchReport {
    std::size_t n_pairs = 0;
    std::size_t n_completed = 0;
    std::size_t n_errored = 0;
    double mean_baseline_min = 0.0;
    double mean_final_min = 0.0;
    double mean_delta = 0.0;
    double mean_cycles = 0.0;
    std::map<std::string, std::size_t> terminal_counts;
    std::map<std::string, std::size_t> accepted_action_counts;
};

nlohmann::json report_to_json(const BatchReport& r);
std::string report_to_text(const BatchReport& r);

struct BatchResult {
    std::vector<WorkflowTrace> traces;  // sorted by pair_id
    BatchReport report;
};

// Runs every manifest record through run_pair. A failing pair is recorded
// with terminal "error" and never aborts the batch. When out_dir is nonempty
// the batch writes aligned/<pair_id>.wav, traces.jsonl, manifest.jsonl,
// report.json and report.txt. Results are independent of parallelism.
BatchResult run_batch(const std::vector<AVPairRecord>& records, const std::string& manifest_root,
                      const WorkflowConfig& cfg, const std::string& out_dir, int parallelism = 1,
                      PlannerFn planner_override = nullptr);

}  // namespace avalign
