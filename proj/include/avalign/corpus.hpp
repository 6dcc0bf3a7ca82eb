#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "avalign/audio.hpp"
#include "avalign/manifest.hpp"
#include "avalign/scoring.hpp"
#include "avalign/video.hpp"
#include "avalign/workflow.hpp"

namespace avalign {

enum class CorruptionKind { none, noise, offset, speed, gap, gain };

std::string corruption_kind_name(CorruptionKind k);
CorruptionKind parse_corruption_kind(const std::string& name);

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::none;
    double value = 0.0;  // snr dB / offset s / speed factor / gap s / gain dB
};

nlohmann::json corruption_to_json(const CorruptionSpec& c);
CorruptionSpec corruption_from_json(const nlohmann::json& j);

struct SynthConfig {
    int n_pairs = 50;
    std::uint64_t seed = 0;
    double duration_s = 3.0;
    double frame_rate_hz = 25.0;
    std::vector<std::string> classes;      // default: every builtin profile label
    std::vector<std::string> corruptions;  // kinds drawn uniformly; default: all but none
    double clean_fraction = 0.0;           // share of pairs left uncorrupted
    // corruption value ranges
    double noise_snr_db_lo = -8.0, noise_snr_db_hi = 3.0;
    double offset_s_lo = 0.65, offset_s_hi = 0.85;
    double speed_lo = 0.6, speed_hi = 1.7;  // values near 1 are re-drawn
    double gap_s_lo = 1.2, gap_s_hi = 1.6;
    double gain_db_lo = -30.0, gain_db_hi = -14.0;
};

struct SynthPair {
    AudioBuffer clean;
    AudioBuffer corrupted;  // equals clean when kind == none
    VideoFeatureSeries video;
    CorruptionSpec corruption;
    std::string klass;
};

// Deterministic in (cfg.seed, index).
SynthPair synth_pair(const SynthConfig& cfg, int index, const ClassProfileTable& profiles);

AudioBuffer apply_corruption(const AudioBuffer& clean, const CorruptionSpec& c, std::uint64_t seed);

// Writes <dir>/audio/<pair>.wav, <dir>/audio/<pair>.clean.wav and
// <dir>/manifest.jsonl. Same cfg, same tree, byte for byte.
std::vector<AVPairRecord> synth_corpus(const std::string& dir, const SynthConfig& cfg);

// ---- data-mixture study ----

struct MixtureCell {
    std::size_t n_true = 0;
    std::size_t n_false = 0;
    double true_fraction = 0.0;
    double mean_alignment = 0.0;
    double mean_temporal = 0.0;
    double mean_min = 0.0;
};

struct MixtureReport {
    std::vector<MixtureCell> cells;  // ordered as configured
};

struct MixtureConfig {
    std::size_t base_true = 50;
    std::size_t base_false = 50;
    std::uint64_t seed = 0;
};

// Samples true pairs (clean audio) and false pairs (corrupted audio) from a
// synthetic manifest with ground truth, over the five-cell grid
// {(T,0),(0,F),(T,F),(T,2F),(2T,F)}. Throws InsufficientPairs when the
// manifest cannot cover a cell.
MixtureReport mixture_study(const std::vector<AVPairRecord>& records, const std::string& root,
                            const Scorer& scorer, const MixtureConfig& cfg);

nlohmann::json mixture_to_json(const MixtureReport& r);
std::string mixture_to_text(const MixtureReport& r);

// ---- rule-vs-random ablation ----

struct AblationArm {
    std::string name;
    std::uint64_t seed = 0;
    double mean_final_min = 0.0;
    double mean_baseline_min = 0.0;
};

struct AblationReport {
    AblationArm agent;
    std::vector<AblationArm> random_arms;   // one per seed
    std::vector<double> win_rates;          // agent wins per random arm, ties count for the agent
    double mean_win_rate = 0.0;
};

AblationReport ablation_study(const std::vector<AVPairRecord>& records, const std::string& root,
                              const WorkflowConfig& base_cfg, const std::vector<std::uint64_t>& seeds);

nlohmann::json ablation_to_json(const AblationReport& r);
std::string ablation_to_text(const AblationReport& r);

// Best min-score reachable with a single default-parameter action (the
// original audio counts as a candidate); brute-force ceiling for recovery
// checks.
double best_single_action_score(const AudioBuffer& audio, const VideoFeatureSeries& video,
                                const Scorer& scorer, std::uint32_t action_seed = 0);

}  // namespace avalign
