#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avalign/actions.hpp"
#include "avalign/caption.hpp"
#include "avalign/scoring.hpp"

namespace avalign {

enum class PlannerKind { rule, random, remote };

std::string planner_kind_name(PlannerKind k);
PlannerKind parse_planner_kind(const std::string& name);

struct PlanContext {
    Caption audio_caption;
    Caption video_caption;
    std::optional<ReflectionScores> feedback;  // scores of the latest attempt
    int cycle_index = 0;                       // 0-based
    std::vector<ActionPlan> history;           // plans already tried on this pair
    std::uint32_t action_seed = 0;             // seed for stochastic actions (fill_blanks)
};

struct PlannerConfig {
    double snr_low_db = 10.0;        // below this the noise-filter rule fires
    double silence_gap = 0.2;        // silence_ratio above this suggests fill_blanks
    double rate_mismatch = 0.15;     // relative event-rate disagreement for speed_mod
    double rms_lo = 0.03;            // loudness band for volume_adjust
    double rms_hi = 0.5;
    double target_rms = 0.1;
    double pitch_min_semitones = 3.0;  // smaller tonal offsets are left alone
    double tonal_flatness = 0.1;
    double video_active = 0.01;      // activity_mean above this counts as active video
    std::map<std::string, double> class_centroid_hz;  // expected tonal center per label
};

// Deterministic rule-table planner. Never re-emits a plan present in
// ctx.history; when every ranked alternative is exhausted it falls back to
// the no-op plan (volume_adjust gain 0).
ActionPlan plan_rule(const PlanContext& ctx, const PlannerConfig& cfg = {});

// Uniform random baseline: one or two actions with in-range parameters,
// deterministic for a given seed.
ActionPlan plan_random(const PlanContext& ctx, std::uint64_t seed);

}  // namespace avalign
