#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avalign/audio.hpp"
#include "avalign/stft.hpp"
#include "avalign/wavelet.hpp"

#include <nlohmann/json_fwd.hpp>

namespace avalign {

enum class ActionKind {
    spectral_subtraction,
    wiener_filter,
    wavelet_denoise,
    spectral_gate,
    speed_mod,
    pitch_mod,
    volume_adjust,
    fill_blanks,
};

enum class FillMode { context_noise, comfort_noise };

bool is_noise_filter(ActionKind k);
bool is_coordination(ActionKind k);
const std::vector<ActionKind>& all_action_kinds();
std::string action_kind_name(ActionKind k);
ActionKind parse_action_kind(const std::string& name);  // throws IllegalAction
std::string wavelet_name(Wavelet w);
std::string fill_mode_name(FillMode m);

// Flat parameter block; each kind reads (and serializes) only its own fields.
struct ActionParams {
    // noise estimation (spectral_subtraction, wiener_filter)
    double noise_percentile = 10.0;  // (0, 50]
    double oversubtraction = 1.5;    // [1, 3]
    double floor_db = -40.0;         // [-300, 0]
    // spectral_gate
    double gate_threshold_db = -35.0;  // [-300, 100], relative to per-bin peak
    double attack_ms = 5.0;            // [0, 1000]
    double release_ms = 50.0;          // [0, 5000]
    // wavelet_denoise
    Wavelet wavelet = Wavelet::db4;
    int levels = 5;  // [1, 8]
    // speed_mod / pitch_mod
    double speed_factor = 1.0;     // [0.5, 2]
    double pitch_semitones = 0.0;  // [-12, 12]
    // volume_adjust (exactly one of the two set)
    std::optional<double> gain_db;     // [-30, 30]
    std::optional<double> target_rms;  // (0, 1]
    // fill_blanks
    double blank_min_ms = 120.0;  // [20, 5000]
    FillMode fill_mode = FillMode::context_noise;
    std::uint32_t seed = 0;
};

struct EditAction {
    ActionKind kind = ActionKind::volume_adjust;
    ActionParams params;
    std::string rationale;
};

// Throws ParamOutOfRange on any violation of the ranges above.
void validate_action(const EditAction& a);

// Pure function of (audio, action): same inputs give the same bytes out.
// Output never contains NaN/Inf and stays within [-1, 1].
AudioBuffer apply_action(const AudioBuffer& audio, const EditAction& a);

// Ordered plan, at most one noise filter followed by at most one
// coordination action.
struct ActionPlan {
    std::vector<EditAction> actions;
    std::string rationale;
};

void validate_plan(const ActionPlan& p);  // throws IllegalAction
AudioBuffer apply_plan(const AudioBuffer& audio, const ActionPlan& p);

// Equality on kind + parameters (rationale ignored); used for plan history.
bool same_action(const EditAction& a, const EditAction& b);
bool same_plan(const ActionPlan& a, const ActionPlan& b);

nlohmann::json action_to_json(const EditAction& a);
EditAction action_from_json(const nlohmann::json& j, bool strict);  // strict: reject unknown keys / ranges
nlohmann::json plan_to_json(const ActionPlan& p);
ActionPlan plan_from_json(const nlohmann::json& j, bool strict);

}  // namespace avalign
