#include "avalign/planner.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "avalign/errors.hpp"
#include "avalign/util.hpp"

namespace avalign {

std::string planner_kind_name(PlannerKind k) {
    switch (k) {
        case PlannerKind::rule: return "rule";
        case PlannerKind::random: return "random";
        case PlannerKind::remote: return "remote";
    }
    return "rule";
}

PlannerKind parse_planner_kind(const std::string& name) {
    if (name == "rule") return PlannerKind::rule;
    if (name == "random") return PlannerKind::random;
    if (name == "remote") return PlannerKind::remote;
    throw ParamOutOfRange("unknown planner kind: " + name);
}

namespace {

double need_feature(const Caption& c, const std::string& key) {
    auto it = c.features.find(key);
    if (it == c.features.end())
        throw MissingFeatures("caption is missing feature '" + key + "'");
    return it->second;
}

EditAction make_noise(ActionKind kind, std::string why) {
    EditAction a;
    a.kind = kind;
    a.rationale = std::move(why);
    return a;
}

}  // namespace

ActionPlan plan_rule(const PlanContext& ctx, const PlannerConfig& cfg) {
    const Caption& ac = ctx.audio_caption;
    const Caption& vc = ctx.video_caption;

    const double snr = need_feature(ac, "snr_estimate_db");
    const double silence = need_feature(ac, "silence_ratio");
    const double rms_level = need_feature(ac, "rms");
    const double tempo_bpm = need_feature(ac, "tempo_bpm_estimate");
    const double dominant = need_feature(ac, "dominant_band_hz");
    const double flatness = need_feature(ac, "spectral_flatness");
    const double clipping = need_feature(ac, "clipping_ratio");
    const double v_mean = need_feature(vc, "activity_mean");
    const double v_rate = need_feature(vc, "activity_peak_rate");

    // Noise rule.
    std::optional<EditAction> noise;
    if (snr < cfg.snr_low_db) {
        if (clipping > 0.01) {
            noise = make_noise(ActionKind::spectral_subtraction,
                               "low snr " + fmt_fixed(snr, 1) + " dB with clipping");
        } else {
            noise = make_noise(ActionKind::wiener_filter, "low snr " + fmt_fixed(snr, 1) + " dB");
        }
    }

    // Coordination rules, in priority order.
    std::vector<EditAction> coords;
    const bool video_active = v_mean > cfg.video_active;
    if (silence > cfg.silence_gap && video_active) {
        EditAction a;
        a.kind = ActionKind::fill_blanks;
        a.params.seed = ctx.action_seed;
        a.rationale = "silent gaps cover " + fmt_fixed(silence * 100.0, 0) + "% against active video";
        coords.push_back(a);
    }
    const double a_rate = tempo_bpm / 60.0;
    if (a_rate > 0.05 && v_rate > 0.05) {
        double ratio = a_rate / v_rate;
        if (std::fabs(ratio - 1.0) > cfg.rate_mismatch) {
            EditAction a;
            a.kind = ActionKind::speed_mod;
            a.params.speed_factor = std::clamp(v_rate / a_rate, 0.5, 2.0);
            a.rationale = "audio events at " + fmt_fixed(a_rate, 2) + "/s vs video " +
                          fmt_fixed(v_rate, 2) + "/s";
            coords.push_back(a);
        }
    }
    if (rms_level < cfg.rms_lo || rms_level > cfg.rms_hi) {
        EditAction a;
        a.kind = ActionKind::volume_adjust;
        a.params.target_rms = cfg.target_rms;
        a.rationale = "rms " + fmt_fixed(rms_level, 4) + " outside working band";
        coords.push_back(a);
    }
    if (flatness < cfg.tonal_flatness && dominant > 1.0) {
        for (const std::string& label : vc.labels) {
            auto it = cfg.class_centroid_hz.find(label);
            if (it == cfg.class_centroid_hz.end() || it->second <= 1.0) continue;
            double st = 12.0 * std::log2(it->second / dominant);
            if (std::fabs(st) >= cfg.pitch_min_semitones) {
                EditAction a;
                a.kind = ActionKind::pitch_mod;
                a.params.pitch_semitones = std::clamp(st, -12.0, 12.0);
                a.rationale = "tonal center " + fmt_fixed(dominant, 0) + " Hz vs expected " +
                              fmt_fixed(it->second, 0) + " Hz for " + label;
                coords.push_back(a);
            }
            break;  // first labeled class with a known centroid decides
        }
    }

    // Ranked candidate plans. Order: combined, noise alone, each coordination
    // alone, noise with later coordinations, then alternate noise filters.
    std::vector<ActionPlan> candidates;
    auto push = [&](std::vector<EditAction> actions, std::string why) {
        ActionPlan p;
        p.actions = std::move(actions);
        p.rationale = std::move(why);
        for (const ActionPlan& c : candidates) {
            if (same_plan(c, p)) return;
        }
        candidates.push_back(std::move(p));
    };

    if (noise && !coords.empty()) push({*noise, coords.front()}, "denoise then coordinate");
    if (noise) push({*noise}, "denoise only");
    for (const EditAction& c : coords) push({c}, c.rationale);
    if (noise) {
        for (std::size_t i = 1; i < coords.size(); ++i)
            push({*noise, coords[i]}, "denoise then alternate coordination");
    }
    if (noise) {
        static const ActionKind alternates[] = {ActionKind::wiener_filter,
                                                ActionKind::spectral_subtraction,
                                                ActionKind::spectral_gate,
                                                ActionKind::wavelet_denoise};
        for (ActionKind k : alternates) {
            if (k == noise->kind) continue;
            push({make_noise(k, "alternate noise filter")}, "alternate noise filter");
        }
    }

    ActionPlan noop;
    EditAction na;
    na.kind = ActionKind::volume_adjust;
    na.params.gain_db = 0.0;
    na.rationale = "no rule fired";
    noop.actions = {na};
    noop.rationale = "no applicable rule";
    push(noop.actions, noop.rationale);

    for (const ActionPlan& c : candidates) {
        bool seen = false;
        for (const ActionPlan& h : ctx.history) {
            if (same_plan(c, h)) {
                seen = true;
                break;
            }
        }
        if (!seen) return c;
    }
    return noop;  // everything exhausted; caller detects the repeat
}

ActionPlan plan_random(const PlanContext& ctx, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto pick = [&](const std::vector<ActionKind>& from) {
        std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
        return from[d(rng)];
    };

    static const std::vector<ActionKind> noise_kinds = {
        ActionKind::spectral_subtraction, ActionKind::wiener_filter, ActionKind::wavelet_denoise,
        ActionKind::spectral_gate};
    static const std::vector<ActionKind> coord_kinds = {
        ActionKind::speed_mod, ActionKind::pitch_mod, ActionKind::volume_adjust,
        ActionKind::fill_blanks};

    auto randomize = [&](ActionKind k) {
        EditAction a;
        a.kind = k;
        a.rationale = "random baseline";
        ActionParams& p = a.params;
        switch (k) {
            case ActionKind::spectral_subtraction:
                p.noise_percentile = uni(1.0, 50.0);
                p.oversubtraction = uni(1.0, 3.0);
                p.floor_db = uni(-80.0, -20.0);
                break;
            case ActionKind::wiener_filter:
                p.noise_percentile = uni(1.0, 50.0);
                p.floor_db = uni(-80.0, -20.0);
                break;
            case ActionKind::wavelet_denoise:
                p.wavelet = rng() % 2 == 0 ? Wavelet::haar : Wavelet::db4;
                p.levels = static_cast<int>(1 + rng() % 8);
                break;
            case ActionKind::spectral_gate:
                p.gate_threshold_db = uni(-60.0, -10.0);
                p.attack_ms = uni(0.0, 20.0);
                p.release_ms = uni(0.0, 200.0);
                break;
            case ActionKind::speed_mod: p.speed_factor = uni(0.5, 2.0); break;
            case ActionKind::pitch_mod: p.pitch_semitones = uni(-12.0, 12.0); break;
            case ActionKind::volume_adjust:
                if (rng() % 2 == 0) {
                    p.gain_db = uni(-30.0, 12.0);
                } else {
                    p.target_rms = uni(0.01, 1.0);
                }
                break;
            case ActionKind::fill_blanks:
                p.blank_min_ms = uni(20.0, 500.0);
                p.fill_mode = rng() % 2 == 0 ? FillMode::context_noise : FillMode::comfort_noise;
                p.seed = static_cast<std::uint32_t>(rng());
                break;
        }
        return a;
    };

    ActionPlan plan;
    plan.rationale = "random baseline";
    if (rng() % 2 == 0) {
        plan.actions = {randomize(pick(noise_kinds)), randomize(pick(coord_kinds))};
    } else {
        std::vector<ActionKind> all = noise_kinds;
        all.insert(all.end(), coord_kinds.begin(), coord_kinds.end());
        plan.actions = {randomize(pick(all))};
    }
    (void)ctx;
    return plan;
}

}  // namespace avalign
