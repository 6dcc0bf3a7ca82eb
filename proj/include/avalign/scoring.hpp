#pragma once

#include <optional>
#include <string>

#include "avalign/audio.hpp"
#include "avalign/profiles.hpp"
#include "avalign/video.hpp"

namespace avalign {

enum class ScorerKind { proxy, remote };

struct ScorerConfig {
    ScorerKind kind = ScorerKind::proxy;
    std::string profile_path;            // empty = builtin defaults
    bool fallback_envelope = true;       // unknown labels fall back to the temporal proxy
};

struct ReflectionScores {
    double alignment = 0.0;   // [0, 1]
    double temporal = 0.0;    // [0, 1]
    bool degenerate = false;  // temporal fell back to 0.5 on a flat series
    double min_score() const { return alignment < temporal ? alignment : temporal; }
};

class Scorer {
public:
    explicit Scorer(ScorerConfig cfg = {});

    // Content agreement: cosine similarity between the audio's time-averaged
    // 128-bin log-magnitude profile and the best-matching class profile for
    // the video labels, mapped (c + 1) / 2. Unknown labels use the
    // envelope-correlation fallback when enabled, otherwise throw.
    double score_alignment(const AudioBuffer& audio, const VideoFeatureSeries& video) const;

    // Synchronization: zero-lag correlation between the audio energy
    // envelope at the video frame rate and the activity series (both
    // z-normalized, truncated to the shorter), mapped (r + 1) / 2. A flat
    // series yields 0.5 with the degenerate flag set.
    double score_temporal(const AudioBuffer& audio, const VideoFeatureSeries& video,
                          bool* degenerate = nullptr) const;

    ReflectionScores reflect(const AudioBuffer& audio, const VideoFeatureSeries& video) const;

    const ClassProfileTable& profiles() const { return profiles_; }
    const ScorerConfig& config() const { return cfg_; }

private:
    ScorerConfig cfg_;
    ClassProfileTable profiles_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace avalign
