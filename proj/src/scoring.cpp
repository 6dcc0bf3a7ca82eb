#include "avalign/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "avalign/errors.hpp"
#include "avalign/stft.hpp"

namespace avalign {

namespace {

constexpr double kVarEps = 1e-10;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) throw DegenerateSeries("cosine needs equal nonzero lengths");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na < kVarEps || nb < kVarEps) throw DegenerateSeries("cosine of a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

Scorer::Scorer(ScorerConfig cfg) : cfg_(std::move(cfg)) {
    profiles_ = cfg_.profile_path.empty() ? ClassProfileTable::builtin_defaults()
                                          : ClassProfileTable::load(cfg_.profile_path);
}

double Scorer::score_temporal(const AudioBuffer& audio, const VideoFeatureSeries& video,
                              bool* degenerate) const {
    check_audio(audio);
    check_video(video);
    if (degenerate) *degenerate = false;

    std::vector<double> env = energy_envelope(audio, video.frame_rate_hz);
    std::size_t n = std::min(env.size(), video.activity.size());
    if (n < 2) throw DegenerateSeries("need at least two overlapping ticks");

    double ma = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += env[i];
        mv += video.activity[i];
    }
    ma /= static_cast<double>(n);
    mv /= static_cast<double>(n);
    double va = 0.0, vv = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = env[i] - ma;
        double dv = video.activity[i] - mv;
        va += da * da;
        vv += dv * dv;
        cov += da * dv;
    }
    if (va < kVarEps || vv < kVarEps) {
        if (degenerate) *degenerate = true;
        return 0.5;
    }
    double r = cov / std::sqrt(va * vv);
    return clamp01((r + 1.0) / 2.0);
}

double Scorer::score_alignment(const AudioBuffer& audio, const VideoFeatureSeries& video) const {
    check_audio(audio);
    check_video(video);

    std::vector<std::string> usable;
    for (const std::string& l : video.labels) {
        if (profiles_.has(l)) usable.push_back(l);
    }
    if (usable.empty()) {
        if (!cfg_.fallback_envelope) {
            std::string joined;
            for (const std::string& l : video.labels) joined += (joined.empty() ? "" : ",") + l;
            throw UnknownLabelNoFallback("no class profile for labels [" + joined +
                                         "] and fallback disabled");
        }
        return score_temporal(audio, video);
    }

    Spectrogram spec = compute_spectrogram(audio, StftConfig{});
    std::vector<double> profile = spec.mean_log_profile();

    double best = 0.0;
    for (const std::string& l : usable) {
        double c;
        try {
            c = cosine_similarity(profile, profiles_.get(l));
        } catch (const DegenerateSeries&) {
            c = -1.0;  // silent audio against a class profile: no agreement
        }
        best = std::max(best, clamp01((c + 1.0) / 2.0));
    }
    return best;
}

ReflectionScores Scorer::reflect(const AudioBuffer& audio, const VideoFeatureSeries& video) const {
    ReflectionScores s;
    bool degen = false;
    s.alignment = score_alignment(audio, video);
    s.temporal = score_temporal(audio, video, &degen);
    s.degenerate = degen;
    return s;
}

}  // namespace avalign
