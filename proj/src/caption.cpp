#include "avalign/caption.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include "avalign/errors.hpp"
#include "avalign/stft.hpp"

namespace avalign {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

AudioFeatures extract_audio_features(const AudioBuffer& audio, const CaptionConfig& cfg) {
    check_audio(audio);
    AudioFeatures f;
    f.rms = rms(audio);

    std::size_t clipped = 0;
    for (double s : audio.samples) {
        if (std::fabs(s) >= 0.999) ++clipped;
    }
    f.clipping_ratio = static_cast<double>(clipped) / static_cast<double>(audio.samples.size());

    const std::vector<double> env = energy_envelope(audio, cfg.silence_tick_hz);
    std::size_t silent = 0;
    for (double e : env) {
        if (e < cfg.silence_level) ++silent;
    }
    f.silence_ratio = env.empty() ? 1.0 : static_cast<double>(silent) / static_cast<double>(env.size());
    f.tempo_bpm_estimate = peak_rate(env, cfg.silence_tick_hz) * 60.0;

    const StftConfig stft_cfg{};
    Spectrogram spec = compute_spectrogram(audio, stft_cfg);

    std::vector<double> mean_mag(static_cast<std::size_t>(spec.n_bins), 0.0);
    for (int t = 0; t < spec.n_frames; ++t)
        for (int b = 0; b < spec.n_bins; ++b)
            mean_mag[static_cast<std::size_t>(b)] += std::abs(spec.at(b, t));
    for (double& m : mean_mag) m /= spec.n_frames;

    double wsum = 0.0, msum = 0.0;
    for (int b = 0; b < spec.n_bins; ++b) {
        wsum += spec.bin_hz(b) * mean_mag[static_cast<std::size_t>(b)];
        msum += mean_mag[static_cast<std::size_t>(b)];
    }
    f.dominant_band_hz = msum > 1e-12 ? wsum / msum : 0.0;

    double log_acc = 0.0, lin_acc = 0.0;
    for (int b = 0; b < spec.n_bins; ++b) {
        double p = mean_mag[static_cast<std::size_t>(b)] * mean_mag[static_cast<std::size_t>(b)] + 1e-20;
        log_acc += std::log(p);
        lin_acc += p;
    }
    double gm = std::exp(log_acc / spec.n_bins);
    double am = lin_acc / spec.n_bins;
    f.spectral_flatness = am > 0.0 ? gm / am : 1.0;

    const std::vector<double> noise = noise_magnitude_profile(spec, 10.0);
    double p_noise = 0.0;
    for (double n : noise) p_noise += n * n;
    double p_total = 0.0;
    for (int t = 0; t < spec.n_frames; ++t)
        for (int b = 0; b < spec.n_bins; ++b) p_total += std::norm(spec.at(b, t));
    p_total /= std::max(1, spec.n_frames);
    double snr = 10.0 * std::log10(std::max(p_total - p_noise, 1e-12) / std::max(p_noise, 1e-12));
    f.snr_estimate_db = std::clamp(snr, -40.0, 60.0);
    return f;
}

Caption describe_audio(const AudioBuffer& audio, const CaptionConfig& cfg) {
    AudioFeatures f = extract_audio_features(audio, cfg);
    Caption c;
    c.source = CaptionSource::builtin;
    c.features = {
        {"snr_estimate_db", f.snr_estimate_db},
        {"silence_ratio", f.silence_ratio},
        {"dominant_band_hz", f.dominant_band_hz},
        {"tempo_bpm_estimate", f.tempo_bpm_estimate},
        {"clipping_ratio", f.clipping_ratio},
        {"rms", f.rms},
        {"spectral_flatness", f.spectral_flatness},
    };

    if (f.silence_ratio > 0.95) {
        c.text = "Audio: blank audio, near-total silence.";
        return c;
    }
    std::string t = "Audio: ";
    if (f.spectral_flatness < cfg.tonal_flatness) {
        t += "tonal sound near " + fmt("%.0f", f.dominant_band_hz) + " Hz";
    } else {
        t += "broadband sound centered near " + fmt("%.0f", f.dominant_band_hz) + " Hz";
    }
    t += ", about " + fmt("%.0f", f.tempo_bpm_estimate) + " events/min";
    if (f.silence_ratio > cfg.silence_notable)
        t += ", " + fmt("%.0f", f.silence_ratio * 100.0) + "% blank gaps";
    if (f.snr_estimate_db < cfg.snr_notable_db) t += ", heavy background noise";
    if (f.clipping_ratio > cfg.clipping_notable) t += ", clipping present";
    t += ".";
    c.text = t;
    return c;
}

Caption describe_video(const VideoFeatureSeries& video, const CaptionConfig&) {
    check_video(video);
    Caption c;
    c.source = CaptionSource::builtin;
    c.labels = video.labels;

    double mean = 0.0, mx = 0.0;
    for (double a : video.activity) {
        mean += a;
        mx = std::max(mx, a);
    }
    mean /= static_cast<double>(video.activity.size());
    double rate = peak_rate(video.activity, video.frame_rate_hz);

    c.features = {
        {"activity_mean", mean},
        {"activity_peak_rate", rate},
        {"activity_max", mx},
        {"frame_rate_hz", video.frame_rate_hz},
        {"label_count", static_cast<double>(video.labels.size())},
    };

    std::string who = "unlabeled content";
    if (!video.labels.empty()) {
        who = video.labels.front();
        for (std::size_t i = 1; i < video.labels.size(); ++i) who += " + " + video.labels[i];
    }
    std::string t = "Video shows " + who + ": mean activity " + fmt("%.2f", mean) + ", " +
                    fmt("%.1f", rate) + " events/s";
    if (mean < 0.01) t += ", mostly static scene";
    t += ".";
    if (!video.description_hint.empty()) t += " " + video.description_hint;
    c.text = t;
    return c;
}

}  // namespace avalign
