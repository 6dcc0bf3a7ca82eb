#pragma once

// Shared signal constructors for the test suites.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "avalign/audio.hpp"
#include "avalign/video.hpp"

namespace fixture {

inline avalign::AudioBuffer tone(double hz, double seconds, double amp = 0.5,
                                 int sr = avalign::kPipelineRateHz) {
    avalign::AudioBuffer a;
    a.sample_rate_hz = sr;
    std::size_t n = static_cast<std::size_t>(std::llround(seconds * sr));
    a.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        a.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / sr);
    return a;
}

inline avalign::AudioBuffer white_noise(double seconds, double sigma, std::uint64_t seed,
                                        int sr = avalign::kPipelineRateHz) {
    avalign::AudioBuffer a;
    a.sample_rate_hz = sr;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    a.samples.resize(static_cast<std::size_t>(std::llround(seconds * sr)));
    for (double& s : a.samples) s = std::clamp(g(rng), -1.0, 1.0);
    return a;
}

inline avalign::AudioBuffer mix(const avalign::AudioBuffer& a, const avalign::AudioBuffer& b) {
    avalign::AudioBuffer out = a;
    std::size_t n = std::min(a.samples.size(), b.samples.size());
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = std::clamp(a.samples[i] + b.samples[i], -1.0, 1.0);
    return out;
}

// Tone with noise-only flanks: lead/tail give the percentile noise estimator
// clean noise frames. clean_out gets the tone part alone (zero flanks).
inline avalign::AudioBuffer flanked_tone_in_noise(double hz, double snr_db, std::uint64_t seed,
                                                  avalign::AudioBuffer* clean_out = nullptr,
                                                  double flank_s = 0.4, double tone_s = 2.2,
                                                  double amp = 0.3) {
    int sr = avalign::kPipelineRateHz;
    double total = flank_s * 2 + tone_s;
    double sigma = amp / std::sqrt(2.0) / std::pow(10.0, snr_db / 20.0);
    avalign::AudioBuffer out = white_noise(total, sigma, seed, sr);
    avalign::AudioBuffer clean;
    clean.sample_rate_hz = sr;
    clean.samples.assign(out.samples.size(), 0.0);
    std::size_t lo = static_cast<std::size_t>(flank_s * sr);
    std::size_t hi = lo + static_cast<std::size_t>(tone_s * sr);
    for (std::size_t i = lo; i < hi && i < out.samples.size(); ++i) {
        double s = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i - lo) / sr);
        clean.samples[i] = s;
        out.samples[i] = std::clamp(out.samples[i] + s, -1.0, 1.0);
    }
    if (clean_out) *clean_out = clean;
    return out;
}

// Tone carrier under a raised-cosine pulse train; pairs with pulsed_video.
inline avalign::AudioBuffer pulsed_audio(double rate_hz, double phase_s, double seconds,
                                         double carrier_hz = 500.0, double amp = 0.4,
                                         int sr = avalign::kPipelineRateHz) {
    avalign::AudioBuffer a;
    a.sample_rate_hz = sr;
    std::size_t n = static_cast<std::size_t>(std::llround(seconds * sr));
    a.samples.resize(n);
    double width = 0.3 / rate_hz;
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / sr;
        double rel = t - phase_s;
        double c = phase_s + std::round(rel * rate_hz) / rate_hz;
        double u = (t - c) / width;
        double e = (u >= -0.5 && u <= 0.5) ? std::cos(std::numbers::pi * u) * std::cos(std::numbers::pi * u) : 0.0;
        a.samples[i] = amp * e * std::sin(2.0 * std::numbers::pi * carrier_hz * t);
    }
    return a;
}

// Pulsed activity series matching an audio pulse train.
inline avalign::VideoFeatureSeries pulsed_video(double rate_hz, double phase_s, double seconds,
                                                const std::string& label, double frame_rate = 25.0) {
    avalign::VideoFeatureSeries v;
    v.frame_rate_hz = frame_rate;
    if (!label.empty()) v.labels = {label};
    std::size_t ticks = static_cast<std::size_t>(std::llround(seconds * frame_rate));
    v.activity.resize(ticks);
    double width = 0.3 / rate_hz;
    for (std::size_t k = 0; k < ticks; ++k) {
        double t = (static_cast<double>(k) + 0.5) / frame_rate;
        double rel = t - phase_s;
        double c = phase_s + std::round(rel * rate_hz) / rate_hz;
        double u = (t - c) / width;
        double e = (u >= -0.5 && u <= 0.5) ? std::cos(std::numbers::pi * u) * std::cos(std::numbers::pi * u) : 0.0;
        v.activity[k] = 0.02 + 0.98 * e;
    }
    return v;
}

// Unique scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / ("avalign_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

}  // namespace fixture
