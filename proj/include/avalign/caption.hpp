#pragma once

#include <map>
#include <string>
#include <vector>

#include "avalign/audio.hpp"
#include "avalign/video.hpp"

namespace avalign {

enum class CaptionSource { builtin, remote };

struct Caption {
    std::string text;
    std::map<std::string, double> features;  // named scalars backing the text
    std::vector<std::string> labels;         // video content labels, empty for audio
    CaptionSource source = CaptionSource::builtin;
};

// Thresholds that decide which findings the caption text calls out.
struct CaptionConfig {
    double silence_notable = 0.2;     // silence_ratio above this is reported
    double snr_notable_db = 10.0;     // snr below this reports background noise
    double clipping_notable = 0.01;   // clipping_ratio above this is reported
    double silence_tick_hz = 50.0;    // envelope rate for silence_ratio
    double silence_level = 1e-4;      // envelope level counting as silent
    double tonal_flatness = 0.1;      // spectral flatness below this is tonal
};

struct AudioFeatures {
    double snr_estimate_db = 0.0;
    double silence_ratio = 0.0;
    double dominant_band_hz = 0.0;
    double tempo_bpm_estimate = 0.0;
    double clipping_ratio = 0.0;
    double rms = 0.0;
    double spectral_flatness = 1.0;
};

AudioFeatures extract_audio_features(const AudioBuffer& audio, const CaptionConfig& cfg = {});

Caption describe_audio(const AudioBuffer& audio, const CaptionConfig& cfg = {});
Caption describe_video(const VideoFeatureSeries& video, const CaptionConfig& cfg = {});

}  // namespace avalign
