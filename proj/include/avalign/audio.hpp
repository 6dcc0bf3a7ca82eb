#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace avalign {

// Everything downstream of ingest runs at this rate.
inline constexpr int kPipelineRateHz = 8000;

struct AudioBuffer {
    std::vector<double> samples;  // mono, nominally within [-1, 1]
    int sample_rate_hz = kPipelineRateHz;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

double rms(const AudioBuffer& a);
double peak(const AudioBuffer& a);

// Throws EmptyAudio when the buffer has no samples; throws ParamOutOfRange on
// a non-positive sample rate; throws on NaN/Inf samples.
void check_audio(const AudioBuffer& a);

// Hash of the raw sample bytes plus the rate; identical buffers hash equal.
std::string audio_hash(const AudioBuffer& a);

// Short-window RMS series sampled at frame_hz ticks. Tick k covers samples
// [floor(k*sr/frame_hz), floor((k+1)*sr/frame_hz)). A constant signal maps to
// a constant envelope at that same level.
std::vector<double> energy_envelope(const AudioBuffer& a, double frame_hz);

// Peaks per second of a nonnegative series sampled at rate_hz. A local
// maximum counts when it clears 0.3 of the series maximum.
double peak_rate(const std::vector<double>& series, double rate_hz);

}  // namespace avalign
