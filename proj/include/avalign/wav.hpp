#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avalign/audio.hpp"

namespace avalign {

enum class WavFormat { pcm16, float32 };

struct WavInfo {
    int sample_rate_hz = 0;
    int channels = 0;
    WavFormat format = WavFormat::pcm16;
    std::size_t frames = 0;
};

// Reads PCM 16-bit or IEEE float32 little-endian WAV. Multichannel input is
// averaged down to mono. int16 samples map to s / 32768.
AudioBuffer read_wav(const std::string& path, WavInfo* info = nullptr);

// Canonical 44-byte-header writer, mono. pcm16 uses round(x * 32768) clamped
// to int16, so an unedited pcm16 read/write round trip is bit exact.
void write_wav(const std::string& path, const AudioBuffer& audio, WavFormat format = WavFormat::pcm16);

// read_wav + mono mixdown + resample to target_rate_hz when needed.
AudioBuffer load_audio(const std::string& path, int target_rate_hz = kPipelineRateHz);

// In-memory forms of the same container, used for wire payloads.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio, WavFormat format = WavFormat::pcm16);
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes, WavInfo* info = nullptr);

}  // namespace avalign
