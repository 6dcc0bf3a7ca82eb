#pragma once

#include "avalign/audio.hpp"
#include "avalign/stft.hpp"

namespace avalign {

// Phase-vocoder time stretch: output duration ~= stretch * input duration,
// pitch preserved. stretch = 1 returns the input unchanged. Output length is
// exactly round(n * stretch).
AudioBuffer time_stretch(const AudioBuffer& audio, double stretch, const StftConfig& cfg = {});

}  // namespace avalign
