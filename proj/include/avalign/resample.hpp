#pragma once

#include "avalign/audio.hpp"

namespace avalign {

// Windowed-sinc resampler (Hann-windowed, 32-tap half width). Cutoff tracks
// the lower of the two Nyquist rates so downsampling stays alias free.
AudioBuffer resample(const AudioBuffer& in, int target_rate_hz);

// Rate-preserving variant used for speed-style resampling: output has
// round(n / factor) samples, content read at `factor` times real time.
std::vector<double> resample_by_factor(const std::vector<double>& in, double factor);

}  // namespace avalign
