#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "avalign/audio.hpp"

namespace avalign {

enum class WindowFn { hann, rect };

struct StftConfig {
    double window_ms = 50.0;
    double hop_ms = 25.0;
    WindowFn window_fn = WindowFn::hann;
    int n_freq_bins = 128;   // log-magnitude view height
    int n_time_frames = 128; // log-magnitude view width

    int window_samples(int sr) const;
    int hop_samples(int sr) const;
    int fft_size(int sr) const;  // next power of two >= window_samples
    void validate(int sr) const;
};

// One-sided complex STFT (fft_size/2 + 1 bins per frame).
struct Spectrogram {
    std::vector<std::complex<double>> data;  // frame-major: data[t * n_bins + b]
    int n_bins = 0;
    int n_frames = 0;
    StftConfig config;
    int sample_rate_hz = kPipelineRateHz;
    std::size_t origin_len = 0;

    std::complex<double>& at(int bin, int frame) { return data[static_cast<std::size_t>(frame) * n_bins + bin]; }
    const std::complex<double>& at(int bin, int frame) const {
        return data[static_cast<std::size_t>(frame) * n_bins + bin];
    }
    double bin_hz(int bin) const;

    // log(1 + |X|) rebinned to config.n_freq_bins rows, padded or truncated to
    // config.n_time_frames columns. Row-major [view_bin * n_time_frames + t].
    std::vector<double> log_magnitude_view() const;

    // Same rebinned log magnitudes, averaged over the actual frames (no time
    // padding). Length config.n_freq_bins.
    std::vector<double> mean_log_profile() const;
};

double view_bin_center_hz(int view_bin, const StftConfig& cfg, int sample_rate_hz);

// Per-bin mean magnitude over the `percentile` lowest-energy frames; the
// stationary-noise estimate shared by the subtractive filters and the SNR
// feature.
std::vector<double> noise_magnitude_profile(const Spectrogram& spec, double percentile);

Spectrogram compute_spectrogram(const AudioBuffer& audio, const StftConfig& cfg);

// Overlap-add inverse normalized by the window sum; output is trimmed or
// zero-padded to origin_len samples. Throws DegenerateWindow when the
// interior window sum falls below 1e-8.
AudioBuffer invert_spectrogram(const Spectrogram& spec);

std::vector<double> make_window(WindowFn fn, int len);

}  // namespace avalign
