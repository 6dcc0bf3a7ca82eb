#include "avalign/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avalign/errors.hpp"
#include "avalign/fft.hpp"

namespace avalign {

int StftConfig::window_samples(int sr) const {
    return static_cast<int>(std::lround(window_ms * sr / 1000.0));
}

int StftConfig::hop_samples(int sr) const {
    return static_cast<int>(std::lround(hop_ms * sr / 1000.0));
}

int StftConfig::fft_size(int sr) const {
    return static_cast<int>(fft::next_pow2(static_cast<std::size_t>(window_samples(sr))));
}

void StftConfig::validate(int sr) const {
    int win = window_samples(sr);
    int hop = hop_samples(sr);
    if (win < 2) throw ParamOutOfRange("window shorter than two samples");
    if (hop < 1 || hop > win) throw ParamOutOfRange("hop must satisfy 0 < hop <= window");
    if (n_freq_bins < 2) throw ParamOutOfRange("n_freq_bins must be >= 2");
    if (n_time_frames < 1) throw ParamOutOfRange("n_time_frames must be >= 1");
}

std::vector<double> make_window(WindowFn fn, int len) {
    std::vector<double> w(static_cast<std::size_t>(len), 1.0);
    if (fn == WindowFn::hann) {
        // Half-sample offset keeps the edge taps nonzero, so overlap-add
        // stays invertible at the signal boundaries.
        for (int i = 0; i < len; ++i) {
            w[static_cast<std::size_t>(i)] =
                0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (i + 0.5) / len));
        }
    }
    return w;
}

double Spectrogram::bin_hz(int bin) const {
    int nfft = config.fft_size(sample_rate_hz);
    return static_cast<double>(bin) * sample_rate_hz / nfft;
}

Spectrogram compute_spectrogram(const AudioBuffer& audio, const StftConfig& cfg) {
    check_audio(audio);
    cfg.validate(audio.sample_rate_hz);
    const int sr = audio.sample_rate_hz;
    const int win = cfg.window_samples(sr);
    const int hop = cfg.hop_samples(sr);
    const int nfft = cfg.fft_size(sr);
    const std::size_t n = audio.samples.size();
    if (n < static_cast<std::size_t>(win))
        throw EmptyAudio("audio shorter than one analysis window");

    const int n_frames = static_cast<int>((n - static_cast<std::size_t>(win)) / hop) + 1;
    const int n_bins = nfft / 2 + 1;
    const std::vector<double> w = make_window(cfg.window_fn, win);

    Spectrogram spec;
    spec.config = cfg;
    spec.sample_rate_hz = sr;
    spec.origin_len = n;
    spec.n_bins = n_bins;
    spec.n_frames = n_frames;
    spec.data.assign(static_cast<std::size_t>(n_bins) * n_frames, {0.0, 0.0});

    std::vector<std::complex<double>> frame(static_cast<std::size_t>(nfft));
    for (int t = 0; t < n_frames; ++t) {
        const std::size_t off = static_cast<std::size_t>(t) * hop;
        for (int i = 0; i < win; ++i)
            frame[static_cast<std::size_t>(i)] = audio.samples[off + i] * w[static_cast<std::size_t>(i)];
        std::fill(frame.begin() + win, frame.end(), std::complex<double>{0.0, 0.0});
        fft::transform(frame, false);
        for (int b = 0; b < n_bins; ++b) spec.at(b, t) = frame[static_cast<std::size_t>(b)];
    }
    return spec;
}

AudioBuffer invert_spectrogram(const Spectrogram& spec) {
    const StftConfig& cfg = spec.config;
    const int sr = spec.sample_rate_hz;
    cfg.validate(sr);
    if (spec.n_frames < 1 || spec.data.empty()) throw EmptyAudio("spectrogram has no frames");
    const int win = cfg.window_samples(sr);
    const int hop = cfg.hop_samples(sr);
    const int nfft = cfg.fft_size(sr);
    if (spec.n_bins != nfft / 2 + 1) throw ParamOutOfRange("spectrogram bin count does not match config");

    const std::vector<double> w = make_window(cfg.window_fn, win);
    const std::size_t total = static_cast<std::size_t>(spec.n_frames - 1) * hop + win;
    std::vector<double> acc(total, 0.0);
    std::vector<double> den(total, 0.0);

    std::vector<std::complex<double>> frame(static_cast<std::size_t>(nfft));
    for (int t = 0; t < spec.n_frames; ++t) {
        for (int b = 0; b < spec.n_bins; ++b) frame[static_cast<std::size_t>(b)] = spec.at(b, t);
        for (int b = spec.n_bins; b < nfft; ++b)
            frame[static_cast<std::size_t>(b)] = std::conj(frame[static_cast<std::size_t>(nfft - b)]);
        fft::transform(frame, true);
        const std::size_t off = static_cast<std::size_t>(t) * hop;
        for (int i = 0; i < win; ++i) {
            acc[off + i] += frame[static_cast<std::size_t>(i)].real();
            den[off + i] += w[static_cast<std::size_t>(i)];
        }
    }

    // Interior means the span where full overlap is expected.
    const std::size_t lo = static_cast<std::size_t>(win);
    const std::size_t hi = total > static_cast<std::size_t>(win) ? total - win : 0;
    for (std::size_t i = lo; i < hi; ++i) {
        if (den[i] < 1e-8) throw DegenerateWindow();
    }

    AudioBuffer out;
    out.sample_rate_hz = sr;
    out.samples.assign(spec.origin_len > 0 ? spec.origin_len : total, 0.0);
    const std::size_t m = std::min(out.samples.size(), total);
    for (std::size_t i = 0; i < m; ++i) out.samples[i] = acc[i] / std::max(den[i], 1e-12);
    return out;
}

std::vector<double> Spectrogram::log_magnitude_view() const {
    const int vb = config.n_freq_bins;
    const int vt = config.n_time_frames;
    std::vector<double> view(static_cast<std::size_t>(vb) * vt, 0.0);
    const int frames = std::min(n_frames, vt);
    for (int t = 0; t < frames; ++t) {
        for (int g = 0; g < vb; ++g) {
            int lo = static_cast<int>(static_cast<long>(g) * n_bins / vb);
            int hi = static_cast<int>(static_cast<long>(g + 1) * n_bins / vb);
            if (hi <= lo) hi = lo + 1;
            double acc = 0.0;
            for (int b = lo; b < hi && b < n_bins; ++b) acc += std::log1p(std::abs(at(b, t)));
            view[static_cast<std::size_t>(g) * vt + t] = acc / (hi - lo);
        }
    }
    return view;
}

std::vector<double> Spectrogram::mean_log_profile() const {
    const int vb = config.n_freq_bins;
    std::vector<double> profile(static_cast<std::size_t>(vb), 0.0);
    if (n_frames == 0) return profile;
    for (int g = 0; g < vb; ++g) {
        int lo = static_cast<int>(static_cast<long>(g) * n_bins / vb);
        int hi = static_cast<int>(static_cast<long>(g + 1) * n_bins / vb);
        if (hi <= lo) hi = lo + 1;
        double acc = 0.0;
        for (int t = 0; t < n_frames; ++t) {
            for (int b = lo; b < hi && b < n_bins; ++b) acc += std::log1p(std::abs(at(b, t)));
        }
        profile[static_cast<std::size_t>(g)] = acc / (static_cast<double>(hi - lo) * n_frames);
    }
    return profile;
}

std::vector<double> noise_magnitude_profile(const Spectrogram& spec, double percentile) {
    if (percentile <= 0.0 || percentile > 50.0)
        throw ParamOutOfRange("noise percentile must be in (0, 50]");
    std::vector<double> energy(static_cast<std::size_t>(spec.n_frames), 0.0);
    for (int t = 0; t < spec.n_frames; ++t) {
        double e = 0.0;
        for (int b = 0; b < spec.n_bins; ++b) e += std::norm(spec.at(b, t));
        energy[static_cast<std::size_t>(t)] = e;
    }
    std::vector<int> order(static_cast<std::size_t>(spec.n_frames));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return energy[static_cast<std::size_t>(a)] < energy[static_cast<std::size_t>(b)];
    });
    int count = std::max(1, static_cast<int>(percentile / 100.0 * spec.n_frames));
    count = std::min(count, spec.n_frames);

    std::vector<double> profile(static_cast<std::size_t>(spec.n_bins), 0.0);
    for (int i = 0; i < count; ++i) {
        int t = order[static_cast<std::size_t>(i)];
        for (int b = 0; b < spec.n_bins; ++b)
            profile[static_cast<std::size_t>(b)] += std::abs(spec.at(b, t));
    }
    for (double& v : profile) v /= count;
    return profile;
}

double view_bin_center_hz(int view_bin, const StftConfig& cfg, int sample_rate_hz) {
    int nfft = cfg.fft_size(sample_rate_hz);
    int n_bins = nfft / 2 + 1;
    double lo = static_cast<double>(view_bin) * n_bins / cfg.n_freq_bins;
    double hi = static_cast<double>(view_bin + 1) * n_bins / cfg.n_freq_bins;
    double center_bin = 0.5 * (lo + hi);
    return center_bin * sample_rate_hz / nfft;
}

}  // namespace avalign
