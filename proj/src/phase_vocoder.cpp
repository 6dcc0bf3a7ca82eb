#include "avalign/phase_vocoder.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "avalign/errors.hpp"
#include "avalign/fft.hpp"

namespace avalign {

namespace {

double wrap_phase(double p) {
    const double tau = 2.0 * std::numbers::pi;
    p = std::fmod(p + std::numbers::pi, tau);
    if (p < 0) p += tau;
    return p - std::numbers::pi;
}

}  // namespace

AudioBuffer time_stretch(const AudioBuffer& audio, double stretch, const StftConfig& cfg) {
    check_audio(audio);
    if (stretch <= 0.0) throw ParamOutOfRange("stretch must be positive");
    if (stretch == 1.0) return audio;

    const int sr = audio.sample_rate_hz;
    cfg.validate(sr);
    const int win = cfg.window_samples(sr);
    const int hop_s = cfg.hop_samples(sr);  // fixed synthesis hop
    const int nfft = cfg.fft_size(sr);
    const int n_bins = nfft / 2 + 1;
    const std::size_t n = audio.samples.size();
    if (n < static_cast<std::size_t>(win)) throw TooShort("audio shorter than one vocoder window");

    const std::size_t target_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * stretch)));
    const double hop_a = static_cast<double>(hop_s) / stretch;  // analysis hop, real valued

    // Frames needed so overlap-add covers target_len.
    const int n_frames =
        static_cast<int>((target_len + static_cast<std::size_t>(win)) / hop_s) + 2;

    std::vector<double> padded(audio.samples);
    const std::size_t max_read = static_cast<std::size_t>(std::ceil((n_frames - 1) * hop_a)) + win + 1;
    if (padded.size() < max_read) padded.resize(max_read, 0.0);

    const std::vector<double> w = make_window(cfg.window_fn, win);

    const std::size_t total = static_cast<std::size_t>(n_frames - 1) * hop_s + win;
    std::vector<double> acc(total, 0.0);
    std::vector<double> den(total, 0.0);

    std::vector<std::complex<double>> frame(static_cast<std::size_t>(nfft));
    std::vector<double> prev_phase(static_cast<std::size_t>(n_bins), 0.0);
    std::vector<double> synth_phase(static_cast<std::size_t>(n_bins), 0.0);
    long prev_pos = 0;

    for (int t = 0; t < n_frames; ++t) {
        const long pos = std::lround(static_cast<double>(t) * hop_a);
        for (int i = 0; i < win; ++i)
            frame[static_cast<std::size_t>(i)] =
                padded[static_cast<std::size_t>(pos) + i] * w[static_cast<std::size_t>(i)];
        std::fill(frame.begin() + win, frame.end(), std::complex<double>{0.0, 0.0});
        fft::transform(frame, false);

        for (int b = 0; b < n_bins; ++b) {
            const double mag = std::abs(frame[static_cast<std::size_t>(b)]);
            const double phase = std::arg(frame[static_cast<std::size_t>(b)]);
            const double omega = 2.0 * std::numbers::pi * b / nfft;  // rad per sample
            if (t == 0) {
                synth_phase[static_cast<std::size_t>(b)] = phase;
            } else {
                const long dp = std::max(1l, pos - prev_pos);
                const double expected = omega * static_cast<double>(dp);
                const double dev = wrap_phase(phase - prev_phase[static_cast<std::size_t>(b)] - expected);
                const double freq = omega + dev / static_cast<double>(dp);
                synth_phase[static_cast<std::size_t>(b)] =
                    synth_phase[static_cast<std::size_t>(b)] + freq * hop_s;
            }
            prev_phase[static_cast<std::size_t>(b)] = phase;
            frame[static_cast<std::size_t>(b)] = std::polar(mag, synth_phase[static_cast<std::size_t>(b)]);
        }
        prev_pos = pos;

        for (int b = n_bins; b < nfft; ++b)
            frame[static_cast<std::size_t>(b)] = std::conj(frame[static_cast<std::size_t>(nfft - b)]);
        fft::transform(frame, true);

        const std::size_t off = static_cast<std::size_t>(t) * hop_s;
        for (int i = 0; i < win; ++i) {
            const double wi = w[static_cast<std::size_t>(i)];
            acc[off + i] += wi * frame[static_cast<std::size_t>(i)].real();
            den[off + i] += wi * wi;
        }
    }

    AudioBuffer out;
    out.sample_rate_hz = sr;
    out.samples.assign(target_len, 0.0);
    const std::size_t m = std::min(target_len, total);
    for (std::size_t i = 0; i < m; ++i) out.samples[i] = acc[i] / std::max(den[i], 1e-12);
    return out;
}

}  // namespace avalign
