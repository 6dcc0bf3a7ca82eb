#include <doctest.h>

#include <cmath>
#include <random>

#include "avalign/errors.hpp"
#include "avalign/stft.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace avalign;

TEST_CASE("spectrogram dimensions and view shape") {
    AudioBuffer a = fixture::tone(440.0, 3.0);
    Spectrogram s = compute_spectrogram(a, StftConfig{});
    CHECK(s.n_bins == 257);  // one-sided bins of a 512 fft
    CHECK(s.n_frames == (24000 - 400) / 200 + 1);
    std::vector<double> view = s.log_magnitude_view();
    CHECK(view.size() == 128 * 128);
}

TEST_CASE("frame magnitudes match a naive DFT") {
    AudioBuffer a = fixture::tone(440.0, 0.2, 1.0);
    StftConfig cfg;
    Spectrogram s = compute_spectrogram(a, cfg);
    const int win = cfg.window_samples(a.sample_rate_hz);
    const int hop = cfg.hop_samples(a.sample_rate_hz);
    const std::vector<double> w = make_window(cfg.window_fn, win);
    for (int t = 0; t < s.n_frames; ++t) {
        std::vector<double> frame(static_cast<std::size_t>(cfg.fft_size(a.sample_rate_hz)), 0.0);
        for (int i = 0; i < win; ++i)
            frame[static_cast<std::size_t>(i)] = a.samples[static_cast<std::size_t>(t * hop + i)] * w[static_cast<std::size_t>(i)];
        std::vector<std::complex<double>> ref = oracle::naive_dft(frame, frame.size());
        for (int b = 0; b < s.n_bins; ++b) {
            double got = std::abs(s.at(b, t));
            double want = std::abs(ref[static_cast<std::size_t>(b)]);
            CHECK(got == doctest::Approx(want).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("round trip within 1e-4 (and much better interior)") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    AudioBuffer a;
    a.sample_rate_hz = 8000;
    a.samples.resize(400 + 37 * 200);  // exact frame coverage
    for (double& v : a.samples) v = u(rng);
    Spectrogram s = compute_spectrogram(a, StftConfig{});
    AudioBuffer back = invert_spectrogram(s);
    REQUIRE(back.samples.size() == a.samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        worst = std::max(worst, std::fabs(back.samples[i] - a.samples[i]));
    CHECK(worst < 1e-4);
    CHECK(worst < 1e-8);  // hann WOLA is exact to numerics on covered samples
}

TEST_CASE("round trip on non-frame-aligned length covers the framed region") {
    AudioBuffer a = fixture::tone(313.0, 1.0111);
    Spectrogram s = compute_spectrogram(a, StftConfig{});
    AudioBuffer back = invert_spectrogram(s);
    CHECK(back.samples.size() == a.samples.size());  // origin_len restored
    StftConfig cfg;
    std::size_t covered = static_cast<std::size_t>(cfg.window_samples(8000) +
                                                   (s.n_frames - 1) * cfg.hop_samples(8000));
    for (std::size_t i = 0; i < covered; ++i)
        CHECK(std::fabs(back.samples[i] - a.samples[i]) < 1e-8);
}

TEST_CASE("Parseval-style energy tracking") {
    AudioBuffer a = fixture::white_noise(3.0, 0.25, 5);
    StftConfig cfg;
    Spectrogram s = compute_spectrogram(a, cfg);
    const int win = cfg.window_samples(8000);
    const int hop = cfg.hop_samples(8000);
    const int nfft = cfg.fft_size(8000);
    const std::vector<double> w = make_window(cfg.window_fn, win);
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    // spectral energy, one-sided with hermitian doubling
    double spec_e = 0.0;
    for (int t = 0; t < s.n_frames; ++t) {
        for (int b = 0; b < s.n_bins; ++b) {
            double m2 = std::norm(s.at(b, t));
            bool shared = (b == 0) || (b == s.n_bins - 1);
            spec_e += shared ? m2 : 2.0 * m2;
        }
    }
    spec_e /= static_cast<double>(nfft);
    // exact per-frame Parseval: spectral energy equals windowed-frame energy
    double frame_e = 0.0;
    for (int t = 0; t < s.n_frames; ++t)
        for (int i = 0; i < win; ++i) {
            double v = a.samples[static_cast<std::size_t>(t * hop + i)] * w[static_cast<std::size_t>(i)];
            frame_e += v * v;
        }
    CHECK(spec_e == doctest::Approx(frame_e).epsilon(1e-9));
    // statistical form: windowed energy tracks raw energy via the overlap gain
    double time_e = 0.0;
    std::size_t covered = static_cast<std::size_t>(win + (s.n_frames - 1) * hop);
    for (std::size_t i = 0; i < covered; ++i) time_e += a.samples[i] * a.samples[i];
    double expected = time_e / static_cast<double>(covered) * wsq * static_cast<double>(s.n_frames);
    CHECK(spec_e == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("linearity of magnitudes") {
    AudioBuffer a = fixture::white_noise(1.0, 0.2, 6);
    AudioBuffer b = a;
    for (double& v : b.samples) v *= 0.37;
    Spectrogram sa = compute_spectrogram(a, StftConfig{});
    Spectrogram sb = compute_spectrogram(b, StftConfig{});
    for (std::size_t i = 0; i < sa.data.size(); ++i) {
        double ma = std::abs(sa.data[i]) * 0.37;
        double mb = std::abs(sb.data[i]);
        CHECK(mb == doctest::Approx(ma).epsilon(1e-6).scale(1e-12));
    }
}

TEST_CASE("all-zero input gives all-zero magnitudes and inverts to silence") {
    AudioBuffer a;
    a.sample_rate_hz = 8000;
    a.samples.assign(8000, 0.0);
    Spectrogram s = compute_spectrogram(a, StftConfig{});
    for (const auto& c : s.data) CHECK(std::abs(c) == 0.0);
    AudioBuffer back = invert_spectrogram(s);
    for (double v : back.samples) CHECK(v == 0.0);
}

TEST_CASE("too-short input throws") {
    AudioBuffer a = fixture::tone(440.0, 0.01);  // 80 samples < one window
    CHECK_THROWS_AS(compute_spectrogram(a, StftConfig{}), EmptyAudio);
}

TEST_CASE("log view rebins 257 bins to 128 and pads time to 128") {
    AudioBuffer a = fixture::tone(1000.0, 1.0, 0.8);
    StftConfig cfg;
    Spectrogram s = compute_spectrogram(a, cfg);
    std::vector<double> view = s.log_magnitude_view();
    REQUIRE(view.size() == 128 * 128);
    // energy concentrated near the 1 kHz view row
    int kbest = 0;
    double best = -1.0;
    for (int b = 0; b < 128; ++b) {
        double acc = 0.0;
        for (int t = 0; t < 128; ++t) acc += view[static_cast<std::size_t>(b) * 128 + t];
        if (acc > best) {
            best = acc;
            kbest = b;
        }
    }
    CHECK(std::fabs(view_bin_center_hz(kbest, cfg, 8000) - 1000.0) < 80.0);
    // columns past the real frame count are zero padding
    Spectrogram short_s = compute_spectrogram(fixture::tone(1000.0, 0.5), cfg);
    std::vector<double> short_view = short_s.log_magnitude_view();
    for (int t = short_s.n_frames; t < 128; ++t)
        for (int b = 0; b < 128; ++b)
            CHECK(short_view[static_cast<std::size_t>(b) * 128 + t] == 0.0);
}

TEST_CASE("mean_log_profile averages only real frames") {
    AudioBuffer a = fixture::tone(500.0, 0.5, 0.6);
    Spectrogram s = compute_spectrogram(a, StftConfig{});
    std::vector<double> p = s.mean_log_profile();
    REQUIRE(p.size() == 128);
    double total = 0.0;
    for (double v : p) total += v;
    CHECK(total > 0.1);  // zero-padding to 128 frames would dilute this
}

TEST_CASE("noise_magnitude_profile estimates stationary noise") {
    AudioBuffer noise = fixture::white_noise(3.0, 0.1, 11);
    Spectrogram s = compute_spectrogram(noise, StftConfig{});
    std::vector<double> prof = noise_magnitude_profile(s, 10.0);
    REQUIRE(prof.size() == 257);
    // flat-ish: every interior bin within a factor 3 of the median
    std::vector<double> sorted = prof;
    std::sort(sorted.begin(), sorted.end());
    double med = sorted[sorted.size() / 2];
    for (std::size_t b = 2; b + 2 < prof.size(); ++b) {
        CHECK(prof[b] > med / 3.0);
        CHECK(prof[b] < med * 3.0);
    }
    CHECK_THROWS_AS(noise_magnitude_profile(s, 0.0), ParamOutOfRange);
    CHECK_THROWS_AS(noise_magnitude_profile(s, 50.1), ParamOutOfRange);
}
