#include "avalign/audio.hpp"

#include <cmath>
#include <cstring>

#include "avalign/errors.hpp"
#include "avalign/util.hpp"

namespace avalign {

double rms(const AudioBuffer& a) {
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (double s : a.samples) acc += s * s;
    return std::sqrt(acc / static_cast<double>(a.samples.size()));
}

double peak(const AudioBuffer& a) {
    double p = 0.0;
    for (double s : a.samples) p = std::max(p, std::fabs(s));
    return p;
}

void check_audio(const AudioBuffer& a) {
    if (a.empty()) throw EmptyAudio();
    if (a.sample_rate_hz <= 0) throw ParamOutOfRange("sample_rate_hz must be positive");
    for (double s : a.samples) {
        if (!std::isfinite(s)) throw ParamOutOfRange("audio contains non-finite samples");
    }
}

std::string audio_hash(const AudioBuffer& a) {
    std::uint64_t h = fnv1a(a.samples.data(), a.samples.size() * sizeof(double));
    std::uint64_t rate = static_cast<std::uint64_t>(a.sample_rate_hz);
    h ^= fnv1a(&rate, sizeof rate);
    return hex64(h);
}

std::vector<double> energy_envelope(const AudioBuffer& a, double frame_hz) {
    if (a.empty()) throw EmptyAudio();
    if (frame_hz <= 0.0) throw ParamOutOfRange("frame_hz must be positive");
    const double sr = a.sample_rate_hz;
    const std::size_t n = a.samples.size();
    const std::size_t ticks =
        static_cast<std::size_t>(std::ceil(static_cast<double>(n) * frame_hz / sr));
    std::vector<double> env(ticks, 0.0);
    for (std::size_t k = 0; k < ticks; ++k) {
        std::size_t lo = static_cast<std::size_t>(std::floor(k * sr / frame_hz));
        std::size_t hi = static_cast<std::size_t>(std::floor((k + 1) * sr / frame_hz));
        if (hi > n) hi = n;
        if (lo >= hi) {
            env[k] = 0.0;
            continue;
        }
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += a.samples[i] * a.samples[i];
        env[k] = std::sqrt(acc / static_cast<double>(hi - lo));
    }
    return env;
}

double peak_rate(const std::vector<double>& series, double rate_hz) {
    if (series.size() < 3 || rate_hz <= 0.0) return 0.0;
    double mx = 0.0;
    for (double v : series) mx = std::max(mx, v);
    if (mx <= 0.0) return 0.0;
    const double gate = 0.3 * mx;
    std::size_t count = 0;
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        if (series[i] >= gate && series[i] > series[i - 1] && series[i] >= series[i + 1]) ++count;
    }
    double duration = static_cast<double>(series.size()) / rate_hz;
    return duration > 0.0 ? static_cast<double>(count) / duration : 0.0;
}

}  // namespace avalign
