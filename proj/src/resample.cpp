#include "avalign/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "avalign/errors.hpp"

namespace avalign {

namespace {

constexpr int kHalfTaps = 32;

// Bandlimited interpolation kernel at offset d with relative cutoff fc. The
// Hann window spans kHalfTaps zero crossings of the sinc.
double kernel(double d, double fc) {
    double u = fc * d;
    double t = u / kHalfTaps;
    if (t <= -1.0 || t >= 1.0) return 0.0;
    double s;
    if (std::fabs(u) < 1e-12) {
        s = fc;
    } else {
        s = fc * std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
    }
    double w = 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    return s * w;
}

std::vector<double> resample_core(const std::vector<double>& in, double step, std::size_t out_len) {
    // step = input samples advanced per output sample
    const double fc = step > 1.0 ? 1.0 / step : 1.0;
    const double reach = kHalfTaps / fc;
    std::vector<double> out(out_len, 0.0);
    const long n = static_cast<long>(in.size());
    for (std::size_t i = 0; i < out_len; ++i) {
        double t = static_cast<double>(i) * step;
        long j0 = static_cast<long>(std::ceil(t - reach));
        long j1 = static_cast<long>(std::floor(t + reach));
        if (j0 < 0) j0 = 0;
        if (j1 >= n) j1 = n - 1;
        double acc = 0.0;
        for (long j = j0; j <= j1; ++j) acc += in[static_cast<std::size_t>(j)] * kernel(t - j, fc);
        out[i] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> resample_by_factor(const std::vector<double>& in, double factor) {
    if (factor <= 0.0) throw ParamOutOfRange("resample factor must be positive");
    if (in.empty()) return {};
    std::size_t out_len = static_cast<std::size_t>(std::llround(static_cast<double>(in.size()) / factor));
    if (out_len == 0) out_len = 1;
    return resample_core(in, factor, out_len);
}

AudioBuffer resample(const AudioBuffer& in, int target_rate_hz) {
    check_audio(in);
    if (target_rate_hz <= 0) throw ParamOutOfRange("target rate must be positive");
    if (in.sample_rate_hz == target_rate_hz) return in;
    double step = static_cast<double>(in.sample_rate_hz) / target_rate_hz;
    std::size_t out_len = static_cast<std::size_t>(
        std::llround(static_cast<double>(in.samples.size()) * target_rate_hz / in.sample_rate_hz));
    if (out_len == 0) out_len = 1;
    AudioBuffer out;
    out.sample_rate_hz = target_rate_hz;
    out.samples = resample_core(in.samples, step, out_len);
    for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);
    return out;
}

}  // namespace avalign
