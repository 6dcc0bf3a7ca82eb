#include "avalign/actions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "avalign/errors.hpp"
#include "avalign/fft.hpp"
#include "avalign/phase_vocoder.hpp"
#include "avalign/resample.hpp"

namespace avalign {

namespace {

constexpr double kTiny = 1e-12;
constexpr double kBlankLevel = 1e-4;   // envelope level below which a tick counts as blank
constexpr double kBlankTickHz = 100.0; // blank detector resolution
constexpr double kContextMs = 250.0;   // flank span used for context_noise
constexpr double kFadeMs = 10.0;       // crossfade at blank edges
constexpr double kComfortRms = 1e-3;   // -60 dBFS

double db_to_lin(double db) { return std::pow(10.0, db / 20.0); }

void sanitize(AudioBuffer& a) {
    for (double& s : a.samples) {
        if (!std::isfinite(s)) s = 0.0;
        s = std::clamp(s, -1.0, 1.0);
    }
}

// Mirror-pad one analysis window at each end before the STFT. The first and
// last samples are covered by only a sliver of the window, so any spectral
// edit there would resynthesize as a large spike; padding keeps those
// regions out of the output entirely.
AudioBuffer pad_for_stft(const AudioBuffer& audio, std::size_t pad) {
    AudioBuffer padded;
    padded.sample_rate_hz = audio.sample_rate_hz;
    const std::size_t n = audio.samples.size();
    pad = std::min(pad, n);
    padded.samples.reserve(n + 2 * pad);
    for (std::size_t i = pad; i > 0; --i) padded.samples.push_back(audio.samples[i - 1]);
    padded.samples.insert(padded.samples.end(), audio.samples.begin(), audio.samples.end());
    for (std::size_t i = 0; i < pad; ++i) padded.samples.push_back(audio.samples[n - 1 - i]);
    return padded;
}

AudioBuffer unpad(const AudioBuffer& padded, std::size_t pad, std::size_t n, int sr) {
    AudioBuffer out;
    out.sample_rate_hz = sr;
    out.samples.assign(padded.samples.begin() + static_cast<long>(pad),
                       padded.samples.begin() + static_cast<long>(pad + n));
    return out;
}

Spectrogram padded_spectrogram(const AudioBuffer& audio, std::size_t& pad) {
    const StftConfig cfg{};
    check_audio(audio);
    const std::size_t win = static_cast<std::size_t>(cfg.window_samples(audio.sample_rate_hz));
    if (audio.samples.size() < win) throw EmptyAudio("audio shorter than one analysis window");
    pad = std::min(win, audio.samples.size());
    return compute_spectrogram(pad_for_stft(audio, pad), cfg);
}

AudioBuffer apply_spectral_subtraction(const AudioBuffer& audio, const ActionParams& p) {
    std::size_t pad = 0;
    Spectrogram spec = padded_spectrogram(audio, pad);
    const std::vector<double> noise = noise_magnitude_profile(spec, p.noise_percentile);
    const double floor_lin = db_to_lin(p.floor_db);
    for (int t = 0; t < spec.n_frames; ++t) {
        for (int b = 0; b < spec.n_bins; ++b) {
            std::complex<double>& x = spec.at(b, t);
            double m = std::abs(x);
            double sub = m - p.oversubtraction * noise[static_cast<std::size_t>(b)];
            double out_m = std::max(sub, floor_lin * m);
            x = m > kTiny ? x * (out_m / m) : std::complex<double>{0.0, 0.0};
        }
    }
    return unpad(invert_spectrogram(spec), pad, audio.samples.size(), audio.sample_rate_hz);
}

AudioBuffer apply_wiener(const AudioBuffer& audio, const ActionParams& p) {
    std::size_t pad = 0;
    Spectrogram spec = padded_spectrogram(audio, pad);
    const std::vector<double> noise = noise_magnitude_profile(spec, p.noise_percentile);
    const double floor_lin = db_to_lin(p.floor_db);
    for (int t = 0; t < spec.n_frames; ++t) {
        for (int b = 0; b < spec.n_bins; ++b) {
            std::complex<double>& x = spec.at(b, t);
            double n2 = noise[static_cast<std::size_t>(b)] * noise[static_cast<std::size_t>(b)];
            double gain;
            if (n2 < kTiny * kTiny) {
                gain = 1.0;
            } else {
                double snr_post = std::norm(x) / n2;
                double xi = std::max(snr_post - 1.0, 0.0);
                gain = xi / (1.0 + xi);
            }
            x *= std::max(gain, floor_lin);
        }
    }
    return unpad(invert_spectrogram(spec), pad, audio.samples.size(), audio.sample_rate_hz);
}

AudioBuffer apply_gate(const AudioBuffer& audio, const ActionParams& p) {
    std::size_t pad = 0;
    Spectrogram spec = padded_spectrogram(audio, pad);
    const double rel = db_to_lin(p.gate_threshold_db);
    const double hop_s = spec.config.hop_samples(spec.sample_rate_hz) /
                         static_cast<double>(spec.sample_rate_hz);
    const double a_up = p.attack_ms <= 0.0 ? 1.0 : 1.0 - std::exp(-hop_s * 1000.0 / p.attack_ms);
    const double a_dn = p.release_ms <= 0.0 ? 1.0 : 1.0 - std::exp(-hop_s * 1000.0 / p.release_ms);

    for (int b = 0; b < spec.n_bins; ++b) {
        double pk = 0.0;
        for (int t = 0; t < spec.n_frames; ++t) pk = std::max(pk, std::abs(spec.at(b, t)));
        const double thr = pk * rel;
        double g = std::abs(spec.at(b, 0)) >= thr ? 1.0 : 0.0;
        for (int t = 0; t < spec.n_frames; ++t) {
            double target = std::abs(spec.at(b, t)) >= thr ? 1.0 : 0.0;
            if (t > 0) {
                double alpha = target > g ? a_up : a_dn;
                g += alpha * (target - g);
            }
            spec.at(b, t) *= g;
        }
    }
    return unpad(invert_spectrogram(spec), pad, audio.samples.size(), audio.sample_rate_hz);
}

AudioBuffer apply_wavelet_denoise(const AudioBuffer& audio, const ActionParams& p) {
    check_audio(audio);
    WaveletCoeffs c = dwt(audio.samples, p.wavelet, p.levels);
    std::vector<double> mags(c.details.front().size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(c.details.front()[i]);
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double sigma = mags[mags.size() / 2] / 0.6745;
    const double thr = sigma * std::sqrt(2.0 * std::log(static_cast<double>(c.padded_len)));
    for (auto& level : c.details) {
        for (double& d : level) {
            double m = std::fabs(d) - thr;
            d = m > 0.0 ? (d > 0.0 ? m : -m) : 0.0;
        }
    }
    AudioBuffer out;
    out.sample_rate_hz = audio.sample_rate_hz;
    out.samples = idwt(c);
    return out;
}

AudioBuffer apply_speed(const AudioBuffer& audio, const ActionParams& p) {
    if (p.speed_factor == 1.0) return audio;
    return time_stretch(audio, 1.0 / p.speed_factor);
}

AudioBuffer apply_pitch(const AudioBuffer& audio, const ActionParams& p) {
    if (p.pitch_semitones == 0.0) return audio;
    const double r = std::pow(2.0, p.pitch_semitones / 12.0);
    AudioBuffer stretched = time_stretch(audio, r);
    AudioBuffer out;
    out.sample_rate_hz = audio.sample_rate_hz;
    out.samples = resample_by_factor(stretched.samples, r);
    out.samples.resize(audio.samples.size(), 0.0);
    return out;
}

AudioBuffer apply_volume(const AudioBuffer& audio, const ActionParams& p) {
    check_audio(audio);
    double gain;
    if (p.gain_db.has_value()) {
        gain = db_to_lin(*p.gain_db);
    } else {
        double cur = rms(audio);
        if (cur < kTiny) throw SilentInput("target_rms on silent input");
        gain = *p.target_rms / cur;
    }
    AudioBuffer out;
    out.sample_rate_hz = audio.sample_rate_hz;
    out.samples.resize(audio.samples.size());
    for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        double y = audio.samples[i] * gain;
        if (y > 1.0) {
            y = std::tanh(y);
        } else if (y < -1.0) {
            y = -std::tanh(-y);
        }
        out.samples[i] = y;
    }
    return out;
}

struct BlankRun {
    std::size_t begin = 0;  // sample index
    std::size_t end = 0;
};

std::vector<BlankRun> find_blanks(const AudioBuffer& audio, double blank_min_ms) {
    const std::vector<double> env = energy_envelope(audio, kBlankTickHz);
    const double tick_samples = audio.sample_rate_hz / kBlankTickHz;
    const std::size_t min_ticks =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(blank_min_ms / 1000.0 * kBlankTickHz)));
    std::vector<BlankRun> runs;
    std::size_t i = 0;
    while (i < env.size()) {
        if (env[i] >= kBlankLevel) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < env.size() && env[j] < kBlankLevel) ++j;
        if (j - i >= min_ticks) {
            BlankRun r;
            r.begin = static_cast<std::size_t>(std::floor(i * tick_samples));
            r.end = std::min(audio.samples.size(),
                             static_cast<std::size_t>(std::floor(j * tick_samples)));
            if (r.end > r.begin) runs.push_back(r);
        }
        i = j;
    }
    return runs;
}

// Noise with the magnitude envelope of `shape` (one-sided STFT-grid bins),
// scaled to target_rms. Deterministic in the rng state.
std::vector<double> shaped_noise(std::size_t len, const std::vector<double>& shape, int sr,
                                 int nfft_grid, double target_rms, std::mt19937& rng) {
    const std::size_t m = fft::next_pow2(std::max<std::size_t>(len, 512));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> buf(m);
    for (auto& v : buf) v = {gauss(rng), 0.0};
    fft::transform(buf, false);
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k <= half; ++k) {
        double hz = static_cast<double>(k) * sr / static_cast<double>(m);
        double pos = hz * nfft_grid / sr;  // fractional index into shape
        std::size_t i0 = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(i0);
        double w;
        if (i0 + 1 < shape.size()) {
            w = shape[i0] * (1.0 - frac) + shape[i0 + 1] * frac;
        } else {
            w = shape.empty() ? 1.0 : shape.back();
        }
        buf[k] *= w;
        if (k > 0 && k < half) buf[m - k] = std::conj(buf[k]);
    }
    buf[0] = {buf[0].real(), 0.0};
    buf[half] = {buf[half].real(), 0.0};
    fft::transform(buf, true);
    std::vector<double> out(len);
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        out[i] = buf[i].real();
        acc += out[i] * out[i];
    }
    double cur = std::sqrt(acc / std::max<std::size_t>(1, len));
    double g = cur > kTiny ? target_rms / cur : 0.0;
    for (double& v : out) v *= g;
    return out;
}

AudioBuffer apply_fill_blanks(const AudioBuffer& audio, const ActionParams& p) {
    check_audio(audio);
    const std::vector<BlankRun> runs = find_blanks(audio, p.blank_min_ms);
    if (runs.empty()) return audio;

    AudioBuffer out = audio;
    const int sr = audio.sample_rate_hz;
    const std::size_t context = static_cast<std::size_t>(kContextMs / 1000.0 * sr);
    const std::size_t fade = static_cast<std::size_t>(kFadeMs / 1000.0 * sr);
    const StftConfig stft_cfg{};
    const int nfft = stft_cfg.fft_size(sr);
    const std::size_t win = static_cast<std::size_t>(stft_cfg.window_samples(sr));

    for (std::size_t r = 0; r < runs.size(); ++r) {
        const BlankRun& run = runs[r];
        const std::size_t len = run.end - run.begin;
        std::mt19937 rng(p.seed + static_cast<std::uint32_t>(r) * 7919u);

        std::vector<double> fill;
        bool context_ok = false;
        if (p.fill_mode == FillMode::context_noise) {
            // Each flank is analyzed on its own; splicing them together would
            // put a step discontinuity mid-buffer and smear its splatter into
            // the shape estimate.
            std::vector<double> shape(static_cast<std::size_t>(nfft / 2 + 1), 0.0);
            int shape_frames = 0;
            double sq = 0.0;
            std::size_t n_sq = 0;
            auto add_flank = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    sq += audio.samples[i] * audio.samples[i];
                    ++n_sq;
                }
                if (hi - lo < win) return;
                AudioBuffer fb;
                fb.sample_rate_hz = sr;
                fb.samples.assign(audio.samples.begin() + static_cast<long>(lo),
                                  audio.samples.begin() + static_cast<long>(hi));
                Spectrogram fs = compute_spectrogram(fb, stft_cfg);
                for (int t = 0; t < fs.n_frames; ++t)
                    for (int b = 0; b < fs.n_bins; ++b)
                        shape[static_cast<std::size_t>(b)] += std::abs(fs.at(b, t));
                shape_frames += fs.n_frames;
            };
            add_flank(run.begin > context ? run.begin - context : 0, run.begin);
            add_flank(run.end, std::min(audio.samples.size(), run.end + context));
            if (shape_frames > 0) {
                double norm = 0.0;
                for (double& v : shape) {
                    v /= shape_frames;
                    norm += v * v;
                }
                double flank_rms = n_sq > 0 ? std::sqrt(sq / static_cast<double>(n_sq)) : 0.0;
                if (norm > kTiny) {
                    fill = shaped_noise(len, shape, sr, nfft, flank_rms, rng);
                    context_ok = true;
                }
            }
        }
        if (!context_ok) {
            std::normal_distribution<double> gauss(0.0, kComfortRms);
            fill.resize(len);
            for (double& v : fill) v = gauss(rng);
        }

        for (std::size_t i = 0; i < len; ++i) {
            double wfade = 1.0;
            if (fade > 0) {
                double up = static_cast<double>(i) / static_cast<double>(fade);
                double dn = static_cast<double>(len - 1 - i) / static_cast<double>(fade);
                wfade = std::min({1.0, up, dn});
                if (wfade < 0.0) wfade = 0.0;
            }
            std::size_t idx = run.begin + i;
            out.samples[idx] = out.samples[idx] * (1.0 - wfade) + fill[i] * wfade;
        }
    }
    return out;
}

}  // namespace

bool is_noise_filter(ActionKind k) {
    return k == ActionKind::spectral_subtraction || k == ActionKind::wiener_filter ||
           k == ActionKind::wavelet_denoise || k == ActionKind::spectral_gate;
}

bool is_coordination(ActionKind k) { return !is_noise_filter(k); }

const std::vector<ActionKind>& all_action_kinds() {
    static const std::vector<ActionKind> kinds = {
        ActionKind::spectral_subtraction, ActionKind::wiener_filter, ActionKind::wavelet_denoise,
        ActionKind::spectral_gate,        ActionKind::speed_mod,     ActionKind::pitch_mod,
        ActionKind::volume_adjust,        ActionKind::fill_blanks};
    return kinds;
}

std::string action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::spectral_subtraction: return "spectral_subtraction";
        case ActionKind::wiener_filter: return "wiener_filter";
        case ActionKind::wavelet_denoise: return "wavelet_denoise";
        case ActionKind::spectral_gate: return "spectral_gate";
        case ActionKind::speed_mod: return "speed_mod";
        case ActionKind::pitch_mod: return "pitch_mod";
        case ActionKind::volume_adjust: return "volume_adjust";
        case ActionKind::fill_blanks: return "fill_blanks";
    }
    return "volume_adjust";
}

ActionKind parse_action_kind(const std::string& name) {
    for (ActionKind k : all_action_kinds()) {
        if (action_kind_name(k) == name) return k;
    }
    throw IllegalAction("unknown action kind: " + name);
}

std::string wavelet_name(Wavelet w) { return w == Wavelet::haar ? "haar" : "db4"; }

std::string fill_mode_name(FillMode m) {
    return m == FillMode::context_noise ? "context_noise" : "comfort_noise";
}

void validate_action(const EditAction& a) {
    const ActionParams& p = a.params;
    auto range = [&](bool ok, const std::string& what) {
        if (!ok) throw ParamOutOfRange(action_kind_name(a.kind) + ": " + what);
    };
    switch (a.kind) {
        case ActionKind::spectral_subtraction:
            range(p.noise_percentile > 0.0 && p.noise_percentile <= 50.0, "noise_percentile must be in (0, 50]");
            range(p.oversubtraction >= 1.0 && p.oversubtraction <= 3.0, "oversubtraction must be in [1, 3]");
            range(p.floor_db >= -300.0 && p.floor_db <= 0.0, "floor_db must be in [-300, 0]");
            break;
        case ActionKind::wiener_filter:
            range(p.noise_percentile > 0.0 && p.noise_percentile <= 50.0, "noise_percentile must be in (0, 50]");
            range(p.floor_db >= -300.0 && p.floor_db <= 0.0, "floor_db must be in [-300, 0]");
            break;
        case ActionKind::wavelet_denoise:
            range(p.levels >= 1 && p.levels <= 8, "levels must be in [1, 8]");
            break;
        case ActionKind::spectral_gate:
            range(p.gate_threshold_db >= -300.0 && p.gate_threshold_db <= 100.0,
                  "gate_threshold_db must be in [-300, 100]");
            range(p.attack_ms >= 0.0 && p.attack_ms <= 1000.0, "attack_ms must be in [0, 1000]");
            range(p.release_ms >= 0.0 && p.release_ms <= 5000.0, "release_ms must be in [0, 5000]");
            break;
        case ActionKind::speed_mod:
            range(p.speed_factor >= 0.5 && p.speed_factor <= 2.0, "speed_factor must be in [0.5, 2]");
            break;
        case ActionKind::pitch_mod:
            range(p.pitch_semitones >= -12.0 && p.pitch_semitones <= 12.0,
                  "pitch_semitones must be in [-12, 12]");
            break;
        case ActionKind::volume_adjust:
            range(p.gain_db.has_value() != p.target_rms.has_value(),
                  "exactly one of gain_db and target_rms must be set");
            if (p.gain_db) range(*p.gain_db >= -30.0 && *p.gain_db <= 30.0, "gain_db must be in [-30, 30]");
            if (p.target_rms) range(*p.target_rms > 0.0 && *p.target_rms <= 1.0, "target_rms must be in (0, 1]");
            break;
        case ActionKind::fill_blanks:
            range(p.blank_min_ms >= 20.0 && p.blank_min_ms <= 5000.0, "blank_min_ms must be in [20, 5000]");
            break;
    }
}

AudioBuffer apply_action(const AudioBuffer& audio, const EditAction& a) {
    check_audio(audio);
    validate_action(a);
    AudioBuffer out;
    bool identity = false;
    switch (a.kind) {
        case ActionKind::spectral_subtraction: out = apply_spectral_subtraction(audio, a.params); break;
        case ActionKind::wiener_filter: out = apply_wiener(audio, a.params); break;
        case ActionKind::wavelet_denoise: out = apply_wavelet_denoise(audio, a.params); break;
        case ActionKind::spectral_gate: out = apply_gate(audio, a.params); break;
        case ActionKind::speed_mod:
            identity = a.params.speed_factor == 1.0;
            out = apply_speed(audio, a.params);
            break;
        case ActionKind::pitch_mod:
            identity = a.params.pitch_semitones == 0.0;
            out = apply_pitch(audio, a.params);
            break;
        case ActionKind::volume_adjust: out = apply_volume(audio, a.params); break;
        case ActionKind::fill_blanks: out = apply_fill_blanks(audio, a.params); break;
    }
    if (!identity) sanitize(out);
    return out;
}

void validate_plan(const ActionPlan& p) {
    if (p.actions.empty() || p.actions.size() > 2)
        throw IllegalAction("plan must contain one or two actions");
    int noise = 0, coord = 0;
    for (const EditAction& a : p.actions) {
        if (is_noise_filter(a.kind)) {
            ++noise;
        } else {
            ++coord;
        }
    }
    if (noise > 1 || coord > 1)
        throw IllegalAction("plan allows at most one noise filter and one coordination action");
    if (p.actions.size() == 2 && !is_noise_filter(p.actions.front().kind))
        throw IllegalAction("noise filter must precede the coordination action");
    for (const EditAction& a : p.actions) validate_action(a);
}

AudioBuffer apply_plan(const AudioBuffer& audio, const ActionPlan& p) {
    validate_plan(p);
    AudioBuffer cur = audio;
    for (const EditAction& a : p.actions) cur = apply_action(cur, a);
    return cur;
}

nlohmann::json action_to_json(const EditAction& a) {
    nlohmann::json params = nlohmann::json::object();
    const ActionParams& p = a.params;
    switch (a.kind) {
        case ActionKind::spectral_subtraction:
            params["noise_percentile"] = p.noise_percentile;
            params["oversubtraction"] = p.oversubtraction;
            params["floor_db"] = p.floor_db;
            break;
        case ActionKind::wiener_filter:
            params["noise_percentile"] = p.noise_percentile;
            params["floor_db"] = p.floor_db;
            break;
        case ActionKind::wavelet_denoise:
            params["wavelet"] = wavelet_name(p.wavelet);
            params["levels"] = p.levels;
            params["threshold_rule"] = "universal";
            params["threshold_mode"] = "soft";
            break;
        case ActionKind::spectral_gate:
            params["gate_threshold_db"] = p.gate_threshold_db;
            params["gate_attack_ms"] = p.attack_ms;
            params["gate_release_ms"] = p.release_ms;
            break;
        case ActionKind::speed_mod: params["speed_factor"] = p.speed_factor; break;
        case ActionKind::pitch_mod: params["pitch_semitones"] = p.pitch_semitones; break;
        case ActionKind::volume_adjust:
            if (p.gain_db) params["gain_db"] = *p.gain_db;
            if (p.target_rms) params["target_rms"] = *p.target_rms;
            break;
        case ActionKind::fill_blanks:
            params["blank_min_ms"] = p.blank_min_ms;
            params["fill_mode"] = fill_mode_name(p.fill_mode);
            params["seed"] = p.seed;
            break;
    }
    nlohmann::json j;
    j["kind"] = action_kind_name(a.kind);
    j["params"] = params;
    if (!a.rationale.empty()) j["rationale"] = a.rationale;
    return j;
}

EditAction action_from_json(const nlohmann::json& j, bool strict) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw UnparseablePlan("action must be an object with a string 'kind'");
    EditAction a;
    a.kind = parse_action_kind(j["kind"].get<std::string>());
    if (j.contains("rationale") && j["rationale"].is_string())
        a.rationale = j["rationale"].get<std::string>();

    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (!params.is_object()) throw UnparseablePlan("action params must be an object");

    auto want_num = [&](const std::string& key, double& dst) {
        if (!params.contains(key)) return;
        if (!params[key].is_number()) throw UnparseablePlan("parameter '" + key + "' must be a number");
        dst = params[key].get<double>();
    };

    std::vector<std::string> known;
    ActionParams& p = a.params;
    switch (a.kind) {
        case ActionKind::spectral_subtraction:
            known = {"noise_percentile", "oversubtraction", "floor_db"};
            want_num("noise_percentile", p.noise_percentile);
            want_num("oversubtraction", p.oversubtraction);
            want_num("floor_db", p.floor_db);
            break;
        case ActionKind::wiener_filter:
            known = {"noise_percentile", "floor_db"};
            want_num("noise_percentile", p.noise_percentile);
            want_num("floor_db", p.floor_db);
            break;
        case ActionKind::wavelet_denoise:
            known = {"wavelet", "levels", "threshold_rule", "threshold_mode"};
            if (params.contains("wavelet")) {
                std::string w = params["wavelet"].is_string() ? params["wavelet"].get<std::string>() : "";
                if (w == "haar") {
                    p.wavelet = Wavelet::haar;
                } else if (w == "db4") {
                    p.wavelet = Wavelet::db4;
                } else {
                    throw IllegalAction("unknown wavelet: " + w);
                }
            }
            if (params.contains("levels")) {
                if (!params["levels"].is_number_integer()) throw UnparseablePlan("levels must be an integer");
                p.levels = params["levels"].get<int>();
            }
            if (params.contains("threshold_rule") && params["threshold_rule"] != "universal")
                throw IllegalAction("unsupported threshold_rule");
            if (params.contains("threshold_mode") && params["threshold_mode"] != "soft")
                throw IllegalAction("unsupported threshold_mode");
            break;
        case ActionKind::spectral_gate:
            known = {"gate_threshold_db", "gate_attack_ms", "gate_release_ms"};
            want_num("gate_threshold_db", p.gate_threshold_db);
            want_num("gate_attack_ms", p.attack_ms);
            want_num("gate_release_ms", p.release_ms);
            break;
        case ActionKind::speed_mod:
            known = {"speed_factor"};
            want_num("speed_factor", p.speed_factor);
            break;
        case ActionKind::pitch_mod:
            known = {"pitch_semitones"};
            want_num("pitch_semitones", p.pitch_semitones);
            break;
        case ActionKind::volume_adjust: {
            known = {"gain_db", "target_rms"};
            if (params.contains("gain_db")) {
                if (!params["gain_db"].is_number()) throw UnparseablePlan("gain_db must be a number");
                p.gain_db = params["gain_db"].get<double>();
            }
            if (params.contains("target_rms")) {
                if (!params["target_rms"].is_number()) throw UnparseablePlan("target_rms must be a number");
                p.target_rms = params["target_rms"].get<double>();
            }
            if (!p.gain_db && !p.target_rms) p.gain_db = 0.0;
            break;
        }
        case ActionKind::fill_blanks:
            known = {"blank_min_ms", "fill_mode", "seed"};
            want_num("blank_min_ms", p.blank_min_ms);
            if (params.contains("fill_mode")) {
                std::string m = params["fill_mode"].is_string() ? params["fill_mode"].get<std::string>() : "";
                if (m == "context_noise") {
                    p.fill_mode = FillMode::context_noise;
                } else if (m == "comfort_noise") {
                    p.fill_mode = FillMode::comfort_noise;
                } else {
                    throw IllegalAction("unknown fill_mode: " + m);
                }
            }
            if (params.contains("seed")) {
                if (!params["seed"].is_number_unsigned() && !params["seed"].is_number_integer())
                    throw UnparseablePlan("seed must be an integer");
                p.seed = params["seed"].get<std::uint32_t>();
            }
            break;
    }

    if (strict) {
        for (auto it = params.begin(); it != params.end(); ++it) {
            if (std::find(known.begin(), known.end(), it.key()) == known.end())
                throw IllegalAction("unknown parameter '" + it.key() + "' for " + action_kind_name(a.kind));
        }
        try {
            validate_action(a);
        } catch (const ParamOutOfRange& e) {
            throw IllegalAction(e.what());
        }
    }
    return a;
}

nlohmann::json plan_to_json(const ActionPlan& p) {
    nlohmann::json j;
    j["actions"] = nlohmann::json::array();
    for (const EditAction& a : p.actions) j["actions"].push_back(action_to_json(a));
    if (!p.rationale.empty()) j["rationale"] = p.rationale;
    return j;
}

ActionPlan plan_from_json(const nlohmann::json& j, bool strict) {
    if (!j.is_object() || !j.contains("actions") || !j["actions"].is_array())
        throw UnparseablePlan("plan must be an object with an 'actions' array");
    ActionPlan p;
    for (const nlohmann::json& a : j["actions"]) p.actions.push_back(action_from_json(a, strict));
    if (j.contains("rationale") && j["rationale"].is_string())
        p.rationale = j["rationale"].get<std::string>();
    if (strict) validate_plan(p);
    return p;
}

bool same_action(const EditAction& a, const EditAction& b) {
    EditAction ca = a, cb = b;
    ca.rationale.clear();
    cb.rationale.clear();
    return action_to_json(ca) == action_to_json(cb);
}

bool same_plan(const ActionPlan& a, const ActionPlan& b) {
    if (a.actions.size() != b.actions.size()) return false;
    for (std::size_t i = 0; i < a.actions.size(); ++i) {
        if (!same_action(a.actions[i], b.actions[i])) return false;
    }
    return true;
}

}  // namespace avalign
