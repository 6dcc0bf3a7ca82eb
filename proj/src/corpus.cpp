#include "avalign/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "avalign/errors.hpp"
#include "avalign/fft.hpp"
#include "avalign/resample.hpp"
#include "avalign/util.hpp"
#include "avalign/wav.hpp"

namespace avalign {

namespace {

constexpr double kFloorRel = 0.006;   // inter-pulse noise floor relative to pulse peak
constexpr double kTargetRms = 0.1;

// Pulse envelope: raised-cosine bumps of width `width_s` at phase + k/rate.
double pulse_env(double t, double rate, double phase, double width_s) {
    double rel = t - phase;
    double k = std::round(rel * rate);
    double center = phase + k / rate;
    double u = (t - center) / width_s;
    if (u < -0.5 || u > 0.5) return 0.0;
    double c = std::cos(std::numbers::pi * u);
    return c * c;
}

// Stationary noise whose linear magnitude follows the class profile
// (128-bin log space upsampled over the FFT grid).
std::vector<double> profile_noise(std::size_t len, const std::vector<double>& log_profile, int sr,
                                  std::mt19937_64& rng) {
    const std::size_t m = fft::next_pow2(std::max<std::size_t>(len, 1024));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::complex<double>> buf(m);
    for (auto& v : buf) v = {gauss(rng), 0.0};
    fft::transform(buf, false);

    const StftConfig cfg{};
    const int bins = static_cast<int>(log_profile.size());
    const double hz_hi = view_bin_center_hz(bins - 1, cfg, sr);
    const double hz_lo = view_bin_center_hz(0, cfg, sr);
    const double hz_step = (hz_hi - hz_lo) / (bins - 1);

    const std::size_t half = m / 2;
    for (std::size_t k = 0; k <= half; ++k) {
        double hz = static_cast<double>(k) * sr / static_cast<double>(m);
        double pos = (hz - hz_lo) / hz_step;
        double w;
        if (pos <= 0.0) {
            w = std::expm1(std::max(log_profile.front(), 0.0));
        } else if (pos >= bins - 1) {
            w = std::expm1(std::max(log_profile.back(), 0.0));
        } else {
            std::size_t i0 = static_cast<std::size_t>(pos);
            double frac = pos - static_cast<double>(i0);
            double a = std::expm1(std::max(log_profile[i0], 0.0));
            double b = std::expm1(std::max(log_profile[i0 + 1], 0.0));
            w = a * (1.0 - frac) + b * frac;
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
    if (cur > 1e-12) {
        for (double& v : out) v /= cur;
    }
    return out;
}

}  // namespace

std::string corruption_kind_name(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::none: return "none";
        case CorruptionKind::noise: return "noise";
        case CorruptionKind::offset: return "offset";
        case CorruptionKind::speed: return "speed";
        case CorruptionKind::gap: return "gap";
        case CorruptionKind::gain: return "gain";
    }
    return "none";
}

CorruptionKind parse_corruption_kind(const std::string& name) {
    if (name == "none") return CorruptionKind::none;
    if (name == "noise") return CorruptionKind::noise;
    if (name == "offset") return CorruptionKind::offset;
    if (name == "speed") return CorruptionKind::speed;
    if (name == "gap") return CorruptionKind::gap;
    if (name == "gain") return CorruptionKind::gain;
    throw ParseError("unknown corruption kind: " + name);
}

nlohmann::json corruption_to_json(const CorruptionSpec& c) {
    return nlohmann::json{{"kind", corruption_kind_name(c.kind)}, {"value", c.value}};
}

CorruptionSpec corruption_from_json(const nlohmann::json& j) {
    CorruptionSpec c;
    if (!j.is_object()) throw ParseError("corruption spec must be an object");
    c.kind = parse_corruption_kind(j.value("kind", "none"));
    c.value = j.value("value", 0.0);
    return c;
}

AudioBuffer apply_corruption(const AudioBuffer& clean, const CorruptionSpec& c, std::uint64_t seed) {
    check_audio(clean);
    AudioBuffer out = clean;
    std::mt19937_64 rng(seed);
    switch (c.kind) {
        case CorruptionKind::none: break;
        case CorruptionKind::noise: {
            double sig = rms(clean);
            double noise_rms = sig / std::pow(10.0, c.value / 20.0);
            std::normal_distribution<double> gauss(0.0, noise_rms);
            for (double& s : out.samples) s = std::clamp(s + gauss(rng), -1.0, 1.0);
            break;
        }
        case CorruptionKind::offset: {
            std::size_t off = static_cast<std::size_t>(
                std::llround(c.value * clean.sample_rate_hz));
            off = std::min(off, clean.samples.size());
            std::vector<double> shifted(clean.samples.size(), 0.0);
            for (std::size_t i = off; i < shifted.size(); ++i)
                shifted[i] = clean.samples[i - off];
            out.samples = std::move(shifted);
            break;
        }
        case CorruptionKind::speed: {
            if (c.value <= 0.0) throw ParamOutOfRange("speed corruption must be positive");
            out.samples = resample_by_factor(clean.samples, c.value);
            for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);
            break;
        }
        case CorruptionKind::gap: {
            double dur = clean.duration_s();
            double margin = 0.4;
            double lo = margin;
            double hi = std::max(lo, dur - margin - c.value);
            std::uniform_real_distribution<double> pos(lo, hi);
            double t0 = pos(rng);
            std::size_t a = static_cast<std::size_t>(t0 * clean.sample_rate_hz);
            std::size_t b = std::min(out.samples.size(),
                                     a + static_cast<std::size_t>(c.value * clean.sample_rate_hz));
            for (std::size_t i = a; i < b; ++i) out.samples[i] = 0.0;
            break;
        }
        case CorruptionKind::gain: {
            double g = std::pow(10.0, c.value / 20.0);
            for (double& s : out.samples) s = std::clamp(s * g, -1.0, 1.0);
            break;
        }
    }
    return out;
}

SynthPair synth_pair(const SynthConfig& cfg, int index, const ClassProfileTable& profiles) {
    if (cfg.n_pairs < 1) throw ParamOutOfRange("n_pairs must be >= 1");
    if (cfg.duration_s < 1.0) throw ParamOutOfRange("duration_s must be >= 1");

    std::vector<std::string> classes = cfg.classes;
    if (classes.empty()) classes = profiles.labels();
    if (classes.empty()) throw ParamOutOfRange("no classes available for synthesis");

    std::mt19937_64 rng(derive_seed(cfg.seed, "pair" + std::to_string(index)));

    SynthPair sp;
    sp.klass = classes[rng() % classes.size()];
    const std::vector<double>& profile = profiles.get(sp.klass);

    static const double rates[] = {1.5, 2.0, 2.5, 3.0};
    const double rate = rates[rng() % 4];
    std::uniform_real_distribution<double> phase_d(0.05, 0.05 + 1.0 / rate);
    const double phase = phase_d(rng);
    const double width = 0.3 / rate;

    const int sr = kPipelineRateHz;
    const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s * sr));
    std::vector<double> noise = profile_noise(n, profile, sr, rng);

    sp.clean.sample_rate_hz = sr;
    sp.clean.samples.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / sr;
        double e = pulse_env(t, rate, phase, width);
        double v = noise[i] * (kFloorRel + e);
        sp.clean.samples[i] = v;
        acc += v * v;
    }
    double cur = std::sqrt(acc / static_cast<double>(n));
    double g = cur > 1e-12 ? kTargetRms / cur : 0.0;
    for (double& v : sp.clean.samples) v = std::clamp(v * g, -1.0, 1.0);

    sp.video.frame_rate_hz = cfg.frame_rate_hz;
    sp.video.labels = {sp.klass};
    const std::size_t ticks = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.frame_rate_hz));
    sp.video.activity.resize(ticks);
    for (std::size_t k = 0; k < ticks; ++k) {
        double t = (static_cast<double>(k) + 0.5) / cfg.frame_rate_hz;
        sp.video.activity[k] = std::clamp(0.02 + 0.98 * pulse_env(t, rate, phase, width), 0.0, 1.0);
    }

    // Corruption draw.
    std::vector<std::string> kinds = cfg.corruptions;
    if (kinds.empty()) kinds = {"noise", "offset", "speed", "gap", "gain"};
    const int n_clean = static_cast<int>(std::llround(cfg.clean_fraction * cfg.n_pairs));
    if (index < n_clean) {
        sp.corruption.kind = CorruptionKind::none;
    } else {
        sp.corruption.kind = parse_corruption_kind(kinds[rng() % kinds.size()]);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        switch (sp.corruption.kind) {
            case CorruptionKind::none: break;
            case CorruptionKind::noise:
                sp.corruption.value =
                    cfg.noise_snr_db_lo + u(rng) * (cfg.noise_snr_db_hi - cfg.noise_snr_db_lo);
                break;
            case CorruptionKind::offset:
                sp.corruption.value = cfg.offset_s_lo + u(rng) * (cfg.offset_s_hi - cfg.offset_s_lo);
                break;
            case CorruptionKind::speed:
                do {
                    sp.corruption.value = cfg.speed_lo + u(rng) * (cfg.speed_hi - cfg.speed_lo);
                } while (std::fabs(sp.corruption.value - 1.0) < 0.2);
                break;
            case CorruptionKind::gap:
                sp.corruption.value = cfg.gap_s_lo + u(rng) * (cfg.gap_s_hi - cfg.gap_s_lo);
                break;
            case CorruptionKind::gain:
                sp.corruption.value = cfg.gain_db_lo + u(rng) * (cfg.gain_db_hi - cfg.gain_db_lo);
                break;
        }
    }

    sp.corrupted = apply_corruption(sp.clean, sp.corruption,
                                    derive_seed(cfg.seed, "corrupt" + std::to_string(index)));
    return sp;
}

std::vector<AVPairRecord> synth_corpus(const std::string& dir, const SynthConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "audio");
    const ClassProfileTable profiles = ClassProfileTable::builtin_defaults();

    std::vector<AVPairRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.n_pairs));
    for (int i = 0; i < cfg.n_pairs; ++i) {
        SynthPair sp = synth_pair(cfg, i, profiles);
        char name[32];
        std::snprintf(name, sizeof name, "pair_%04d", i);

        AVPairRecord r;
        r.pair_id = name;
        r.audio_path = std::string("audio/") + name + ".wav";
        r.video = sp.video;
        std::string clean_rel = std::string("audio/") + name + ".clean.wav";
        r.ground_truth = nlohmann::json{{"class", sp.klass},
                                        {"clean_audio", clean_rel},
                                        {"corruption", corruption_to_json(sp.corruption)}};
        write_wav((fs::path(dir) / r.audio_path).string(), sp.corrupted);
        write_wav((fs::path(dir) / clean_rel).string(), sp.clean);
        records.push_back(std::move(r));
    }
    write_manifest((fs::path(dir) / "manifest.jsonl").string(), records);
    return records;
}

// ---- mixture study ----

namespace {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, n - 1);
        std::swap(idx[i], idx[d(rng)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

MixtureReport mixture_study(const std::vector<AVPairRecord>& records, const std::string& root,
                            const Scorer& scorer, const MixtureConfig& cfg) {
    namespace fs = std::filesystem;
    const std::size_t T = cfg.base_true;
    const std::size_t F = cfg.base_false;
    const std::size_t need = std::max(2 * T, 2 * F);
    if (records.size() < need)
        throw InsufficientPairs("mixture study needs " + std::to_string(need) + " pairs, manifest has " +
                                std::to_string(records.size()));
    for (const AVPairRecord& r : records) {
        if (!r.ground_truth.is_object() || !r.ground_truth.contains("clean_audio"))
            throw InsufficientPairs("record " + r.pair_id + " lacks clean_audio ground truth");
    }

    struct Cell {
        std::size_t t, f;
    };
    const Cell grid[] = {{T, 0}, {0, F}, {T, F}, {T, 2 * F}, {2 * T, F}};

    MixtureReport rep;
    std::mt19937_64 rng(derive_seed(cfg.seed, "mixture"));
    for (const Cell& cell : grid) {
        MixtureCell out;
        out.n_true = cell.t;
        out.n_false = cell.f;
        out.true_fraction =
            cell.t + cell.f > 0 ? static_cast<double>(cell.t) / static_cast<double>(cell.t + cell.f) : 0.0;

        double acc_a = 0.0, acc_t = 0.0, acc_m = 0.0;
        std::size_t count = 0;
        auto score_one = [&](const AVPairRecord& r, bool truth) {
            std::string rel = truth ? r.ground_truth["clean_audio"].get<std::string>() : r.audio_path;
            AudioBuffer a = load_audio((fs::path(root) / rel).string());
            ReflectionScores s = scorer.reflect(a, r.video);
            acc_a += s.alignment;
            acc_t += s.temporal;
            acc_m += s.min_score();
            ++count;
        };
        for (std::size_t i : sample_without_replacement(records.size(), cell.t, rng))
            score_one(records[i], true);
        for (std::size_t i : sample_without_replacement(records.size(), cell.f, rng))
            score_one(records[i], false);

        if (count > 0) {
            out.mean_alignment = acc_a / static_cast<double>(count);
            out.mean_temporal = acc_t / static_cast<double>(count);
            out.mean_min = acc_m / static_cast<double>(count);
        }
        rep.cells.push_back(out);
    }
    return rep;
}

nlohmann::json mixture_to_json(const MixtureReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const MixtureCell& c : r.cells) {
        cells.push_back({{"n_true", c.n_true},
                         {"n_false", c.n_false},
                         {"true_fraction", c.true_fraction},
                         {"mean_alignment", c.mean_alignment},
                         {"mean_temporal", c.mean_temporal},
                         {"mean_min", c.mean_min}});
    }
    return nlohmann::json{{"cells", cells}};
}

std::string mixture_to_text(const MixtureReport& r) {
    std::string s = "true   false  frac    alignment  temporal   min\n";
    for (const MixtureCell& c : r.cells) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-6zu %-6zu %-7.3f %-10.4f %-10.4f %-10.4f\n", c.n_true,
                      c.n_false, c.true_fraction, c.mean_alignment, c.mean_temporal, c.mean_min);
        s += buf;
    }
    return s;
}

// ---- ablation ----

AblationReport ablation_study(const std::vector<AVPairRecord>& records, const std::string& root,
                              const WorkflowConfig& base_cfg, const std::vector<std::uint64_t>& seeds) {
    if (records.empty()) throw InsufficientPairs("ablation needs a non-empty manifest");
    if (seeds.empty()) throw ParamOutOfRange("ablation needs at least one seed");

    WorkflowConfig agent_cfg = base_cfg;
    agent_cfg.planner = PlannerKind::rule;
    BatchResult agent = run_batch(records, root, agent_cfg, "", 1);

    AblationReport rep;
    rep.agent.name = "agent";
    rep.agent.seed = base_cfg.seed;
    rep.agent.mean_final_min = agent.report.mean_final_min;
    rep.agent.mean_baseline_min = agent.report.mean_baseline_min;

    std::map<std::string, double> agent_final;
    for (const WorkflowTrace& t : agent.traces) {
        if (t.terminal != "error") agent_final[t.pair_id] = t.final_scores.min_score();
    }

    double acc_rate = 0.0;
    for (std::uint64_t seed : seeds) {
        WorkflowConfig rnd_cfg = base_cfg;
        rnd_cfg.planner = PlannerKind::random;
        rnd_cfg.seed = seed;
        BatchResult rnd = run_batch(records, root, rnd_cfg, "", 1);

        AblationArm arm;
        arm.name = "random";
        arm.seed = seed;
        arm.mean_final_min = rnd.report.mean_final_min;
        arm.mean_baseline_min = rnd.report.mean_baseline_min;
        rep.random_arms.push_back(arm);

        std::size_t wins = 0, total = 0;
        for (const WorkflowTrace& t : rnd.traces) {
            auto it = agent_final.find(t.pair_id);
            if (it == agent_final.end() || t.terminal == "error") continue;
            ++total;
            if (it->second >= t.final_scores.min_score() - 1e-9) ++wins;
        }
        double rate = total > 0 ? static_cast<double>(wins) / static_cast<double>(total) : 0.0;
        rep.win_rates.push_back(rate);
        acc_rate += rate;
    }
    rep.mean_win_rate = acc_rate / static_cast<double>(seeds.size());
    return rep;
}

nlohmann::json ablation_to_json(const AblationReport& r) {
    nlohmann::json arms = nlohmann::json::array();
    for (std::size_t i = 0; i < r.random_arms.size(); ++i) {
        arms.push_back({{"seed", r.random_arms[i].seed},
                        {"mean_final_min", r.random_arms[i].mean_final_min},
                        {"mean_baseline_min", r.random_arms[i].mean_baseline_min},
                        {"agent_win_rate", r.win_rates[i]}});
    }
    return nlohmann::json{{"agent",
                           {{"mean_final_min", r.agent.mean_final_min},
                            {"mean_baseline_min", r.agent.mean_baseline_min}}},
                          {"random_arms", arms},
                          {"mean_win_rate", r.mean_win_rate}};
}

std::string ablation_to_text(const AblationReport& r) {
    std::string s;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %-10s %-12s %-12s %-10s\n", "arm", "seed", "baseline",
                  "final", "win-rate");
    s += buf;
    std::snprintf(buf, sizeof buf, "%-16s %-10s %-12.4f %-12.4f %-10s\n", "agent(rule)", "-",
                  r.agent.mean_baseline_min, r.agent.mean_final_min, "-");
    s += buf;
    for (std::size_t i = 0; i < r.random_arms.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%-16s %-10llu %-12.4f %-12.4f %-10.3f\n", "random",
                      static_cast<unsigned long long>(r.random_arms[i].seed),
                      r.random_arms[i].mean_baseline_min, r.random_arms[i].mean_final_min,
                      r.win_rates[i]);
        s += buf;
    }
    std::snprintf(buf, sizeof buf, "mean agent win rate (ties count for agent): %.3f\n",
                  r.mean_win_rate);
    s += buf;
    return s;
}

double best_single_action_score(const AudioBuffer& audio, const VideoFeatureSeries& video,
                                const Scorer& scorer, std::uint32_t action_seed) {
    double best = scorer.reflect(audio, video).min_score();

    // Every action once, at default parameters; volume defaults to gain 0 and
    // the time/pitch defaults are identities, so only the blank filler and the
    // four filters can move the score.
    std::vector<EditAction> candidates;
    for (ActionKind k : all_action_kinds()) {
        EditAction a;
        a.kind = k;
        if (k == ActionKind::volume_adjust) a.params.gain_db = 0.0;
        if (k == ActionKind::fill_blanks) a.params.seed = action_seed;
        candidates.push_back(a);
    }

    for (const EditAction& a : candidates) {
        try {
            AudioBuffer out = apply_action(audio, a);
            best = std::max(best, scorer.reflect(out, video).min_score());
        } catch (const AvalignError&) {
            // a candidate failing (e.g. silent input) just drops out
        }
    }
    return best;
}

}  // namespace avalign
