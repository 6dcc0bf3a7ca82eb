#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "avalign/backend.hpp"
#include "avalign/caption.hpp"
#include "avalign/corpus.hpp"
#include "avalign/errors.hpp"
#include "avalign/manifest.hpp"
#include "avalign/scoring.hpp"
#include "avalign/util.hpp"
#include "avalign/video.hpp"
#include "avalign/wav.hpp"
#include "avalign/workflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// sysexits-style scheme
constexpr int kOk = 0;
constexpr int kPairError = 2;   // single-pair workflow ended in terminal "error"
constexpr int kUsage = 64;      // bad flags / out-of-range config
constexpr int kData = 65;       // input data cannot support the request
constexpr int kIo = 66;         // missing or unreadable input
constexpr int kSoftware = 70;   // unexpected internal failure

int g_log_level = 2;  // 0 error, 1 warn, 2 info, 3 debug

void log_at(int level, const char* tag, const std::string& msg) {
    if (level <= g_log_level) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}
void log_error(const std::string& m) { log_at(0, "error", m); }
void log_info(const std::string& m) { log_at(2, "info", m); }

int parse_log_level(const std::string& s) {
    if (s == "error") return 0;
    if (s == "warn") return 1;
    if (s == "info") return 2;
    if (s == "debug") return 3;
    throw CLI::ValidationError("--log", "must be one of error|warn|info|debug");
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw avalign::IoError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw avalign::ParseError("config file must hold a JSON object: " + path);
    return j;
}

// defaults < file < flags: a file key fills in only when the flag was not
// passed on the command line.
template <typename T>
void layer(CLI::App* cmd, const json& file, const std::string& flag, const std::string& key, T& var) {
    if (cmd->count(flag) > 0) return;
    if (!file.contains(key)) return;
    try {
        var = file.at(key).get<T>();
    } catch (const json::exception&) {
        throw avalign::ParamOutOfRange("config key '" + key + "' has the wrong type");
    }
}

void require_range(bool ok, const std::string& what) {
    if (!ok) throw avalign::ParamOutOfRange(what);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---- shared workflow flags ----

struct WorkflowFlags {
    double threshold = 0.85;
    int max_cycles = 5;
    double epsilon = 0.01;
    std::string planner = "rule";
    std::string captioner = "builtin";
    std::string scorer = "proxy";
    std::string profiles;
    std::uint64_t seed = 0;
    bool no_fallback = false;
    std::string backend_url;
    std::string backend_token;
};

void add_workflow_flags(CLI::App* cmd, WorkflowFlags& f) {
    cmd->add_option("--threshold", f.threshold, "Stop once min(alignment, temporal) reaches this, in [0, 1]")
        ->capture_default_str();
    cmd->add_option("--max-cycles", f.max_cycles, "Edit-cycle budget per pair, in [0, 100]")
        ->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "Min-score gain required to accept a candidate, in [0, 1]")
        ->capture_default_str();
    cmd->add_option("--planner", f.planner, "Planner: rule|random|remote")->capture_default_str();
    cmd->add_option("--captioner", f.captioner, "Captioner: builtin|remote")->capture_default_str();
    cmd->add_option("--scorer", f.scorer, "Scorer: proxy|remote")->capture_default_str();
    cmd->add_option("--profiles", f.profiles, "Class-profile table file (default: builtin table)")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "Base seed for every stochastic component")->capture_default_str();
    cmd->add_flag("--no-fallback", f.no_fallback,
                  "Fail instead of falling back to builtins on backend errors");
    cmd->add_option("--backend-url", f.backend_url,
                    "Remote backend URL (default: AVALIGN_BACKEND_URL)")
        ->capture_default_str();
    cmd->add_option("--backend-token", f.backend_token,
                    "Remote backend bearer token (default: AVALIGN_BACKEND_TOKEN)")
        ->capture_default_str();
}

void layer_workflow(CLI::App* cmd, const json& file, WorkflowFlags& f) {
    layer(cmd, file, "--threshold", "threshold", f.threshold);
    layer(cmd, file, "--max-cycles", "max_cycles", f.max_cycles);
    layer(cmd, file, "--epsilon", "epsilon", f.epsilon);
    layer(cmd, file, "--planner", "planner", f.planner);
    layer(cmd, file, "--captioner", "captioner", f.captioner);
    layer(cmd, file, "--scorer", "scorer", f.scorer);
    layer(cmd, file, "--profiles", "profiles", f.profiles);
    layer(cmd, file, "--seed", "seed", f.seed);
    layer(cmd, file, "--backend-url", "backend_url", f.backend_url);
    layer(cmd, file, "--backend-token", "backend_token", f.backend_token);
}

avalign::WorkflowConfig to_workflow_config(const WorkflowFlags& f) {
    require_range(f.threshold >= 0.0 && f.threshold <= 1.0, "--threshold must be in [0, 1]");
    require_range(f.max_cycles >= 0 && f.max_cycles <= 100, "--max-cycles must be in [0, 100]");
    require_range(f.epsilon >= 0.0 && f.epsilon <= 1.0, "--epsilon must be in [0, 1]");

    avalign::WorkflowConfig cfg;
    cfg.threshold = f.threshold;
    cfg.max_cycles = f.max_cycles;
    cfg.improvement_epsilon = f.epsilon;
    cfg.planner = avalign::parse_planner_kind(f.planner);
    if (f.captioner == "builtin") cfg.captioner = avalign::CaptionerKind::builtin;
    else if (f.captioner == "remote") cfg.captioner = avalign::CaptionerKind::remote;
    else throw avalign::ParamOutOfRange("--captioner must be builtin or remote");
    if (f.scorer == "proxy") cfg.scorer = avalign::ScorerKind::proxy;
    else if (f.scorer == "remote") cfg.scorer = avalign::ScorerKind::remote;
    else throw avalign::ParamOutOfRange("--scorer must be proxy or remote");
    cfg.fallback_builtin = !f.no_fallback;
    cfg.seed = f.seed;
    cfg.scorer_cfg.kind = cfg.scorer;
    cfg.scorer_cfg.profile_path = f.profiles;
    cfg.backend = avalign::backend_from_env();
    if (!f.backend_url.empty()) cfg.backend.url = f.backend_url;
    if (!f.backend_token.empty()) cfg.backend.token = f.backend_token;
    return cfg;
}

json workflow_flags_json(const WorkflowFlags& f) {
    return json{{"threshold", f.threshold},
                {"max_cycles", f.max_cycles},
                {"epsilon", f.epsilon},
                {"planner", f.planner},
                {"captioner", f.captioner},
                {"scorer", f.scorer},
                {"profiles", f.profiles},
                {"seed", f.seed},
                {"fallback", !f.no_fallback},
                {"backend_url", f.backend_url},
                {"backend_token", f.backend_token.empty() ? "" : "<set>"}};
}

// Prints (with --effective-config) or logs the resolved settings.
// Returns true when the command should exit without running.
bool handle_effective(bool dump, const json& effective) {
    log_info("effective config: " + effective.dump());
    if (dump) {
        std::cout << effective.dump(2) << "\n";
        return true;
    }
    return false;
}

// ---- align ----

struct AlignArgs {
    std::string audio, features, out, trace, config;
    WorkflowFlags wf;
    bool effective = false;
};

int run_align(CLI::App* cmd, AlignArgs& a) {
    json file = load_config_file(a.config);
    layer_workflow(cmd, file, a.wf);
    layer(cmd, file, "--out", "out", a.out);
    layer(cmd, file, "--trace", "trace", a.trace);

    if (a.out.empty()) a.out = (fs::path(a.audio).parent_path() / fs::path(a.audio).stem()).string() + ".aligned.wav";
    if (a.trace.empty()) a.trace = a.out + ".trace.jsonl";

    avalign::WorkflowConfig cfg = to_workflow_config(a.wf);
    json eff = workflow_flags_json(a.wf);
    eff["audio"] = a.audio;
    eff["features"] = a.features;
    eff["out"] = a.out;
    eff["trace"] = a.trace;
    if (handle_effective(a.effective, eff)) return kOk;

    avalign::AudioBuffer audio = avalign::load_audio(a.audio);
    avalign::VideoFeatureSeries video = avalign::load_video_features(a.features);
    avalign::Scorer scorer(cfg.scorer_cfg);
    std::string pair_id = fs::path(a.audio).stem().string();

    avalign::PairResult res = avalign::run_pair(audio, video, pair_id, cfg, scorer);
    avalign::write_wav(a.out, res.audio);
    avalign::write_traces(a.trace, {res.trace});

    const avalign::WorkflowTrace& t = res.trace;
    std::printf("pair=%s alignment=%.4f temporal=%.4f min=%.4f baseline_min=%.4f cycles=%zu terminal=%s\n",
                t.pair_id.c_str(), t.final_scores.alignment, t.final_scores.temporal,
                t.final_scores.min_score(), t.baseline.min_score(), t.cycles.size(),
                t.terminal.c_str());
    if (t.terminal == "error") {
        log_error("workflow error: " + t.error);
        return kPairError;
    }
    return kOk;
}

// ---- batch ----

struct BatchArgs {
    std::string manifest, root, out, config;
    int parallelism = 1;
    WorkflowFlags wf;
    bool effective = false;
};

int run_batch_cmd(CLI::App* cmd, BatchArgs& a) {
    json file = load_config_file(a.config);
    layer_workflow(cmd, file, a.wf);
    layer(cmd, file, "--root", "root", a.root);
    layer(cmd, file, "--out", "out", a.out);
    layer(cmd, file, "--parallelism", "parallelism", a.parallelism);
    require_range(a.parallelism >= 1 && a.parallelism <= 64, "--parallelism must be in [1, 64]");
    if (a.root.empty()) a.root = fs::path(a.manifest).parent_path().string();

    avalign::WorkflowConfig cfg = to_workflow_config(a.wf);
    json eff = workflow_flags_json(a.wf);
    eff["manifest"] = a.manifest;
    eff["root"] = a.root;
    eff["out"] = a.out;
    eff["parallelism"] = a.parallelism;
    if (handle_effective(a.effective, eff)) return kOk;

    std::vector<avalign::AVPairRecord> records = avalign::read_manifest(a.manifest);
    avalign::BatchResult res = avalign::run_batch(records, a.root, cfg, a.out, a.parallelism);
    std::cout << avalign::report_to_text(res.report);
    if (res.report.n_errored > 0)
        std::printf("pairs with errors: %zu of %zu\n", res.report.n_errored, res.report.n_pairs);
    return kOk;  // per-pair soft errors are reported, not fatal
}

// ---- synth ----

struct SynthArgs {
    std::string out, classes, corruptions, config;
    int pairs = 50;
    std::uint64_t seed = 0;
    double duration = 3.0;
    double frame_rate = 25.0;
    double clean_fraction = 0.0;
    bool effective = false;
};

int run_synth(CLI::App* cmd, SynthArgs& a) {
    json file = load_config_file(a.config);
    layer(cmd, file, "--out", "out", a.out);
    layer(cmd, file, "--pairs", "pairs", a.pairs);
    layer(cmd, file, "--seed", "seed", a.seed);
    layer(cmd, file, "--duration", "duration", a.duration);
    layer(cmd, file, "--frame-rate", "frame_rate", a.frame_rate);
    layer(cmd, file, "--clean-fraction", "clean_fraction", a.clean_fraction);
    layer(cmd, file, "--classes", "classes", a.classes);
    layer(cmd, file, "--corruptions", "corruptions", a.corruptions);

    require_range(a.pairs >= 1 && a.pairs <= 100000, "--pairs must be in [1, 100000]");
    require_range(a.duration >= 1.0 && a.duration <= 60.0, "--duration must be in [1, 60]");
    require_range(a.frame_rate >= 1.0 && a.frame_rate <= 120.0, "--frame-rate must be in [1, 120]");
    require_range(a.clean_fraction >= 0.0 && a.clean_fraction <= 1.0,
                  "--clean-fraction must be in [0, 1]");

    avalign::SynthConfig cfg;
    cfg.n_pairs = a.pairs;
    cfg.seed = a.seed;
    cfg.duration_s = a.duration;
    cfg.frame_rate_hz = a.frame_rate;
    cfg.clean_fraction = a.clean_fraction;
    cfg.classes = split_csv(a.classes);
    cfg.corruptions = split_csv(a.corruptions);

    json eff{{"out", a.out},         {"pairs", a.pairs},
             {"seed", a.seed},       {"duration", a.duration},
             {"frame_rate", a.frame_rate}, {"clean_fraction", a.clean_fraction},
             {"classes", cfg.classes},     {"corruptions", cfg.corruptions}};
    if (handle_effective(a.effective, eff)) return kOk;

    std::vector<avalign::AVPairRecord> records = avalign::synth_corpus(a.out, cfg);
    std::printf("wrote %zu pairs under %s\n", records.size(), a.out.c_str());
    return kOk;
}

// ---- analyze (mixture study) ----

struct AnalyzeArgs {
    std::string manifest, root, out, profiles, config;
    std::size_t n_true = 50, n_false = 50;
    std::uint64_t seed = 0;
    bool effective = false;
};

int run_analyze(CLI::App* cmd, AnalyzeArgs& a) {
    json file = load_config_file(a.config);
    layer(cmd, file, "--root", "root", a.root);
    layer(cmd, file, "--out", "out", a.out);
    layer(cmd, file, "--true", "true", a.n_true);
    layer(cmd, file, "--false", "false", a.n_false);
    layer(cmd, file, "--seed", "seed", a.seed);
    layer(cmd, file, "--profiles", "profiles", a.profiles);
    require_range(a.n_true >= 1 && a.n_false >= 1, "--true/--false must be >= 1");
    if (a.root.empty()) a.root = fs::path(a.manifest).parent_path().string();

    json eff{{"manifest", a.manifest}, {"root", a.root},   {"out", a.out},
             {"true", a.n_true},       {"false", a.n_false}, {"seed", a.seed},
             {"profiles", a.profiles}};
    if (handle_effective(a.effective, eff)) return kOk;

    std::vector<avalign::AVPairRecord> records = avalign::read_manifest(a.manifest);
    avalign::ScorerConfig scfg;
    scfg.profile_path = a.profiles;
    avalign::Scorer scorer(scfg);
    avalign::MixtureConfig mcfg;
    mcfg.base_true = a.n_true;
    mcfg.base_false = a.n_false;
    mcfg.seed = a.seed;
    avalign::MixtureReport rep = avalign::mixture_study(records, a.root, scorer, mcfg);

    std::string text = avalign::mixture_to_text(rep);
    std::cout << text;
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        std::ofstream jf(fs::path(a.out) / "mixture.json");
        jf << avalign::mixture_to_json(rep).dump(2) << "\n";
        std::ofstream tf(fs::path(a.out) / "mixture.txt");
        tf << text;
    }
    return kOk;
}

// ---- ablate ----

struct AblateArgs {
    std::string manifest, root, out, seeds = "1,2,3", config;
    WorkflowFlags wf;
    bool effective = false;
};

int run_ablate(CLI::App* cmd, AblateArgs& a) {
    json file = load_config_file(a.config);
    layer_workflow(cmd, file, a.wf);
    layer(cmd, file, "--root", "root", a.root);
    layer(cmd, file, "--out", "out", a.out);
    layer(cmd, file, "--seeds", "seeds", a.seeds);
    if (a.root.empty()) a.root = fs::path(a.manifest).parent_path().string();

    std::vector<std::uint64_t> seeds;
    for (const std::string& s : split_csv(a.seeds)) {
        try {
            seeds.push_back(std::stoull(s));
        } catch (const std::exception&) {
            throw avalign::ParamOutOfRange("--seeds must be a comma list of integers");
        }
    }
    require_range(!seeds.empty(), "--seeds must name at least one seed");

    avalign::WorkflowConfig cfg = to_workflow_config(a.wf);
    json eff = workflow_flags_json(a.wf);
    eff["manifest"] = a.manifest;
    eff["root"] = a.root;
    eff["out"] = a.out;
    eff["seeds"] = a.seeds;
    if (handle_effective(a.effective, eff)) return kOk;

    std::vector<avalign::AVPairRecord> records = avalign::read_manifest(a.manifest);
    avalign::AblationReport rep = avalign::ablation_study(records, a.root, cfg, seeds);

    std::string text = avalign::ablation_to_text(rep);
    std::cout << text;
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        std::ofstream jf(fs::path(a.out) / "ablation.json");
        jf << avalign::ablation_to_json(rep).dump(2) << "\n";
        std::ofstream tf(fs::path(a.out) / "ablation.txt");
        tf << text;
    }
    return kOk;
}

// ---- inspect ----

struct InspectArgs {
    std::string audio, features;
    bool as_json = false;
};

int run_inspect(InspectArgs& a) {
    avalign::AudioBuffer audio = avalign::load_audio(a.audio);
    avalign::Caption ac = avalign::describe_audio(audio);
    json out{{"audio", avalign::caption_to_json(ac)}};
    if (!a.features.empty()) {
        avalign::VideoFeatureSeries video = avalign::load_video_features(a.features);
        out["video"] = avalign::caption_to_json(avalign::describe_video(video));
    }
    if (a.as_json) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << ac.text << "\n";
        for (const auto& [k, v] : ac.features) std::printf("  %-22s %.4f\n", k.c_str(), v);
        if (out.contains("video")) std::cout << out["video"]["text"].get<std::string>() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"avalign: agentic audio-to-video alignment"};
    app.require_subcommand(1);

    std::string log_level = "info";
    app.add_option("--log", log_level, "Log level: error|warn|info|debug")->capture_default_str();

    AlignArgs al;
    CLI::App* align = app.add_subcommand("align", "Align one audio file to one video feature series");
    align->add_option("--audio", al.audio, "Input WAV")->required();
    align->add_option("--features", al.features, "Video feature series JSON")->required();
    align->add_option("--out", al.out, "Aligned WAV path (default: <audio>.aligned.wav)")
        ->capture_default_str();
    align->add_option("--trace", al.trace, "Trace JSONL path (default: <out>.trace.jsonl)")
        ->capture_default_str();
    align->add_option("--config", al.config, "JSON config file (defaults < file < flags)")
        ->capture_default_str();
    align->add_flag("--effective-config", al.effective, "Print resolved config as JSON and exit");
    add_workflow_flags(align, al.wf);

    BatchArgs ba;
    CLI::App* batch = app.add_subcommand("batch", "Run the workflow over every manifest pair");
    batch->add_option("--manifest", ba.manifest, "Manifest JSONL")->required();
    batch->add_option("--root", ba.root, "Root for relative paths (default: manifest directory)")
        ->capture_default_str();
    batch->add_option("--out", ba.out, "Output directory")->required();
    batch->add_option("--parallelism", ba.parallelism, "Worker threads, in [1, 64]")
        ->capture_default_str();
    batch->add_option("--config", ba.config, "JSON config file (defaults < file < flags)")
        ->capture_default_str();
    batch->add_flag("--effective-config", ba.effective, "Print resolved config as JSON and exit");
    add_workflow_flags(batch, ba.wf);

    SynthArgs sy;
    CLI::App* synth = app.add_subcommand("synth", "Synthesize a corrupted AV corpus with ground truth");
    synth->add_option("--out", sy.out, "Corpus directory")->required();
    synth->add_option("--pairs", sy.pairs, "Number of pairs, in [1, 100000]")->capture_default_str();
    synth->add_option("--seed", sy.seed, "Corpus seed")->capture_default_str();
    synth->add_option("--duration", sy.duration, "Clip length in seconds, in [1, 60]")
        ->capture_default_str();
    synth->add_option("--frame-rate", sy.frame_rate, "Video feature rate in Hz, in [1, 120]")
        ->capture_default_str();
    synth->add_option("--clean-fraction", sy.clean_fraction, "Share of pairs left uncorrupted, in [0, 1]")
        ->capture_default_str();
    synth->add_option("--classes", sy.classes, "Comma list of class labels (default: all builtin)")
        ->capture_default_str();
    synth->add_option("--corruptions", sy.corruptions,
                      "Comma list of corruption kinds (default: noise,offset,speed,gap,gain)")
        ->capture_default_str();
    synth->add_option("--config", sy.config, "JSON config file (defaults < file < flags)")
        ->capture_default_str();
    synth->add_flag("--effective-config", sy.effective, "Print resolved config as JSON and exit");

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "Five-cell true/false mixture study");
    analyze->add_option("--manifest", an.manifest, "Manifest JSONL with ground truth")->required();
    analyze->add_option("--root", an.root, "Root for relative paths (default: manifest directory)")
        ->capture_default_str();
    analyze->add_option("--out", an.out, "Report directory (mixture.json, mixture.txt)")
        ->capture_default_str();
    analyze->add_option("--true", an.n_true, "Base count of true pairs per cell")->capture_default_str();
    analyze->add_option("--false", an.n_false, "Base count of false pairs per cell")
        ->capture_default_str();
    analyze->add_option("--seed", an.seed, "Sampling seed")->capture_default_str();
    analyze->add_option("--profiles", an.profiles, "Class-profile table file (default: builtin table)")
        ->capture_default_str();
    analyze->add_option("--config", an.config, "JSON config file (defaults < file < flags)")
        ->capture_default_str();
    analyze->add_flag("--effective-config", an.effective, "Print resolved config as JSON and exit");

    AblateArgs ab;
    CLI::App* ablate = app.add_subcommand("ablate", "Rule planner vs random actions ablation");
    ablate->add_option("--manifest", ab.manifest, "Manifest JSONL")->required();
    ablate->add_option("--root", ab.root, "Root for relative paths (default: manifest directory)")
        ->capture_default_str();
    ablate->add_option("--out", ab.out, "Report directory (ablation.json, ablation.txt)")
        ->capture_default_str();
    ablate->add_option("--seeds", ab.seeds, "Comma list of random-arm seeds")->capture_default_str();
    ablate->add_option("--config", ab.config, "JSON config file (defaults < file < flags)")
        ->capture_default_str();
    ablate->add_flag("--effective-config", ab.effective, "Print resolved config as JSON and exit");
    add_workflow_flags(ablate, ab.wf);

    InspectArgs in;
    CLI::App* inspect = app.add_subcommand("inspect", "Print captions and features for one pair");
    inspect->add_option("--audio", in.audio, "Input WAV")->required();
    inspect->add_option("--features", in.features, "Video feature series JSON")->capture_default_str();
    inspect->add_flag("--json", in.as_json, "Emit canonical JSON instead of text");

    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        g_log_level = parse_log_level(log_level);
        if (align->parsed()) return run_align(align, al);
        if (batch->parsed()) return run_batch_cmd(batch, ba);
        if (synth->parsed()) return run_synth(synth, sy);
        if (analyze->parsed()) return run_analyze(analyze, an);
        if (ablate->parsed()) return run_ablate(ablate, ab);
        if (inspect->parsed()) return run_inspect(in);
        return kUsage;
    } catch (const CLI::ParseError&) {
        return kUsage;
    } catch (const avalign::ParamOutOfRange& e) {
        log_error(e.what());
        return kUsage;
    } catch (const avalign::InsufficientPairs& e) {
        log_error(e.what());
        return kData;
    } catch (const avalign::MissingAudioFile& e) {
        log_error(e.what());
        return kIo;
    } catch (const avalign::IoError& e) {
        log_error(e.what());
        return kIo;
    } catch (const avalign::ParseError& e) {
        log_error(e.what());
        return kIo;
    } catch (const avalign::AvalignError& e) {
        log_error(e.what());
        return kSoftware;
    } catch (const std::exception& e) {
        log_error(e.what());
        return kSoftware;
    }
}
