#include "avalign/backend.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "avalign/errors.hpp"
#include "avalign/util.hpp"
#include "avalign/wav.hpp"

namespace avalign {

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host:port
    std::string path;  // leading slash
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ParamOutOfRange("backend url needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl p;
    if (path_start == std::string::npos) {
        p.base = url;
        p.path = "/";
    } else {
        p.base = url.substr(0, path_start);
        p.path = url.substr(path_start);
    }
    return p;
}

}  // namespace

BackendEndpoint backend_from_env() {
    BackendEndpoint ep;
    if (const char* u = std::getenv("AVALIGN_BACKEND_URL")) ep.url = u;
    if (const char* t = std::getenv("AVALIGN_BACKEND_TOKEN")) ep.token = t;
    return ep;
}

struct BackendClient::Impl {
    ParsedUrl url;
    std::mutex gate_mutex;
    std::condition_variable gate_cv;
    int inflight = 0;
};

BackendClient::BackendClient(BackendEndpoint ep) : ep_(std::move(ep)), impl_(new Impl) {
    if (!ep_.configured()) throw ParamOutOfRange("backend endpoint has no url");
    impl_->url = split_url(ep_.url);
}

BackendClient::~BackendClient() = default;

nlohmann::json BackendClient::post_task(const nlohmann::json& request) {
    // Bound concurrent requests across worker threads.
    {
        std::unique_lock<std::mutex> lk(impl_->gate_mutex);
        impl_->gate_cv.wait(lk, [&] { return impl_->inflight < ep_.max_inflight; });
        ++impl_->inflight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            {
                std::lock_guard<std::mutex> lk(impl->gate_mutex);
                --impl->inflight;
            }
            impl->gate_cv.notify_one();
        }
    } release{impl_.get()};

    httplib::Client cli(impl_->url.base);
    cli.set_connection_timeout(0, ep_.timeout_ms * 1000);
    cli.set_read_timeout(0, ep_.timeout_ms * 1000);
    cli.set_write_timeout(0, ep_.timeout_ms * 1000);

    httplib::Headers headers;
    if (!ep_.token.empty()) headers.emplace("Authorization", "Bearer " + ep_.token);

    const std::string body = request.dump();
    httplib::Error last_err = httplib::Error::Success;
    int last_status = 0;

    for (int attempt = 0; attempt <= ep_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(ep_.retry_backoff_ms * attempt));
        auto res = cli.Post(impl_->url.path, headers, body, "application/json");
        if (!res) {
            last_err = res.error();
            // Connection-level failures and timeouts are retryable.
            continue;
        }
        last_status = res->status;
        if (res->status >= 500) continue;  // transient server error, retry
        if (res->status < 200 || res->status >= 300)
            throw BackendMalformedResponse("backend returned status " + std::to_string(res->status));
        try {
            nlohmann::json j = nlohmann::json::parse(res->body);
            if (!j.is_object()) throw BackendMalformedResponse("backend response is not a JSON object");
            return j;
        } catch (const nlohmann::json::exception& e) {
            throw BackendMalformedResponse(std::string("backend response is not valid JSON: ") + e.what());
        }
    }

    if (last_status >= 500)
        throw BackendUnreachable("backend kept failing with status " + std::to_string(last_status) +
                                 " after " + std::to_string(ep_.max_retries + 1) + " attempts");
    if (last_err == httplib::Error::ConnectionTimeout || last_err == httplib::Error::Read ||
        last_err == httplib::Error::Write)
        throw Timeout("backend timed out after " + std::to_string(ep_.max_retries + 1) + " attempts");
    throw BackendUnreachable("cannot reach backend at " + ep_.url);
}

nlohmann::json caption_to_json(const Caption& c) {
    nlohmann::json j;
    j["text"] = c.text;
    j["features"] = c.features;
    j["labels"] = c.labels;
    j["source"] = c.source == CaptionSource::remote ? "remote" : "builtin";
    return j;
}

Caption caption_from_json(const nlohmann::json& j) {
    Caption c;
    if (j.contains("text") && j["text"].is_string()) c.text = j["text"].get<std::string>();
    if (j.contains("features") && j["features"].is_object()) {
        for (auto it = j["features"].begin(); it != j["features"].end(); ++it) {
            if (it.value().is_number()) c.features[it.key()] = it.value().get<double>();
        }
    }
    if (j.contains("labels") && j["labels"].is_array()) {
        for (const auto& l : j["labels"]) {
            if (l.is_string()) c.labels.push_back(l.get<std::string>());
        }
    }
    if (j.contains("source") && j["source"] == "remote") c.source = CaptionSource::remote;
    return c;
}

Caption BackendClient::caption_audio(const AudioBuffer& audio) {
    nlohmann::json req;
    req["task"] = "caption";
    req["modality"] = "audio";
    req["payload"] = {{"wav_base64", base64_encode(encode_wav(audio))}};
    req["context"] = nlohmann::json::object();
    nlohmann::json res = post_task(req);
    if (!res.contains("text") || !res["text"].is_string())
        throw BackendMalformedResponse("caption response has no text field");
    Caption c = caption_from_json(res);
    c.source = CaptionSource::remote;
    return c;
}

Caption BackendClient::caption_video(const VideoFeatureSeries& video) {
    nlohmann::json req;
    req["task"] = "caption";
    req["modality"] = "video";
    req["payload"] = {{"features", video_to_json(video)}};
    req["context"] = nlohmann::json::object();
    nlohmann::json res = post_task(req);
    if (!res.contains("text") || !res["text"].is_string())
        throw BackendMalformedResponse("caption response has no text field");
    Caption c = caption_from_json(res);
    c.source = CaptionSource::remote;
    if (c.labels.empty()) c.labels = video.labels;
    return c;
}

ActionPlan BackendClient::plan(const PlanContext& ctx) {
    nlohmann::json req;
    req["task"] = "plan";
    req["modality"] = "pair";
    req["payload"] = {{"audio_caption", caption_to_json(ctx.audio_caption)},
                      {"video_caption", caption_to_json(ctx.video_caption)}};
    nlohmann::json context;
    context["cycle_index"] = ctx.cycle_index;
    context["history"] = nlohmann::json::array();
    for (const ActionPlan& h : ctx.history) context["history"].push_back(plan_to_json(h));
    if (ctx.feedback) {
        context["feedback"] = {{"alignment", ctx.feedback->alignment},
                               {"temporal", ctx.feedback->temporal}};
    }
    req["context"] = context;

    nlohmann::json res = post_task(req);
    if (!res.contains("actions"))
        throw BackendMalformedResponse("plan response has no actions field");
    // Strict parse: only the closed vocabulary with in-range parameters.
    return plan_from_json(nlohmann::json{{"actions", res["actions"]}}, true);
}

ReflectionScores BackendClient::score(const AudioBuffer& audio, const VideoFeatureSeries& video) {
    nlohmann::json req;
    req["task"] = "score";
    req["modality"] = "pair";
    req["payload"] = {{"wav_base64", base64_encode(encode_wav(audio))},
                      {"features", video_to_json(video)}};
    req["context"] = nlohmann::json::object();
    nlohmann::json res = post_task(req);
    if (!res.contains("scores") || !res["scores"].is_object())
        throw BackendMalformedResponse("score response has no scores object");
    const nlohmann::json& s = res["scores"];
    if (!s.contains("alignment") || !s.contains("temporal") || !s["alignment"].is_number() ||
        !s["temporal"].is_number())
        throw BackendMalformedResponse("score response missing alignment/temporal numbers");
    ReflectionScores out;
    out.alignment = std::clamp(s["alignment"].get<double>(), 0.0, 1.0);
    out.temporal = std::clamp(s["temporal"].get<double>(), 0.0, 1.0);
    return out;
}

}  // namespace avalign
