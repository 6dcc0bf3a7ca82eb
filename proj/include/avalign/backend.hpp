#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "avalign/actions.hpp"
#include "avalign/audio.hpp"
#include "avalign/caption.hpp"
#include "avalign/planner.hpp"
#include "avalign/scoring.hpp"
#include "avalign/video.hpp"

namespace avalign {

struct BackendEndpoint {
    std::string url;    // e.g. http://127.0.0.1:8091/v1/agent
    std::string token;  // sent as a bearer Authorization header when set
    int timeout_ms = 5000;
    int max_retries = 2;
    int retry_backoff_ms = 100;
    int max_inflight = 4;  // concurrent request cap across threads

    bool configured() const { return !url.empty(); }
};

// Reads AVALIGN_BACKEND_URL / AVALIGN_BACKEND_TOKEN.
BackendEndpoint backend_from_env();

// JSON-over-HTTP client for the caption / plan / score tasks. Every call
// POSTs one request object and expects one response object back. Throws
// BackendUnreachable, Timeout, or BackendMalformedResponse.
class BackendClient {
public:
    explicit BackendClient(BackendEndpoint ep);
    ~BackendClient();

    nlohmann::json post_task(const nlohmann::json& request);

    Caption caption_audio(const AudioBuffer& audio);
    Caption caption_video(const VideoFeatureSeries& video);
    ActionPlan plan(const PlanContext& ctx);
    ReflectionScores score(const AudioBuffer& audio, const VideoFeatureSeries& video);

    const BackendEndpoint& endpoint() const { return ep_; }

private:
    BackendEndpoint ep_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

nlohmann::json caption_to_json(const Caption& c);
Caption caption_from_json(const nlohmann::json& j);

}  // namespace avalign
